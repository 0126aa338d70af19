#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "dataset.hpp"
#include "renewcount/estimation.hpp"
#include "renewcount/model.hpp"
#include "renewcount/moments.hpp"

#ifndef RENEWCOUNT_VERSION
#define RENEWCOUNT_VERSION "0.0.0"
#endif

namespace renewcount::cli {
namespace {

using Json = nlohmann::ordered_json;

enum class Format { Text, Json };

struct ModelFlags {
  std::string family;
  double t = 1.0;
  int hurdle_m = 1;
  std::map<std::string, std::optional<double>> values;
  std::string params;

  [[nodiscard]] Family parsed_family() const {
    const auto f = parse_family(family);
    if (!f) throw DataError("unknown family '" + family + "'");
    return *f;
  }
  [[nodiscard]] ModelSpec spec() const { return {parsed_family(), t, hurdle_m}; }
};

std::vector<std::string> family_names() {
  std::vector<std::string> names;
  for (Family f : kAllFamilies) names.emplace_back(to_string(f));
  return names;
}

void add_family_flags(CLI::App* sub, ModelFlags& m) {
  sub->add_option("--family", m.family, "distribution family")
      ->required()
      ->check(CLI::IsMember(family_names()));
  sub->add_option("--t", m.t, "exposure (observation window)")->check(CLI::PositiveNumber);
  sub->add_option("--hurdle-m", m.hurdle_m, "index of the modified interarrival")
      ->check(CLI::PositiveNumber);
}

void add_parameter_flags(CLI::App* sub, ModelFlags& m) {
  for (const char* name : {"alpha", "beta", "delta", "alpha2", "beta2", "w", "mu", "lambda"}) {
    sub->add_option(std::string("--") + name, m.values[name]);
  }
  sub->add_option("--params", m.params, "parameters as name=value,name=value");
}

void add_format_flag(CLI::App* sub, Format& fmt) {
  sub->add_option_function<std::string>(
         "--format", [&fmt](const std::string& v) { fmt = v == "json" ? Format::Json : Format::Text; },
         "output format (default text)")
      ->check(CLI::IsMember({"text", "json"}));
}

std::map<std::string, double> parse_assignments(const std::string& text, const char* flag) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw DataError(std::string(flag) + ": expected name=value, got '" + item + "'");
    }
    const std::string name = detail::trim(item.substr(0, eq));
    out[name] = parse_real(detail::trim(item.substr(eq + 1)), std::string(flag) + " " + name);
  }
  return out;
}

/// Natural-scale parameters named by the family, from individual flags or
/// --params.
Eigen::VectorXd natural_from_flags(const ModelFlags& m) {
  const Family f = m.parsed_family();
  const auto assigned = parse_assignments(m.params, "--params");
  for (const auto& [name, value] : assigned) {
    if (!m.values.count(name)) throw DataError("--params: unknown parameter '" + name + "'");
  }
  const auto names = natural_parameter_names(f);
  Eigen::VectorXd natural(static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& flag = m.values.at(names[i]);
    const auto it = assigned.find(names[i]);
    if (flag && it != assigned.end() && *flag != it->second) {
      throw DataError("parameter '" + names[i] + "' given twice with different values");
    }
    if (!flag && it == assigned.end()) {
      throw DataError("family " + m.family + " needs --" + names[i]);
    }
    natural[static_cast<Eigen::Index>(i)] = flag ? *flag : it->second;
  }
  for (const auto& [name, value] : m.values) {
    if (value && std::find(names.begin(), names.end(), name) == names.end()) {
      throw DataError("parameter --" + name + " does not apply to family " + m.family);
    }
  }
  for (const auto& [name, value] : assigned) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw DataError("parameter '" + name + "' does not apply to family " + m.family);
    }
  }
  return natural;
}

Eigen::VectorXd base_from_flags(const ModelFlags& m) {
  const Family f = m.parsed_family();
  const Eigen::VectorXd natural = natural_from_flags(m);
  if (f == Family::ERPGammaBetaMixture || f == Family::ERPGammaAlphaMixture) {
    if (!(natural[3] > 0.0 && natural[3] < 1.0)) throw DomainError("w must lie in (0, 1)");
  }
  if (f == Family::RPGammaHurdle && !(natural[1] + natural[2] > 0.0)) {
    throw DomainError("delta must exceed -beta");
  }
  for (Eigen::Index i = 0; i < natural.size(); ++i) {
    if (f == Family::RPGammaHurdle && i == 2) continue;
    if (!(natural[i] > 0.0)) {
      throw DomainError(natural_parameter_names(f)[static_cast<std::size_t>(i)] +
                        " must be positive");
    }
  }
  return base_from_natural(f, natural);
}

Json parameters_json(const ModelFlags& m) {
  const auto names = natural_parameter_names(m.parsed_family());
  const Eigen::VectorXd natural = natural_from_flags(m);
  Json j = Json::object();
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = natural[static_cast<Eigen::Index>(i)];
  return j;
}

Json header_json(const char* command) {
  Json j;
  j["tool"] = "renewcount";
  j["version"] = RENEWCOUNT_VERSION;
  j["command"] = command;
  return j;
}

std::string text_number(double v) {
  if (std::isnan(v)) return "-";
  return fmt::format("{:.6g}", v);
}

std::string describe_parameters(const Json& params, const ModelSpec& spec) {
  std::string s = spec.family == Family::RPGammaHurdle ? fmt::format(" m={}", spec.hurdle_m) : "";
  for (const auto& [k, v] : params.items()) s += fmt::format(" {}={}", k, text_number(v.get<double>()));
  return s;
}

void emit(std::ostream& out, Format format, const Json& j, const std::string& text) {
  if (format == Format::Json) {
    out << j.dump(2) << '\n';
  } else {
    out << text;
  }
}

// ---------------------------------------------------------------- pmf

struct PmfFlags {
  ModelFlags model;
  std::optional<int> n_max;
  Format format = Format::Text;
};

int cmd_pmf(const PmfFlags& f, std::ostream& out) {
  const ModelSpec spec = f.model.spec();
  const CountDistribution dist = mean_link(spec, base_from_flags(f.model), 0.0);
  // Mean and variance always describe the whole distribution; sum and tail
  // mass describe the rows printed.
  const CountTable table = dist.table();
  const double mean = table.mean();
  const double variance = table.variance();
  std::vector<double> pmf = table.pmf;
  std::vector<double> survival = table.survival;
  if (f.n_max) {
    pmf.clear();
    survival.clear();
    for (int n = 0; n <= *f.n_max; ++n) {
      pmf.push_back(dist.pmf(n));
      survival.push_back(dist.survival(n));
    }
    survival.push_back(dist.survival(*f.n_max + 1));
  }
  double sum = 0.0;
  for (double p : pmf) sum += p;
  const double tail = survival[pmf.size()];

  Json j = header_json("pmf");
  j["family"] = to_string(spec.family);
  if (spec.family == Family::RPGammaHurdle) j["hurdle_m"] = spec.hurdle_m;
  j["t"] = spec.t;
  j["parameters"] = parameters_json(f.model);
  Json rows = Json::array();
  for (std::size_t n = 0; n < pmf.size(); ++n) {
    rows.push_back(Json{{"n", n}, {"pmf", pmf[n]}, {"cdf", 1.0 - survival[n + 1]},
                        {"survival", survival[n]}});
  }
  j["rows"] = rows;
  j["sum_pmf"] = sum;
  j["tail_mass"] = tail;
  j["mean"] = mean;
  j["variance"] = variance;

  std::string text = fmt::format("# renewcount {} pmf  family={} t={}{}\n", RENEWCOUNT_VERSION,
                                 to_string(spec.family), text_number(spec.t),
                                 describe_parameters(j["parameters"], spec));
  text += fmt::format("{:>6} {:>18} {:>18} {:>18}\n", "n", "pmf", "cdf", "survival");
  for (std::size_t n = 0; n < pmf.size(); ++n) {
    text += fmt::format("{:>6} {:>18.10e} {:>18.10e} {:>18.10e}\n", n, pmf[n],
                        1.0 - survival[n + 1], survival[n]);
  }
  text += fmt::format("# sum pmf   {:.10f}\n# tail mass {:.3e}\n# mean      {:.6f}\n# variance  {:.6f}\n",
                      sum, tail, mean, variance);
  emit(out, f.format, j, text);
  return kOk;
}

// ------------------------------------------------------------ moments

struct MomentsFlags {
  ModelFlags model;
  Format format = Format::Text;
};

double exact_variance(const CountDistribution& d, std::string& method) {
  switch (d.family) {
    case Family::Poisson:
      method = "closed form";
      return d.mean();
    case Family::ERPGamma:
      method = "series";
      return erp_variance_exact(d.gamma);
    case Family::ERPIG:
      method = "series";
      return erp_variance_exact(d.ig);
    case Family::ERPGammaBetaMixture:
    case Family::ERPGammaAlphaMixture: {
      method = "series";
      const auto& mix = d.mixture;
      const double m1 = mix.component1.expected_count();
      const double m2 = mix.component2.expected_count();
      return mix.w * erp_variance_exact(mix.component1) +
             (1.0 - mix.w) * erp_variance_exact(mix.component2) +
             mix.w * (1.0 - mix.w) * (m1 - m2) * (m1 - m2);
    }
    default:
      method = "table";
      return d.table().variance();
  }
}

int cmd_moments(const MomentsFlags& f, std::ostream& out) {
  const ModelSpec spec = f.model.spec();
  const CountDistribution dist = mean_link(spec, base_from_flags(f.model), 0.0);
  const double mean = dist.mean();
  std::string method;
  const double variance = exact_variance(dist, method);
  std::optional<double> asymptotic;
  if (spec.family == Family::ERPGamma) asymptotic = erp_gamma_variance_asymptotic(dist.gamma);
  if (spec.family == Family::ERPIG) asymptotic = erp_ig_variance_asymptotic(dist.ig);
  const Dispersion verdict = classify_dispersion(mean, variance);

  Json j = header_json("moments");
  j["family"] = to_string(spec.family);
  if (spec.family == Family::RPGammaHurdle) j["hurdle_m"] = spec.hurdle_m;
  j["t"] = spec.t;
  j["parameters"] = parameters_json(f.model);
  j["mean"] = mean;
  j["variance"] = variance;
  j["variance_method"] = method;
  j["variance_asymptotic"] = asymptotic ? Json(*asymptotic) : Json(nullptr);
  j["dispersion"] = to_string(verdict);

  std::string text = fmt::format("renewcount {} moments  family={} t={}{}\n", RENEWCOUNT_VERSION,
                                 to_string(spec.family), text_number(spec.t),
                                 describe_parameters(j["parameters"], spec));
  text += fmt::format("{:<22}{:.10g}\n", "mean", mean);
  text += fmt::format("{:<22}{:.10g}  ({})\n", "variance", variance, method);
  text += fmt::format("{:<22}{}\n", "variance asymptotic",
                      asymptotic ? fmt::format("{:.10g}", *asymptotic) : std::string("n/a"));
  text += fmt::format("{:<22}{}\n", "dispersion", to_string(verdict));
  emit(out, f.format, j, text);
  return kOk;
}

// ----------------------------------------------------------- simulate

struct SimulateFlags {
  ModelFlags model;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string design_path;
  std::vector<std::string> coefficients;
  std::string response_name = "y";
  std::string delimiter = ",";
  Format format = Format::Text;
};

char parse_delimiter(const std::string& d) {
  if (d == "tab" || d == "\\t") return '\t';
  if (d.size() != 1) throw DataError("--delimiter must be a single character or 'tab'");
  return d[0];
}

DelimitedTable read_table_file(const std::string& path, char delim) {
  if (path == "-") return read_delimited(std::cin, delim);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_delimited(in, delim);
}

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  const ModelSpec spec = f.model.spec();
  const Eigen::VectorXd base = base_from_flags(f.model);
  const char delim = parse_delimiter(f.delimiter);
  std::map<std::string, double> coef;
  for (const auto& c : f.coefficients) {
    for (const auto& [k, v] : parse_assignments(c, "--coef")) coef[k] = v;
  }

  DelimitedTable design;
  Eigen::MatrixXd x(0, 0);
  if (!f.design_path.empty()) {
    design = read_table_file(f.design_path, delim);
    if (design.rows.empty()) throw DataError("design file has no rows");
    x.resize(static_cast<Eigen::Index>(design.rows.size()),
             static_cast<Eigen::Index>(design.header.size()));
    for (std::size_t i = 0; i < design.rows.size(); ++i) {
      for (std::size_t j = 0; j < design.header.size(); ++j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_real(
            design.rows[i][j], "design row " + std::to_string(i + 1) + ", column '" +
                                   design.header[j] + "'");
      }
    }
    for (const auto& h : design.header) {
      if (h == f.response_name) throw DataError("design column '" + h + "' clashes with the response name");
    }
  } else if (f.n == 0) {
    throw DataError("--n must be positive");
  }
  for (const auto& [name, value] : coef) {
    if (!design.column(name)) throw DataError("--coef: '" + name + "' is not a design column");
  }
  Eigen::VectorXd theta(base.size() + x.cols());
  theta.head(base.size()) = base;
  for (std::size_t j = 0; j < design.header.size(); ++j) {
    const auto it = coef.find(design.header[j]);
    if (it == coef.end()) throw DataError("--coef: no coefficient for design column '" + design.header[j] + "'");
    theta[base.size() + static_cast<Eigen::Index>(j)] = it->second;
  }

  const std::vector<int> counts = simulate_counts(spec, theta, x, f.n, RngStream(f.seed));

  std::ostringstream csv;
  const std::string sep(1, delim);
  csv << f.response_name;
  for (const auto& h : design.header) csv << sep << h;
  csv << '\n';
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    csv << counts[i];
    sum += counts[i];
    if (!design.header.empty()) {
      for (const auto& v : design.rows[i]) csv << sep << v;
    }
    csv << '\n';
  }
  if (f.out_path.empty()) {
    out << csv.str();
    return kOk;
  }
  {
    std::ofstream file(f.out_path, std::ios::binary);
    if (!file) throw DataError("cannot write '" + f.out_path + "'");
    file << csv.str();
    if (!file) throw DataError("error writing '" + f.out_path + "'");
  }
  Json j = header_json("simulate");
  j["family"] = to_string(spec.family);
  if (spec.family == Family::RPGammaHurdle) j["hurdle_m"] = spec.hurdle_m;
  j["t"] = spec.t;
  j["parameters"] = parameters_json(f.model);
  j["seed"] = f.seed;
  j["rows"] = counts.size();
  j["mean_count"] = sum / static_cast<double>(counts.size());
  j["out"] = f.out_path;
  const std::string text =
      fmt::format("wrote {} rows to {} (family {}, seed {}, mean count {:.6f})\n", counts.size(),
                  f.out_path, to_string(spec.family), f.seed, sum / static_cast<double>(counts.size()));
  emit(out, f.format, j, text);
  return kOk;
}

// ---------------------------------------------------------------- fit

struct FitFlags {
  std::string family;
  double t = 1.0;
  int hurdle_m = 1;
  std::string data;
  std::string response;
  std::vector<std::string> covariates;
  std::optional<int> censor_at;
  std::string censor_column;
  std::string delimiter = ",";
  std::uint64_t seed = 0;
  bool standardize = false;
  std::optional<int> max_iterations;
  Format format = Format::Text;
};

Json estimates_json(const std::vector<ParameterEstimate>& v) {
  Json a = Json::array();
  for (const auto& p : v) a.push_back(Json{{"name", p.name}, {"estimate", p.estimate}, {"se", p.se}});
  return a;
}

int cmd_fit(const FitFlags& f, std::ostream& out) {
  const auto family = parse_family(f.family);
  if (!family) throw DataError("unknown family '" + f.family + "'");
  const ModelSpec spec{*family, f.t, f.hurdle_m};
  DesignRequest req;
  req.response = f.response;
  req.covariates = f.covariates;
  if (!f.censor_column.empty()) req.censor_column = f.censor_column;
  req.censor_at = f.censor_at;
  RegressionDesign design = build_design(read_table_file(f.data, parse_delimiter(f.delimiter)), req);
  if (f.standardize && design.columns() > 0) standardize_columns(design.covariates);

  FitOptions options;
  if (f.max_iterations) {
    options.optimizer.max_simplex_iterations = *f.max_iterations;
    options.optimizer.max_bfgs_iterations = *f.max_iterations;
  }
  const FitResult r = fit(spec, design, options);
  std::size_t censored = 0;
  for (int m : design.censor_at) censored += m > 0 ? 1 : 0;

  Json j = header_json("fit");
  j["family"] = to_string(spec.family);
  if (spec.family == Family::RPGammaHurdle) j["hurdle_m"] = spec.hurdle_m;
  j["t"] = spec.t;
  j["data"] = f.data;
  j["response"] = f.response;
  j["covariates"] = f.covariates;
  j["standardized"] = f.standardize;
  j["observations"] = r.observations;
  j["censored"] = censored;
  j["seed"] = f.seed;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["starts"] = r.starts;
  j["minus_loglik"] = r.minus_loglik;
  j["pmf_underflow"] = r.pmf_underflow;
  j["parameters"] = estimates_json(r.natural);
  j["coefficients"] = estimates_json(r.coefficients);
  const Eigen::VectorXd se = r.standard_errors();
  std::vector<ParameterEstimate> transformed;
  for (Eigen::Index i = 0; i < r.theta.size(); ++i) {
    transformed.push_back({r.parameter_names[static_cast<std::size_t>(i)], r.theta[i],
                           std::isnan(r.covariance(i, i)) ? r.covariance(i, i) : se[i]});
  }
  j["transformed"] = estimates_json(transformed);
  j["covariance_available"] = r.covariance_available;
  j["covariance_pseudo_inverse"] = r.covariance_pseudo_inverse;
  Json cov = Json::array();
  for (Eigen::Index i = 0; i < r.covariance.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < r.covariance.cols(); ++k) row.push_back(r.covariance(i, k));
    cov.push_back(row);
  }
  j["covariance"] = cov;
  j["mean_at_covariate_means"] = r.mean_at_means;
  j["mean_at_zero"] = r.eta0;
  Json effects = Json::array();
  for (const auto& e : r.marginal_effects) {
    effects.push_back(Json{{"name", e.name}, {"effect", e.effect}, {"se", e.se}});
  }
  j["marginal_effects"] = effects;

  std::string text = fmt::format("renewcount {} fit\n", RENEWCOUNT_VERSION);
  auto line = [&](const std::string& k, const std::string& v) {
    text += fmt::format("{:<16}{}\n", k, v);
  };
  line("family", spec.family == Family::RPGammaHurdle
                     ? fmt::format("{} (m = {})", to_string(spec.family), spec.hurdle_m)
                     : std::string(to_string(spec.family)));
  line("data", fmt::format("{} (response {}, {} observations, {} censored)", f.data, f.response,
                           r.observations, censored));
  line("converged", fmt::format("{} (iterations {}, evaluations {}, starts {})",
                                r.converged ? "yes" : "NO", r.iterations, r.evaluations, r.starts));
  line("-loglik", fmt::format("{:.6f}", r.minus_loglik));
  if (r.pmf_underflow) line("warning", "some probabilities underflowed and were floored at 1e-300");
  if (!r.covariance_available) line("warning", "Hessian not positive definite; pseudo-inverse used");
  text += fmt::format("\n{:<24}{:>14}{:>14}\n", "parameter", "estimate", "se");
  for (const auto& p : r.natural) {
    text += fmt::format("{:<24}{:>14}{:>14}\n", p.name, text_number(p.estimate), text_number(p.se));
  }
  if (!r.coefficients.empty()) {
    text += fmt::format("\n{:<24}{:>14}{:>14}{}\n", "covariate", "coefficient", "se",
                        f.standardize ? "  (per standard deviation)" : "");
    for (const auto& p : r.coefficients) {
      text += fmt::format("{:<24}{:>14}{:>14}\n", p.name, text_number(p.estimate), text_number(p.se));
    }
  }
  text += fmt::format("\n{:<24}{}\n", "E(N | x = means)", text_number(r.mean_at_means));
  if (!r.coefficients.empty()) {
    text += fmt::format("{:<24}{}\n", "E(N | x = 0)", text_number(r.eta0));
    text += fmt::format("\nmarginal effects at covariate means\n{:<24}{:>14}{:>14}\n", "covariate",
                        "effect", "se");
    for (const auto& e : r.marginal_effects) {
      text += fmt::format("{:<24}{:>14}{:>14}\n", e.name, text_number(e.effect), text_number(e.se));
    }
  }
  emit(out, f.format, j, text);
  return r.converged ? kOk : kNotConverged;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Count distributions of gamma and inverse Gaussian renewal processes", "renewcount"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RENEWCOUNT_VERSION);

  PmfFlags pmf;
  auto* pmf_cmd = app.add_subcommand("pmf", "tabulate pmf, cdf and count survival");
  add_family_flags(pmf_cmd, pmf.model);
  add_parameter_flags(pmf_cmd, pmf.model);
  pmf_cmd->add_option("--n-max", pmf.n_max, "last count to tabulate")->check(CLI::NonNegativeNumber);
  add_format_flag(pmf_cmd, pmf.format);

  MomentsFlags moments;
  auto* moments_cmd = app.add_subcommand("moments", "mean, variance and dispersion");
  add_family_flags(moments_cmd, moments.model);
  add_parameter_flags(moments_cmd, moments.model);
  add_format_flag(moments_cmd, moments.format);

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "draw a dataset of counts");
  add_family_flags(sim_cmd, sim.model);
  add_parameter_flags(sim_cmd, sim.model);
  sim_cmd->add_option("--n", sim.n, "number of rows when no design is given");
  sim_cmd->add_option("--seed", sim.seed, "random seed");
  sim_cmd->add_option("--out", sim.out_path, "output file (default: standard output)");
  sim_cmd->add_option("--design", sim.design_path, "covariate file; every column enters the link");
  sim_cmd->add_option("--coef", sim.coefficients, "coefficients as name=value,...")->delimiter(';');
  sim_cmd->add_option("--response-name", sim.response_name, "name of the count column");
  sim_cmd->add_option("--delimiter", sim.delimiter, "field delimiter (default ',')");
  add_format_flag(sim_cmd, sim.format);

  FitFlags fitf;
  auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit");
  fit_cmd->add_option("--family", fitf.family, "distribution family")
      ->required()
      ->check(CLI::IsMember(family_names()));
  fit_cmd->add_option("--t", fitf.t, "exposure")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--hurdle-m", fitf.hurdle_m, "index of the modified interarrival")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--data", fitf.data, "dataset file ('-' for standard input)")->required();
  fit_cmd->add_option("--response", fitf.response, "count column")->required();
  fit_cmd->add_option("--covariates", fitf.covariates, "covariate columns")->delimiter(',');
  fit_cmd->add_option("--censor-at", fitf.censor_at, "censoring threshold M (count >= M)");
  fit_cmd->add_option("--censor-column", fitf.censor_column, "0/1 column flagging censored rows");
  fit_cmd->add_option("--delimiter", fitf.delimiter, "field delimiter (default ',')");
  fit_cmd->add_option("--seed", fitf.seed, "recorded in the report");
  fit_cmd->add_option("--max-iterations", fitf.max_iterations, "optimizer iteration cap per stage")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_flag("--standardize", fitf.standardize, "centre and scale covariate columns");
  add_format_flag(fit_cmd, fitf.format);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageOrData;
  }

  try {
    if (*pmf_cmd) return cmd_pmf(pmf, out);
    if (*moments_cmd) return cmd_moments(moments, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*fit_cmd) return cmd_fit(fitf, out);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrData;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrData;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kUsageOrData;
}

}  // namespace renewcount::cli
