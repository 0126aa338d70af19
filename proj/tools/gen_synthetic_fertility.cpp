// Writes a synthetic fertility-style dataset: 1243 women, number of
// children, ten demographic covariates. Counts are drawn from an ERP-gamma
// regression with shape 1.39 and fixed coefficients; the baseline rate is
// set so that the average model mean is 2.314. Output is a pure function of
// the seed.
//
// usage: gen_synthetic_fertility [out.csv] [seed]

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "renewcount/estimation.hpp"

namespace {

constexpr int kRows = 1243;
constexpr double kShape = 1.39;
constexpr double kTargetMean = 2.314;

struct Covariate {
  const char* name;
  double coefficient;
};

constexpr Covariate kCovariates[] = {
    {"german", -0.20},       {"yrs_schooling", 0.034}, {"voc_training", -0.15},
    {"university", -0.16},   {"catholic", 0.22},       {"protestant", 0.11},
    {"muslim", 0.55},        {"rural", 0.059},         {"year_of_birth", 0.0026},
    {"age_at_marriage", -0.031},
};
constexpr int kColumns = sizeof(kCovariates) / sizeof(kCovariates[0]);

double bernoulli(renewcount::RngStream& rng, double p) { return rng.uniform() < p ? 1.0 : 0.0; }

double rounded_normal(renewcount::RngStream& rng, double mean, double sd, double lo, double hi) {
  return std::clamp(std::round(mean + sd * rng.normal()), lo, hi);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_path = argc > 1 ? argv[1] : "-";
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1243;

  Eigen::MatrixXd x(kRows, kColumns);
  const renewcount::RngStream root(seed);
  for (int i = 0; i < kRows; ++i) {
    renewcount::RngStream rng = root.split(1'000'000 + static_cast<std::uint64_t>(i));
    const double german = bernoulli(rng, 0.78);
    const double schooling = rounded_normal(rng, 10.0, 1.8, 7.0, 13.0);
    const double university = schooling >= 12.0 ? bernoulli(rng, 0.35) : 0.0;
    const double vocational = university > 0.0 ? bernoulli(rng, 0.2) : bernoulli(rng, 0.65);
    const double r = rng.uniform();
    const double catholic = r < 0.40 ? 1.0 : 0.0;
    const double protestant = r >= 0.40 && r < 0.74 ? 1.0 : 0.0;
    const double muslim = german > 0.0 ? (r >= 0.74 && r < 0.76 ? 1.0 : 0.0)
                                       : (r >= 0.74 && r < 0.96 ? 1.0 : 0.0);
    const double rural = bernoulli(rng, 0.3);
    const double year_of_birth = std::floor(30.0 + 31.0 * rng.uniform());
    const double age_at_marriage = rounded_normal(rng, 23.0, 3.5, 16.0, 40.0);
    x.row(i) << german, schooling, vocational, university, catholic, protestant, muslim, rural,
        year_of_birth, age_at_marriage;
  }

  Eigen::VectorXd b(kColumns);
  for (int j = 0; j < kColumns; ++j) b[j] = kCovariates[j].coefficient;
  const double mean_scale = (x * b).array().exp().mean();
  const double alpha = kTargetMean * kShape / mean_scale;

  const renewcount::ModelSpec spec{renewcount::Family::ERPGamma, 1.0, 1};
  Eigen::VectorXd theta(2 + kColumns);
  theta << std::log(alpha), std::log(kShape), b;
  const std::vector<int> counts = simulate_counts(spec, theta, x, 0, root);

  std::ofstream file;
  if (out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) {
      std::cerr << "cannot write " << out_path << '\n';
      return 1;
    }
  }
  std::ostream& out = out_path == "-" ? std::cout : file;
  out << "children";
  for (const auto& c : kCovariates) out << ',' << c.name;
  out << '\n';
  for (int i = 0; i < kRows; ++i) {
    out << counts[static_cast<std::size_t>(i)];
    for (int j = 0; j < kColumns; ++j) out << ',' << x(i, j);
    out << '\n';
  }
  return out ? 0 : 1;
}
