#pragma once

// Delimited-text dataset ingestion: header row required, LF or CRLF line
// endings, optional UTF-8 byte-order mark, double-quoted fields with ""
// escapes. Anything that cannot be turned into a valid design is a
// DataError; nothing is silently coerced.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "renewcount/estimation.hpp"

namespace renewcount::cli {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DelimitedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::optional<std::size_t> column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return j;
    }
    return std::nullopt;
  }
};

namespace detail {

inline std::vector<std::string> split_record(const std::string& line, char delim,
                                             std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline DelimitedTable read_delimited(std::istream& in, char delim = ',') {
  DelimitedTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_record(line, delim, line_no);
    for (auto& f : fields) f = detail::trim(f);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j].empty()) {
          throw DataError("header: column " + std::to_string(j + 1) + " has no name");
        }
        for (std::size_t k = 0; k < j; ++k) {
          if (table.header[k] == table.header[j]) {
            throw DataError("header: duplicate column '" + table.header[j] + "'");
          }
        }
      }
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw DataError("dataset is empty (a header row is required)");
  return table;
}

inline double parse_real(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw DataError(where + ": '" + s + "' is not a finite number");
  }
  return v;
}

inline int parse_count(const std::string& s, const std::string& where) {
  const double v = parse_real(s, where);
  if (v < 0.0) throw DataError(where + ": negative count " + s);
  if (v != std::floor(v) || v > 2147483647.0) {
    throw DataError(where + ": '" + s + "' is not a nonnegative integer count");
  }
  return static_cast<int>(v);
}

struct DesignRequest {
  std::string response;
  std::vector<std::string> covariates;
  std::optional<std::string> censor_column;  ///< 0/1 flags
  std::optional<int> censor_at;              ///< threshold M
};

/// Builds a regression design. With a censor column, flagged rows mean
/// "count >= M"; with only a threshold, every count >= M is censored at M.
inline RegressionDesign build_design(const DelimitedTable& table, const DesignRequest& req) {
  auto need = [&](const std::string& name, const char* role) {
    const auto j = table.column(name);
    if (!j) throw DataError(std::string(role) + " column '" + name + "' not found in header");
    return *j;
  };
  if (table.rows.empty()) throw DataError("dataset has a header but no rows");
  const std::size_t resp = need(req.response, "response");
  std::vector<std::size_t> cov;
  for (const auto& name : req.covariates) {
    cov.push_back(need(name, "covariate"));
    if (cov.back() == resp) throw DataError("column '" + name + "' is the response");
  }
  std::optional<std::size_t> censor;
  if (req.censor_column) {
    censor = need(*req.censor_column, "censor");
    if (!req.censor_at) throw DataError("a censor column needs --censor-at M");
  }
  if (req.censor_at && *req.censor_at < 1) throw DataError("--censor-at must be at least 1");

  RegressionDesign d;
  const auto n = table.rows.size();
  d.counts.resize(n);
  d.covariates.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cov.size()));
  d.covariate_names = req.covariates;
  if (req.censor_at) d.censor_at.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    const std::string where = "row " + std::to_string(i + 1);
    d.counts[i] = parse_count(row[resp], where + ", column '" + req.response + "'");
    for (std::size_t j = 0; j < cov.size(); ++j) {
      d.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_real(row[cov[j]], where + ", column '" + req.covariates[j] + "'");
    }
    if (!req.censor_at) continue;
    const int m = *req.censor_at;
    bool flagged = d.counts[i] >= m;
    if (censor) {
      const std::string& f = row[*censor];
      if (f != "0" && f != "1") {
        throw DataError(where + ", column '" + *req.censor_column + "': censor flag must be 0 or 1");
      }
      flagged = f == "1";
      if (flagged && d.counts[i] < m) {
        throw DataError(where + ": censored count " + std::to_string(d.counts[i]) +
                        " is below the threshold " + std::to_string(m));
      }
    }
    if (flagged) d.censor_at[i] = m;
  }
  d.validate();
  return d;
}

/// Centres and scales each column to unit standard deviation; returns the
/// scales used.
inline Eigen::VectorXd standardize_columns(Eigen::MatrixXd& x) {
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(x.cols());
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double m = x.col(j).mean();
    const double sd = n > 1 ? std::sqrt((x.col(j).array() - m).square().sum() / (n - 1.0)) : 0.0;
    if (!(sd > 0.0)) throw DataError("cannot standardize constant column " + std::to_string(j + 1));
    x.col(j) = (x.col(j).array() - m) / sd;
    scales[j] = sd;
  }
  return scales;
}

}  // namespace renewcount::cli
