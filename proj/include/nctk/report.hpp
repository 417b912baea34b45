#pragma once

#include <string>
#include <vector>

#include "nctk/json_io.hpp"

namespace nctk {

/// One check: pass ⇔ residual ≤ tolerance (NaN never passes).
struct CheckRow {
  std::string suite;
  std::string id;
  std::string anchor;  // identity name; "plumbing" for harness checks
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

class VerificationReport {
 public:
  /// Appends a row. A non-negative override replaces the tolerance.
  void add(const std::string& suite, const std::string& id, const std::string& anchor, double residual,
           double tolerance);
  void append(const VerificationReport& other);

  const std::vector<CheckRow>& rows() const { return rows_; }
  int passed() const;
  int failed() const { return static_cast<int>(rows_.size()) - passed(); }
  bool all_pass() const { return failed() == 0 && !rows_.empty(); }
  double max_residual_ratio() const;

  /// Rows and summary counts; reproducible for a fixed configuration.
  json body() const;
  /// body() plus an "environment" object (timestamps, timings, build info).
  json to_json(const json& environment) const;
  /// suite,id,anchor,residual,tolerance,pass
  std::string to_csv() const;

  /// Override applied to every later add(); negative disables it.
  void set_tolerance_override(double tol) { tol_override_ = tol; }

 private:
  std::vector<CheckRow> rows_;
  double tol_override_ = -1.0;
};

/// Shortest round-trip decimal text of a double ("nan", "inf" for non-finite values).
std::string format_double(double v);

}  // namespace nctk
