#include "nctk/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace nctk {

void VerificationReport::add(const std::string& suite, const std::string& id, const std::string& anchor,
                             double residual, double tolerance) {
  CheckRow row;
  row.suite = suite;
  row.id = id;
  row.anchor = anchor.empty() ? "plumbing" : anchor;
  row.residual = residual;
  row.tolerance = tol_override_ >= 0.0 ? tol_override_ : tolerance;
  row.pass = std::isfinite(residual) && residual <= row.tolerance;
  rows_.push_back(std::move(row));
}

void VerificationReport::append(const VerificationReport& other) {
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

int VerificationReport::passed() const {
  int n = 0;
  for (const CheckRow& r : rows_) n += r.pass ? 1 : 0;
  return n;
}

double VerificationReport::max_residual_ratio() const {
  double worst = 0.0;
  for (const CheckRow& r : rows_) {
    if (!std::isfinite(r.residual)) return INFINITY;
    if (r.tolerance > 0.0) worst = std::max(worst, r.residual / r.tolerance);
    else if (r.residual > 0.0) return INFINITY;
  }
  return worst;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {
// JSON has no NaN/Inf; those go out as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}
}  // namespace

json VerificationReport::body() const {
  json rows = json::array();
  json suites = json::object();
  for (const CheckRow& r : rows_) {
    rows.push_back({{"suite", r.suite},
                    {"id", r.id},
                    {"anchor", r.anchor},
                    {"residual", number(r.residual)},
                    {"tolerance", number(r.tolerance)},
                    {"pass", r.pass}});
    json& s = suites[r.suite];
    if (s.is_null()) s = {{"passed", 0}, {"failed", 0}};
    s[r.pass ? "passed" : "failed"] = s[r.pass ? "passed" : "failed"].get<int>() + 1;
  }
  return {{"checks", rows},
          {"summary", {{"total", rows_.size()}, {"passed", passed()}, {"failed", failed()}, {"suites", suites}}}};
}

json VerificationReport::to_json(const json& environment) const {
  json j = body();
  j["environment"] = environment;
  return j;
}

std::string VerificationReport::to_csv() const {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream os;
  os << "suite,id,anchor,residual,tolerance,pass\n";
  for (const CheckRow& r : rows_) {
    os << r.suite << ',' << quote(r.id) << ',' << quote(r.anchor) << ',' << format_double(r.residual) << ','
       << format_double(r.tolerance) << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace nctk
