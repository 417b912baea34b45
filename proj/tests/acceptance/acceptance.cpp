// One line per acceptance criterion. Usage: acceptance <path-to-nctk-cli>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "nctk/suites.hpp"

using namespace nctk;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int number;
  std::string title;
  std::string suite;
  double budget_seconds;
  // check id → spec tolerance; the row must exist, carry a tolerance no looser, and pass
  std::map<std::string, double> pinned;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

bool report_line(int n, const std::string& title, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << n << ": " << title << " | " << detail << std::endl;
  return ok;
}

bool run_criterion(const Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const VerificationReport rep = run_suite(c.suite, SuiteConfig{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string problems;
  for (const auto& [id, tol] : c.pinned) {
    const CheckRow* row = nullptr;
    for (const CheckRow& r : rep.rows()) {
      if (r.id == id) row = &r;
    }
    if (!row) problems += " missing:" + id;
    else if (row->tolerance > tol) problems += " loose:" + id;
    else if (!row->pass) problems += " " + id + "=" + sci(row->residual) + ">" + sci(row->tolerance);
  }
  for (const CheckRow& r : rep.rows()) {
    if (!r.pass && !c.pinned.count(r.id)) problems += " " + r.id + "=" + sci(r.residual);
  }
  const bool in_time = secs < c.budget_seconds;
  if (!in_time) problems += " runtime";
  std::ostringstream d;
  d << rep.passed() << "/" << rep.rows().size() << " checks, worst residual/tolerance "
    << sci(rep.max_residual_ratio()) << ", " << std::fixed;
  d.precision(1);
  d << secs << " s (budget " << c.budget_seconds << " s)";
  if (!problems.empty()) d << " |" << problems;
  return report_line(c.number, c.title, problems.empty() && rep.all_pass(), d.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool end_to_end(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / ("nctk_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  auto run = [&](const std::string& sub) {
    const std::string cmd = "\"" + cli + "\" verify --all --out \"" + (root / sub).string() + "\" > \"" +
                            (root / (sub + ".log")).string() + "\" 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  };
  const auto t0 = std::chrono::steady_clock::now();
  const int e1 = run("a");
  const int e2 = run("b");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string problems;
  if (e1 != 0 || e2 != 0) problems += " exit codes " + std::to_string(e1) + "," + std::to_string(e2);
  int rows = 0;
  bool identical = false;
  try {
    json a = json::parse(slurp(root / "a" / "report.json"));
    json b = json::parse(slurp(root / "b" / "report.json"));
    for (const json& r : a.at("checks")) {
      ++rows;
      const std::string anchor = r.at("anchor").get<std::string>();
      if (anchor.empty()) problems += " empty-anchor:" + r.at("id").get<std::string>();
    }
    if (!a.at("environment").contains("timestamp")) problems += " no-timestamp";
    a.erase("environment");
    b.erase("environment");
    identical = a.dump() == b.dump() && slurp(root / "a" / "report.csv") == slurp(root / "b" / "report.csv");
    if (!identical) problems += " reports differ";
    if (rows == 0) problems += " no rows";
  } catch (const std::exception& e) {
    problems += std::string(" unreadable report: ") + e.what();
  }
  std::ostringstream d;
  d << "cli verify --all exit " << e1 << "/" << e2 << ", " << rows << " rows with anchors, rerun "
    << (identical ? "byte-identical" : "differs") << " modulo environment, " << std::fixed;
  d.precision(1);
  d << secs << " s for two runs";
  if (!problems.empty()) d << " |" << problems;
  if (problems.empty()) fs::remove_all(root);
  return report_line(8, "end-to-end cli verify and determinism", problems.empty(), d.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <nctk-cli>\n";
    return 2;
  }
  const std::vector<Criterion> criteria{
      {1, "kernel suite", "kernels", 10.0,
       {{"weierstrass.fourier.N1", 1e-8}, {"weierstrass.fourier.N2", 1e-8}, {"weierstrass.fourier.N4", 1e-8},
        {"weierstrass.moment0", 1e-8}, {"weierstrass.moment1", 1e-8}, {"weierstrass.moment2", 1e-8},
        {"weierstrass.pde", 1e-10}}},
      {2, "star suite", "star", 10.0,
       {{"polynomial.closed_values", 1e-10}, {"polynomial.gaussian_route", 1e-10},
        {"polynomial.commutativity", 1e-10}, {"polynomial.associativity", 1e-10}, {"mollified_delta", 1e-7}}},
      {3, "coherent suite", "coherent", 60.0,
       {{"matrix_elements.quadrature.N2", 1e-8}, {"matrix_elements.quadrature.N4", 1e-8},
        {"commutative_reduction", 1e-14}, {"uncertainty.analytic", 1e-12}, {"uncertainty.quadrature", 1e-8},
        {"norm.closed_form", 1e-9}, {"norm.lambda_identity_2d", 1e-9}}},
      {4, "blockframe suite", "blockframe", 10.0,
       {{"random.orthogonality", 1e-9}, {"random.block_form", 1e-9}, {"random.theta_vs_singular_values", 1e-10}}},
      {5, "fock suite", "fock", 30.0,
       {{"commutator_table.n1.K8", 1e-10}, {"commutator_table.n1.K16", 1e-10}, {"commutator_table.n1.K32", 1e-10},
        {"displacement.unitarity", 1e-8}, {"vacuum_norm", 1e-12}}},
      {6, "envrep suite", "envrep", 120.0,
       {{"heisenberg.n1.K32.XX", 1e-9}, {"heisenberg.n1.K32.XP", 1e-9}, {"heisenberg.n1.K32.PP", 1e-9},
        {"heisenberg.n2.K12.XX", 1e-9}, {"heisenberg.n2.K12.XP", 1e-9}, {"heisenberg.n2.K12.PP", 1e-9},
        {"inner_product.momentum_space", 1e-6}, {"vacuum_image.norm", 1e-6}}},
      {7, "dynamics suite", "dynamics", 120.0,
       {{"oscillator.norm_drift", 1e-8}, {"oscillator.energy_drift", 1e-7}, {"theta_sweep.theta_0.01", 2e-2},
        {"theta_sweep.monotone", 1e-12}, {"continuity.free", 1e-5}, {"continuity.harmonic", 1e-5}}},
  };
  int failed = 0;
  for (const Criterion& c : criteria) failed += run_criterion(c) ? 0 : 1;
  failed += end_to_end(argv[1]) ? 0 : 1;
  std::cout << (failed == 0 ? "all 8 criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
