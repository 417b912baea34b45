#include <doctest.h>

#include <cmath>

#include "nctk/report.hpp"
#include "nctk/suites.hpp"

using namespace nctk;

TEST_CASE("pass iff residual within tolerance") {
  VerificationReport r;
  r.add("s", "a", "x", 1e-9, 1e-9);
  r.add("s", "b", "x", 2e-9, 1e-9);
  r.add("s", "c", "", NAN, 1.0);
  r.add("s", "d", "y", INFINITY, INFINITY);
  CHECK(r.rows()[0].pass);
  CHECK_FALSE(r.rows()[1].pass);
  CHECK_FALSE(r.rows()[2].pass);
  CHECK(r.rows()[2].anchor == "plumbing");
  CHECK_FALSE(r.rows()[3].pass);
  CHECK(r.passed() == 1);
  CHECK(r.failed() == 3);
  CHECK_FALSE(r.all_pass());
  CHECK_FALSE(VerificationReport().all_pass());
}

TEST_CASE("tolerance override") {
  VerificationReport r;
  r.set_tolerance_override(0.0);
  r.add("s", "exact", "x", 0.0, 1.0);
  r.add("s", "inexact", "x", 1e-17, 1.0);
  CHECK(r.rows()[0].pass);
  CHECK_FALSE(r.rows()[1].pass);
  CHECK(r.rows()[1].tolerance == 0.0);
}

TEST_CASE("serialization") {
  VerificationReport r;
  r.add("s", "id,1", "say \"hi\"", 0.1, 0.5);
  r.add("t", "id2", "z", NAN, 0.5);
  const std::string csv = r.to_csv();
  CHECK(csv == "suite,id,anchor,residual,tolerance,pass\n"
               "s,\"id,1\",\"say \"\"hi\"\"\",0.1,0.5,true\n"
               "t,\"id2\",\"z\",nan,0.5,false\n");
  const json b = r.body();
  CHECK(b["summary"]["total"] == 2);
  CHECK(b["summary"]["suites"]["s"]["passed"] == 1);
  CHECK(b["summary"]["suites"]["t"]["failed"] == 1);
  CHECK(b["checks"][1]["residual"] == "nan");
  const json full = r.to_json({{"timestamp", "now"}});
  CHECK(full["environment"]["timestamp"] == "now");
  CHECK(json::parse(b.dump()) == b);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
}

TEST_CASE("suites are deterministic for a fixed seed") {
  SuiteConfig cfg;
  cfg.blockframe_draws = 50;
  const json a = run_suite("blockframe", cfg).body();
  const json b = run_suite("blockframe", cfg).body();
  CHECK(a.dump() == b.dump());
  cfg.seed += 1;
  CHECK(run_suite("blockframe", cfg).body().dump() != a.dump());
  CHECK_THROWS_AS(run_suite("nope", cfg), Error);
  for (const CheckRow& row : run_suite("blockframe", cfg).rows()) {
    CHECK(!row.anchor.empty());
    CHECK(row.pass);
  }
}
