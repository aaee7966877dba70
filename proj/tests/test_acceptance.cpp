#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "grushin/acceptance.hpp"

using namespace grushin;

TEST_CASE("full verification battery") {
  AcceptanceConfig cfg;  // full mode, default seed
  int idx = 0;
  std::vector<CriterionResult> results = run_acceptance(cfg, [&](const CriterionResult& r) {
    ++idx;
    std::printf("[%2d/13] %-30s %s  measured=%.6g threshold=%.6g  (%.1fs)\n        %s\n", idx,
                r.name.c_str(), r.pass ? "PASS" : "FAIL", r.measured, r.threshold, r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
  });
  REQUIRE(results.size() == 13);
  for (const CriterionResult& r : results) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.pass);
  }
}
