#include <doctest.h>

#include "slipt/validation.hpp"

using namespace slipt;

TEST_SUITE("validation") {

TEST_CASE("fault injection: corrupted series resistance trips the cross-model criteria") {
  ValidationOptions opt;
  opt.fault_rsigma_scale = 2.0;  // model side sees R_s doubled, the oracle does not
  opt.criteria = {1, 2, 3, 4};
  const auto results = run_acceptance_battery(opt);
  REQUIRE(results.size() == 4);
  CHECK(!results[0].pass);  // accurate vs Newton oracle disagree
  CHECK(!results[1].pass);  // closed forms drift from the oracle
  CHECK(results[2].pass);   // internal algebra is consistent either way
  CHECK(results[3].pass);   // Lambert identity is unaffected
  CHECK(!all_passed(results));
}

TEST_CASE("healthy subset passes and reports measured tolerances") {
  ValidationOptions opt;
  opt.criteria = {3, 4, 5};
  const auto results = run_acceptance_battery(opt);
  REQUIRE(results.size() == 3);
  for (const auto& r : results) {
    CHECK(r.pass);
    CHECK(r.measured <= r.limit);
    CHECK(!r.detail.empty());
  }
  const Table t = validation_table(results);
  CHECK(t.rows.size() == 3);
}

}  // TEST_SUITE
