#include <gtest/gtest.h>

#include "mbrb/errors.hpp"
#include "mbrb/oracle.hpp"

using namespace mbrb;

namespace {

Scenario bracha(Int n, Int t_m) {
  Scenario s;
  s.n = n;
  s.t_m = t_m;
  s.algorithm = Algorithm::bracha;
  s.workload = {{ProcessId(1), 1, "m", {}}};
  return s;
}

Scenario sf4() {
  Scenario s;
  s.n = 4;
  s.t_b = 1;
  s.algorithm = Algorithm::sf_klcast;
  s.klcast = KlcastConfig::make(3, 2, true);
  s.byzantine = {{ProcessId(4), "silent"}};
  s.workload = {{ProcessId(1), 1, "m", ProcessId(1)}, {ProcessId(2), 1, "m", ProcessId(1)}};
  return s;
}

}  // namespace

TEST(Oracle, BrachaN4TmOne) {
  const auto rep = exhaustive_oracle(bracha(4, 1));
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(rep.budget_ok);
  EXPECT_GT(rep.terminals, 0u);
  ASSERT_TRUE(rep.min_deliverers);
  EXPECT_EQ(*rep.min_deliverers, 3);  // ceil(4 (1 - 1/3))
}

TEST(Oracle, FaultFreeEveryoneDelivers) {
  const auto rep = exhaustive_oracle(bracha(4, 0));
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.min_deliverers, 4);
}

TEST(Oracle, SfTwoCasters) {
  const auto rep = exhaustive_oracle(sf4());
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.menu_size, 6u);  // MSG x {m, forged} x 3 correct recipients
  ASSERT_TRUE(rep.min_deliverers);
  EXPECT_GE(*rep.min_deliverers, 1);
}

// The oracle reaches the branch where exactly ell processes deliver.
TEST(Oracle, FindsCounterexampleToOverclaim) {
  OracleOptions opts;
  opts.claimed_ell = 4;
  const auto rep = exhaustive_oracle(bracha(4, 1), opts);
  EXPECT_FALSE(rep.ok());
  EXPECT_GT(rep.failure_counts.at(std::string(property::mbrb_global_delivery)), 0u);
  EXPECT_FALSE(rep.counterexamples.empty());
  EXPECT_LE(rep.counterexamples.size(), opts.max_counterexamples);
}

TEST(Oracle, ByzantineOriginFullMenu) {
  Scenario s;
  s.n = 4;
  s.t_b = 1;
  s.algorithm = Algorithm::bracha;
  s.byzantine = {{ProcessId(4), "equivocator"}};
  s.workload = {{ProcessId(4), 1, "m", {}}};
  s.forged_payloads = {};
  const auto rep = exhaustive_oracle(s);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.menu_size, 9u);  // {INIT, ECHO, READY} x {m} x 3
  EXPECT_GT(rep.terminals, 1u);
}

TEST(Oracle, EquivocatingInits) {
  Scenario s;
  s.n = 4;
  s.t_b = 1;
  s.algorithm = Algorithm::bracha;
  s.byzantine = {{ProcessId(4), "equivocator"}};
  s.workload = {{ProcessId(4), 1, "m", {}}};
  s.forged_payloads = {"m'"};
  OracleOptions opts;
  opts.menu_kinds = {MsgKind::Init};
  const auto rep = exhaustive_oracle(s, opts);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.menu_size, 6u);
}

TEST(Oracle, ConflictingSfCasts) {
  auto s = sf4();
  s.workload = {{ProcessId(1), 1, "a", ProcessId(1)}, {ProcessId(2), 1, "b", ProcessId(1)},
                {ProcessId(3), 1, "a", ProcessId(1)}};
  s.forged_payloads = {};
  const auto rep = exhaustive_oracle(s);
  EXPECT_TRUE(rep.ok());
}

// The canonical-order reduction reaches the same terminal outcomes as full
// interleaving.
TEST(Oracle, ReductionPreservesOutcomes) {
  Scenario byz;
  byz.n = 4;
  byz.t_b = 1;
  byz.t_m = 0;
  byz.algorithm = Algorithm::bracha;
  byz.byzantine = {{ProcessId(4), "equivocator"}};
  byz.workload = {{ProcessId(4), 1, "m", {}}};
  byz.forged_payloads = {};

  auto sf = sf4();
  sf.forged_payloads = {};
  sf.workload.pop_back();

  Scenario lossy;
  lossy.n = 4;
  lossy.t_m = 1;
  lossy.algorithm = Algorithm::sf_klcast;
  lossy.klcast = KlcastConfig::make(2, 1, true);
  lossy.workload = {{ProcessId(1), 1, "m", ProcessId(1)}};

  for (const auto& s : {bracha(3, 0), byz, sf, lossy}) {
    OracleOptions reduced, full;
    reduced.menu_kinds = full.menu_kinds = {MsgKind::Init};
    full.reduce = false;
    const auto a = exhaustive_oracle(s, reduced);
    const auto b = exhaustive_oracle(s, full);
    EXPECT_TRUE(a.ok());
    EXPECT_TRUE(b.ok());
    EXPECT_EQ(a.census_values, b.census_values);
    EXPECT_LE(a.states, b.states);
  }
}

TEST(Oracle, OverflowReportsCoverage) {
  OracleOptions opts;
  opts.max_branches = 500;
  try {
    exhaustive_oracle(bracha(5, 1), opts);
    FAIL() << "expected overflow";
  } catch (const StateSpaceOverflow& e) {
    EXPECT_EQ(e.states_explored, 500u);
  }
}

TEST(Oracle, RejectsOutOfScope) {
  EXPECT_THROW(exhaustive_oracle(bracha(7, 0)), ConfigError);
  Scenario sb;
  sb.n = 5;
  sb.t_b = 1;
  sb.algorithm = Algorithm::sb_klcast;
  sb.klcast.q_d = 3;
  sb.byzantine = {{ProcessId(5), "silent"}};
  sb.workload = {{ProcessId(1), 1, "m", ProcessId(1)}};
  EXPECT_THROW(exhaustive_oracle(sb), ConfigError);
  auto two = bracha(4, 0);
  two.workload.push_back({ProcessId(2), 1, "x", {}});
  EXPECT_THROW(exhaustive_oracle(two), ConfigError);
}
