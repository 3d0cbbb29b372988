#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "mbrb/errors.hpp"
#include "mbrb/netsim.hpp"
#include "mbrb/properties.hpp"
#include "mbrb/scenario.hpp"

using namespace mbrb;

namespace {

// Broadcasts once on start, records every receipt.
class Recorder : public ProcessLogic {
 public:
  explicit Recorder(std::vector<ImpMessage>* log) : log_(log) {}
  void start(const WorkloadAction& a, Outbox& out) override {
    out.broadcast(ImpMessage{MsgKind::Msg, a.payload, MessageId{a.sn, a.process}, {}, {}});
  }
  void on_receive(const ImpMessage& m, Outbox&) override { log_->push_back(m); }
  bool is_inert(const ImpMessage&) const override { return false; }
  void fingerprint(std::string&) const override {}
  std::unique_ptr<ProcessLogic> clone() const override { return std::make_unique<Recorder>(*this); }

 private:
  std::vector<ImpMessage>* log_;
};

struct Harness {
  std::vector<std::vector<ImpMessage>> logs;
  std::unique_ptr<Network> net;

  Harness(Int n, Int t_m, std::vector<int> byz, AdversaryStrategy adv, std::uint64_t seed = 1) {
    std::vector<ProcessId> b;
    for (int i : byz) b.emplace_back(i);
    const auto sys = SystemParams::make(n, static_cast<Int>(b.size()), t_m, n - static_cast<Int>(b.size()));
    net = std::make_unique<Network>(sys, b, Algorithm::sf_klcast, std::move(adv), seed);
    logs.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 1; i <= n; ++i) {
      if (std::find(byz.begin(), byz.end(), i) != byz.end()) net->set_byzantine(ProcessId(i), make_byzantine_behavior("silent"));
      else net->set_correct(ProcessId(i), std::make_unique<Recorder>(&logs[i]));
    }
  }
};

ImpMessage msg(const std::string& m) { return ImpMessage{MsgKind::Msg, m, MessageId{1, ProcessId(1)}, {}, {}}; }

std::vector<int> receivers(const Harness& h) {
  std::vector<int> out;
  for (std::size_t i = 1; i < h.logs.size(); ++i)
    if (!h.logs[i].empty()) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

TEST(Network, FixedVictimSuppressed) {
  AdversaryStrategy adv;
  adv.variant = AdversaryStrategy::Variant::fixed_victims;
  adv.victims = {ProcessId(3)};
  Harness h(4, 1, {}, adv);
  h.net->ur_broadcast(ProcessId(1), msg("m"));
  while (h.net->step()) {}
  EXPECT_EQ(receivers(h), (std::vector<int>{1, 2, 4}));
  const auto& t = h.net->trace();
  EXPECT_EQ(t.stats.suppressed, 1u);
  const auto it = std::find_if(t.events.begin(), t.events.end(), [](const TraceEvent& e) { return e.kind == EventKind::suppressed; });
  ASSERT_NE(it, t.events.end());
  EXPECT_EQ(it->peer, ProcessId(3));
}

TEST(Network, NoAdversaryDeliversAll) {
  Harness h(4, 0, {}, AdversaryStrategy{});
  h.net->ur_broadcast(ProcessId(2), msg("m"));
  while (h.net->step()) {}
  EXPECT_EQ(receivers(h), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(h.net->trace().stats.received, 4u);
}

TEST(Network, ByzantineSendsBypassBudget) {
  AdversaryStrategy adv;
  adv.variant = AdversaryStrategy::Variant::fixed_victims;
  adv.victims = {ProcessId(1)};
  Harness h(4, 1, {4}, adv);
  h.net->send(ProcessId(4), ProcessId(1), msg("a"));
  h.net->send(ProcessId(4), ProcessId(2), msg("b"));
  h.net->ur_broadcast(ProcessId(4), msg("c"));
  while (h.net->step()) {}
  EXPECT_EQ(h.net->trace().stats.suppressed, 0u);
  ASSERT_EQ(h.logs[1].size(), 2u);
  ASSERT_EQ(h.logs[2].size(), 2u);
  EXPECT_EQ(h.logs[3].size(), 1u);
  EXPECT_THROW(h.net->send(ProcessId(1), ProcessId(2), msg("x")), ConfigError);
}

TEST(Network, EmptyIsQuiescent) {
  Harness h(3, 0, {}, AdversaryStrategy{});
  EXPECT_FALSE(h.net->step());
}

TEST(Network, BudgetEnforced) {
  AdversaryStrategy adv;
  adv.variant = AdversaryStrategy::Variant::fixed_victims;
  adv.victims = {ProcessId(2), ProcessId(3)};
  Harness h(4, 1, {}, adv);
  EXPECT_THROW(h.net->ur_broadcast(ProcessId(1), msg("m")), ConfigError);

  AdversaryStrategy hook;
  hook.variant = AdversaryStrategy::Variant::custom_hook;
  hook.hook = [](const BroadcastInfo&, std::mt19937_64&) { return std::vector<ProcessId>{ProcessId(4)}; };
  Harness byz(4, 1, {4}, hook);
  EXPECT_THROW(byz.net->ur_broadcast(ProcessId(1), msg("m")), ConfigError);
}

TEST(Network, RandomAndRotatingStayWithinBudget) {
  for (auto variant : {AdversaryStrategy::Variant::random_per_broadcast, AdversaryStrategy::Variant::rotating}) {
    AdversaryStrategy adv;
    adv.variant = variant;
    adv.seed = 9;
    Harness h(7, 2, {7}, adv, 5);
    for (int i = 0; i < 50; ++i) h.net->ur_broadcast(ProcessId(1 + i % 6), msg("m" + std::to_string(i)));
    while (h.net->step()) {}
    const auto& t = h.net->trace();
    EXPECT_EQ(t.stats.suppressed, 100u);
    const auto v = check_network_invariants(t, h.net->correct(), 2);
    EXPECT_TRUE(v.all_hold());
  }
}

TEST(Network, ReorderHookChoosesNextCopy) {
  NetworkOptions opts;
  opts.reorder = [](std::span<const PendingCopy> p, std::mt19937_64&) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i].to > p[best].to) best = i;
    return best;
  };
  std::vector<ImpMessage> log;
  std::vector<int> order;
  class Tap : public ProcessLogic {
   public:
    Tap(std::vector<int>* o, int self) : o_(o), self_(self) {}
    void start(const WorkloadAction&, Outbox&) override {}
    void on_receive(const ImpMessage&, Outbox&) override { o_->push_back(self_); }
    bool is_inert(const ImpMessage&) const override { return false; }
    void fingerprint(std::string&) const override {}
    std::unique_ptr<ProcessLogic> clone() const override { return std::make_unique<Tap>(*this); }
    std::vector<int>* o_;
    int self_;
  };
  Network net(SystemParams::make(4, 0, 0), {}, Algorithm::sf_klcast, AdversaryStrategy{}, 3, opts);
  for (int i = 1; i <= 4; ++i) net.set_correct(ProcessId(i), std::make_unique<Tap>(&order, i));
  net.ur_broadcast(ProcessId(1), msg("m"));
  while (net.step()) {}
  EXPECT_EQ(order, (std::vector<int>{4, 3, 2, 1}));
}

namespace {

Scenario bracha8(const std::string& behavior, AdversaryStrategy::Variant v, std::uint64_t seed) {
  Scenario s;
  s.n = 8;
  s.t_b = 1;
  s.t_m = 1;
  s.seed = seed;
  s.algorithm = Algorithm::bracha;
  s.byzantine = {{ProcessId(8), behavior}};
  s.adversary.variant = v;
  if (v == AdversaryStrategy::Variant::fixed_victims) s.adversary.victims = {ProcessId(2)};
  s.workload = {{ProcessId(1), 1, "m", {}}, {ProcessId(8), 1, "b", {}}};
  return s;
}

std::map<std::pair<int, std::string>, int> deliveries(const Trace& t, EventKind kind) {
  std::map<std::pair<int, std::string>, int> out;
  for (const auto& e : t.events)
    if (e.kind == kind) ++out[{e.process.index, e.payload}];
  return out;
}

}  // namespace

TEST(Network, DeterministicPerSeed) {
  const auto s = bracha8("equivocator", AdversaryStrategy::Variant::random_per_broadcast, 42);
  EXPECT_EQ(trace_to_jsonl(run_to_quiescence(s)), trace_to_jsonl(run_to_quiescence(s)));
  EXPECT_NE(trace_to_jsonl(run_to_quiescence(s, 42)), trace_to_jsonl(run_to_quiescence(s, 43)));
}

TEST(Network, FaultFreeOutcomeIndependentOfSeed) {
  Scenario s;
  s.n = 5;
  s.algorithm = Algorithm::sf_klcast;
  s.klcast = KlcastConfig::make(3, 1, true);
  s.workload = {{ProcessId(1), 1, "m", ProcessId(1)}, {ProcessId(3), 2, "x", ProcessId(3)}};
  const auto base = deliveries(run_to_quiescence(s, 1), EventKind::kl_deliver);
  EXPECT_EQ(base.size(), 10u);
  for (std::uint64_t seed = 2; seed < 30; ++seed) EXPECT_EQ(deliveries(run_to_quiescence(s, seed), EventKind::kl_deliver), base);
}

TEST(Network, FaultFreeBrachaAllDeliver) {
  Scenario s;
  s.n = 4;
  s.algorithm = Algorithm::bracha;
  s.workload = {{ProcessId(1), 1, "m", {}}};
  const auto t = run_to_quiescence(s, 7);
  EXPECT_TRUE(t.quiescent);
  EXPECT_EQ(deliveries(t, EventKind::mbrb_deliver).size(), 4u);
}

TEST(Network, EquivocatingOriginNoDuplicity) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto s = bracha8("equivocator", AdversaryStrategy::Variant::random_per_broadcast, seed);
    const auto t = run_to_quiescence(s);
    std::map<int, std::set<std::string>> by_origin;
    for (const auto& e : t.events)
      if (e.kind == EventKind::mbrb_deliver && !s.is_byzantine(e.process)) by_origin[e.id.origin.index].insert(e.payload);
    for (const auto& [origin, payloads] : by_origin) EXPECT_LE(payloads.size(), 1u) << "seed " << seed;
  }
}

TEST(Network, MaxStepsStopsRun) {
  auto s = bracha8("quorum-spammer", AdversaryStrategy::Variant::none, 1);
  s.max_steps = 10;
  const auto t = run_to_quiescence(s);
  EXPECT_FALSE(t.quiescent);
  EXPECT_LE(t.steps, 10u);
}
