#include <gtest/gtest.h>

#include <deque>

#include "mbrb/errors.hpp"
#include "mbrb/mbrb.hpp"
#include "mbrb/scenario.hpp"

using namespace mbrb;

namespace {

std::vector<ImpMessage> sent(const Outbox& out) {
  std::vector<ImpMessage> v;
  for (const auto& i : out.items)
    if (const auto* m = std::get_if<ImpMessage>(&i)) v.push_back(*m);
  return v;
}

std::vector<LocalEvent> events(const Outbox& out, EventKind k) {
  std::vector<LocalEvent> v;
  for (const auto& i : out.items)
    if (const auto* e = std::get_if<LocalEvent>(&i); e && e->kind == k) v.push_back(*e);
  return v;
}

// FIFO all-to-all delivery among correct processes, nothing lost.
struct Cluster {
  std::vector<MbrbProcess> procs;
  std::vector<std::size_t> deliveries;

  // no Byzantine process is present, so c = n
  Cluster(Int n, Int t_b, MbrbAlgorithm algo) {
    const auto g = mbrb_configs(algo, SystemParams::make(n, t_b, 0, n));
    for (int i = 1; i <= n; ++i) procs.emplace_back(ProcessId(i), g);
    deliveries.assign(procs.size(), 0);
  }

  void run(int origin, const Payload& m, Int sn) {
    std::deque<ImpMessage> q;
    Outbox first;
    procs[origin - 1].mbrb_broadcast(m, sn, first);
    for (auto msg : sent(first)) {
      msg.sender = ProcessId(origin);
      q.push_back(msg);
    }
    while (!q.empty()) {
      const auto msg = q.front();
      q.pop_front();
      for (std::size_t i = 0; i < procs.size(); ++i) {
        Outbox o;
        procs[i].on_message(msg, o);
        deliveries[i] += events(o, EventKind::mbrb_deliver).size();
        for (auto next : sent(o)) {
          next.sender = ProcessId(static_cast<int>(i) + 1);
          q.push_back(next);
        }
      }
    }
  }
};

}  // namespace

TEST(MbrbProcess, BroadcastSendsOneInit) {
  MbrbProcess p(ProcessId(1), SystemParams::make(4, 1, 0), MbrbAlgorithm::bracha);
  Outbox o;
  p.mbrb_broadcast("m", 1, o);
  const auto s = sent(o);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].kind, MsgKind::Init);
  EXPECT_EQ(s[0].id, (MessageId{1, ProcessId(1)}));
  EXPECT_EQ(events(o, EventKind::mbrb_broadcast).size(), 1u);
  Outbox again;
  EXPECT_THROW(p.mbrb_broadcast("m2", 1, again), SequenceReuse);
  EXPECT_NO_THROW(p.mbrb_broadcast("m2", 2, again));
}

TEST(MbrbProcess, ConfigsFollowParams) {
  const auto sys = SystemParams::make(8, 1, 1);
  MbrbProcess b(ProcessId(1), sys, MbrbAlgorithm::bracha);
  EXPECT_EQ(b.obj_e().config(), bracha_configs(sys).object("obj_E").config);
  EXPECT_EQ(b.obj_r().config(), bracha_configs(sys).object("obj_R").config);
  EXPECT_THROW(b.obj_w(), ConfigError);
  const auto irsys = SystemParams::make(6, 1, 0);
  MbrbProcess w(ProcessId(1), irsys, MbrbAlgorithm::imbs_raynal);
  EXPECT_EQ(w.obj_w().config(), ir_config(irsys).object("obj_W").config);
  EXPECT_EQ(w.obj_w().tag(), MsgKind::Witness);
}

TEST(MbrbProcess, InitTriggersEchoCastOnce) {
  MbrbProcess p(ProcessId(2), SystemParams::make(4, 1, 0), MbrbAlgorithm::bracha);
  Outbox a, b;
  p.on_message(ImpMessage{MsgKind::Init, "m", MessageId{1, ProcessId(9)}, {}, ProcessId(3)}, a);
  const auto s = sent(a);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].kind, MsgKind::Echo);
  EXPECT_EQ(s[0].id, (MessageId{1, ProcessId(3)}));  // origin is the authenticated sender
  p.on_message(ImpMessage{MsgKind::Init, "m'", MessageId{1, ProcessId(3)}, {}, ProcessId(3)}, b);
  EXPECT_TRUE(sent(b).empty());
  EXPECT_TRUE(p.is_inert(ImpMessage{MsgKind::Init, "x", MessageId{1, {}}, {}, ProcessId(3)}));
  EXPECT_FALSE(p.is_inert(ImpMessage{MsgKind::Init, "x", MessageId{1, {}}, {}, ProcessId(4)}));
}

TEST(MbrbProcess, DistinctOriginsAreIndependent) {
  MbrbProcess p(ProcessId(2), SystemParams::make(4, 1, 0), MbrbAlgorithm::bracha);
  Outbox a, b;
  p.on_message(ImpMessage{MsgKind::Init, "m", MessageId{1, {}}, {}, ProcessId(3)}, a);
  p.on_message(ImpMessage{MsgKind::Init, "m", MessageId{1, {}}, {}, ProcessId(4)}, b);
  EXPECT_EQ(sent(a).size(), 1u);
  EXPECT_EQ(sent(b).size(), 1u);
}

TEST(MbrbProcess, EchoQuorumCastsReadyWithInstanceId) {
  // obj_E = (3,2,single), obj_R = (3,2,single)
  MbrbProcess p(ProcessId(1), SystemParams::make(4, 1, 0), MbrbAlgorithm::bracha);
  const MessageId id{5, ProcessId(3)};
  std::vector<ImpMessage> out;
  for (int q : {2, 3, 4}) {
    Outbox o;
    p.on_message(ImpMessage{MsgKind::Echo, "m", id, {}, ProcessId(q)}, o);
    for (auto& m : sent(o)) out.push_back(m);
  }
  const auto ready = std::count_if(out.begin(), out.end(), [](const ImpMessage& m) { return m.kind == MsgKind::Ready; });
  EXPECT_EQ(ready, 1);
  for (const auto& m : out) EXPECT_EQ(m.id, id);
  EXPECT_EQ(p.obj_e().delivered(id), Payload("m"));
}

TEST(MbrbProcess, ReadyQuorumDeliversOnce) {
  MbrbProcess p(ProcessId(1), SystemParams::make(4, 1, 0), MbrbAlgorithm::bracha);
  const MessageId id{1, ProcessId(2)};
  std::size_t n = 0;
  for (int q : {2, 3, 4, 1}) {
    Outbox o;
    p.on_message(ImpMessage{MsgKind::Ready, "m", id, {}, ProcessId(q)}, o);
    n += events(o, EventKind::mbrb_deliver).size();
  }
  EXPECT_EQ(n, 1u);
  EXPECT_EQ(p.delivered().at(id), "m");
}

TEST(MbrbProcess, WitnessQuorumDelivers) {
  // obj_W = (5,4,multi) at n=6, t_b=1
  MbrbProcess p(ProcessId(1), SystemParams::make(6, 1, 0), MbrbAlgorithm::imbs_raynal);
  const MessageId id{1, ProcessId(2)};
  std::size_t n = 0;
  for (int q = 2; q <= 6; ++q) {
    Outbox o;
    p.on_message(ImpMessage{MsgKind::Witness, "m", id, {}, ProcessId(q)}, o);
    n += events(o, EventKind::mbrb_deliver).size();
  }
  EXPECT_EQ(n, 1u);
}

TEST(MbrbProcess, ForeignKindsIgnored) {
  MbrbProcess p(ProcessId(1), SystemParams::make(6, 1, 0), MbrbAlgorithm::imbs_raynal);
  Outbox o;
  p.on_message(ImpMessage{MsgKind::Echo, "m", MessageId{1, ProcessId(2)}, {}, ProcessId(2)}, o);
  p.on_message(ImpMessage{MsgKind::Ready, "m", MessageId{1, ProcessId(2)}, {}, ProcessId(2)}, o);
  EXPECT_TRUE(o.items.empty());
}

TEST(MbrbCluster, FaultFreeEveryoneDelivers) {
  for (auto algo : {MbrbAlgorithm::bracha, MbrbAlgorithm::imbs_raynal}) {
    Cluster c(6, 1, algo);
    c.run(1, "m", 1);
    c.run(3, "x", 1);
    EXPECT_EQ(c.deliveries, std::vector<std::size_t>(6, 2)) << to_string(algo);
  }
}

TEST(MbrbScenario, ImbsRaynalFaultFreeN6) {
  Scenario s;
  s.n = 6;
  s.t_b = 1;
  s.algorithm = Algorithm::imbs_raynal;
  s.workload = {{ProcessId(2), 1, "m", {}}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = run_to_quiescence(s, seed);
    int n = 0;
    for (const auto& e : t.events) n += e.kind == EventKind::mbrb_deliver;
    EXPECT_EQ(n, 6);
  }
  s.n = 100;
  s.t_b = 10;
  s.t_m = 5;
  EXPECT_THROW(validate(s), ConfigError);
}
