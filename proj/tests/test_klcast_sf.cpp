#include <gtest/gtest.h>

#include "mbrb/klcast_sf.hpp"

using namespace mbrb;

namespace {

const MessageId kId{1, ProcessId(1)};

std::size_t broadcasts(const Outbox& out) {
  std::size_t n = 0;
  for (const auto& i : out.items) n += std::holds_alternative<ImpMessage>(i);
  return n;
}

std::size_t delivers(const Outbox& out) {
  std::size_t n = 0;
  for (const auto& i : out.items)
    if (const auto* e = std::get_if<LocalEvent>(&i)) n += e->kind == EventKind::kl_deliver;
  return n;
}

}  // namespace

TEST(SfKlcast, CastGuardKeysOnId) {
  SfKlcast s(KlcastConfig::make(3, 2, true), MsgKind::Msg);
  Outbox a, b, c;
  s.kl_cast("m", kId, a);
  EXPECT_EQ(broadcasts(a), 1u);
  s.kl_cast("m2", kId, b);
  EXPECT_EQ(broadcasts(b), 0u);
  s.kl_cast("m", kId, c);
  EXPECT_EQ(broadcasts(c), 0u);
  EXPECT_TRUE(s.has_broadcast("m", kId));
  EXPECT_FALSE(s.has_broadcast("m2", kId));
}

TEST(SfKlcast, SingleBlocksSecondPayload) {
  SfKlcast s(KlcastConfig::make(4, 2, true), MsgKind::Msg);
  Outbox o;
  s.kl_cast("m'", kId, o);
  Outbox a, b;
  s.on_msg(ProcessId(2), "m", kId, a);
  s.on_msg(ProcessId(3), "m", kId, b);
  EXPECT_EQ(broadcasts(a) + broadcasts(b), 0u);
}

TEST(SfKlcast, MultiForwardsSecondPayload) {
  SfKlcast s(KlcastConfig::make(4, 2, false), MsgKind::Msg);
  Outbox o;
  s.kl_cast("m'", kId, o);
  Outbox a, b, c;
  s.on_msg(ProcessId(2), "m", kId, a);
  s.on_msg(ProcessId(3), "m", kId, b);
  EXPECT_EQ(broadcasts(a), 0u);
  EXPECT_EQ(broadcasts(b), 1u);
  s.on_msg(ProcessId(4), "m", kId, c);
  EXPECT_EQ(broadcasts(c), 0u);
}

TEST(SfKlcast, DeliversOnceAtQd) {
  SfKlcast s(KlcastConfig::make(3, 2, true), MsgKind::Msg);
  std::size_t before = 0;
  for (int p = 1; p <= 2; ++p) {
    Outbox o;
    s.on_msg(ProcessId(p), "m", kId, o);
    before += delivers(o);
  }
  EXPECT_EQ(before, 0u);
  Outbox third, fourth;
  EXPECT_EQ(s.on_msg(ProcessId(3), "m", kId, third), Payload("m"));
  EXPECT_EQ(delivers(third), 1u);
  EXPECT_FALSE(s.on_msg(ProcessId(4), "m", kId, fourth));
  EXPECT_EQ(delivers(fourth), 0u);
  EXPECT_EQ(s.delivered(kId), Payload("m"));
}

TEST(SfKlcast, DuplicateSenderIgnored) {
  SfKlcast s(KlcastConfig::make(2, 1, true), MsgKind::Msg);
  Outbox a, b;
  s.on_msg(ProcessId(2), "m", kId, a);
  EXPECT_EQ(broadcasts(a), 1u);
  s.on_msg(ProcessId(2), "m", kId, b);
  EXPECT_TRUE(b.items.empty());
  EXPECT_EQ(s.sender_count("m", kId), 1u);
  EXPECT_TRUE(s.is_inert(ImpMessage{}.sender, "m", kId) == false);
  EXPECT_TRUE(s.is_inert(ProcessId(2), "m", kId));
}

TEST(SfKlcast, PayloadCountsAreIndependent) {
  SfKlcast s(KlcastConfig::make(2, 2, false), MsgKind::Msg);
  Outbox o;
  s.on_msg(ProcessId(4), "a", kId, o);
  s.on_msg(ProcessId(4), "b", kId, o);
  s.on_msg(ProcessId(2), "b", kId, o);
  EXPECT_EQ(s.sender_count("a", kId), 1u);
  EXPECT_EQ(s.sender_count("b", kId), 2u);
  EXPECT_EQ(s.delivered(kId), Payload("b"));
}

// Delivery does not gate forwarding.
TEST(SfKlcast, ForwardsAfterDelivery) {
  SfKlcast s(KlcastConfig::make(3, 2, false), MsgKind::Msg);
  for (int p = 1; p <= 3; ++p) {
    Outbox o;
    s.on_msg(ProcessId(p), "m", kId, o);
  }
  ASSERT_EQ(s.delivered(kId), Payload("m"));
  Outbox a, b;
  s.on_msg(ProcessId(1), "x", kId, a);
  s.on_msg(ProcessId(2), "x", kId, b);
  EXPECT_EQ(broadcasts(a), 0u);
  EXPECT_EQ(broadcasts(b), 1u);
  EXPECT_EQ(delivers(b), 0u);
  EXPECT_TRUE(s.has_broadcast("x", kId));
}

TEST(SfKlcast, BoundedBroadcastsPerId) {
  for (bool single : {true, false}) {
    SfKlcast s(KlcastConfig::make(3, 1, single), MsgKind::Msg);
    std::size_t total = 0;
    for (int p = 1; p <= 6; ++p)
      for (const char* m : {"a", "b", "c"}) {
        Outbox o;
        s.on_msg(ProcessId(p), m, kId, o);
        total += broadcasts(o);
      }
    EXPECT_EQ(total, single ? 1u : 3u);
  }
}

TEST(SfKlcast, TagAppearsOnWire) {
  SfKlcast s(KlcastConfig::make(3, 2, true), MsgKind::Echo);
  Outbox o;
  s.kl_cast("m", kId, o);
  bool saw = false;
  for (const auto& i : o.items)
    if (const auto* m = std::get_if<ImpMessage>(&i)) {
      saw = true;
      EXPECT_EQ(m->kind, MsgKind::Echo);
    } else {
      EXPECT_EQ(std::get<LocalEvent>(i).kind, EventKind::kl_cast);
    }
  EXPECT_TRUE(saw);
}

TEST(SfKlcast, FingerprintTracksState) {
  SfKlcast a(KlcastConfig::make(3, 2, true), MsgKind::Msg);
  SfKlcast b = a;
  std::string fa, fb;
  a.fingerprint(fa);
  b.fingerprint(fb);
  EXPECT_EQ(fa, fb);
  Outbox o;
  b.on_msg(ProcessId(2), "m", kId, o);
  fb.clear();
  b.fingerprint(fb);
  EXPECT_NE(fa, fb);
}
