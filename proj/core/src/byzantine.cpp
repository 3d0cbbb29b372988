#include <map>
#include <set>
#include <tuple>

#include "mbrb/errors.hpp"
#include "mbrb/netsim.hpp"

namespace mbrb {

namespace {

Payload conflicting(const Payload& m) { return m + "'"; }

bool low_half(ProcessId p, Int n) { return p.index <= n / 2; }

// Kinds a Byzantine participant emits in reaction to one message.
std::vector<MsgKind> reactions(Algorithm a, MsgKind received) {
  switch (received) {
    case MsgKind::Init:
      if (a == Algorithm::bracha) return {MsgKind::Echo, MsgKind::Ready};
      if (a == Algorithm::imbs_raynal) return {MsgKind::Witness};
      return {};
    case MsgKind::Echo:
    case MsgKind::Ready:
      return a == Algorithm::bracha ? std::vector<MsgKind>{MsgKind::Echo, MsgKind::Ready} : std::vector<MsgKind>{};
    case MsgKind::Witness:
      return a == Algorithm::imbs_raynal ? std::vector<MsgKind>{MsgKind::Witness} : std::vector<MsgKind>{};
    case MsgKind::Msg:
      return a == Algorithm::sf_klcast ? std::vector<MsgKind>{MsgKind::Msg} : std::vector<MsgKind>{};
    case MsgKind::Bundle:
      return a == Algorithm::sb_klcast ? std::vector<MsgKind>{MsgKind::Bundle} : std::vector<MsgKind>{};
  }
  return {};
}

MsgKind origin_kind(Algorithm a) {
  switch (a) {
    case Algorithm::bracha:
    case Algorithm::imbs_raynal: return MsgKind::Init;
    case Algorithm::sf_klcast: return MsgKind::Msg;
    case Algorithm::sb_klcast: return MsgKind::Bundle;
  }
  return MsgKind::Init;
}

MessageId workload_id(const WorkloadAction& a, Algorithm algo, ProcessId self) {
  if (algo == Algorithm::bracha || algo == Algorithm::imbs_raynal) return MessageId{a.sn, self};
  return MessageId{a.sn, a.origin.valid() ? a.origin : self};
}

// The id an imp-message refers to; INIT ids are bound to the authenticated sender.
MessageId instance_of(const ImpMessage& msg) {
  if (msg.kind == MsgKind::Init) return MessageId{msg.id.sn, msg.sender};
  return msg.id;
}

ImpMessage make(MsgKind kind, const Payload& m, const MessageId& id, ByzantineContext& ctx) {
  ImpMessage out{kind, m, id, {}, {}};
  if (kind == MsgKind::Bundle) out.sigs.push_back(ctx.sign(m, id));
  return out;
}

class Silent : public ByzantineBehavior {
 public:
  std::string_view name() const override { return "silent"; }
};

// Sends m to the lower half of the processes and a conflicting payload to the rest.
class Equivocator : public ByzantineBehavior {
 public:
  std::string_view name() const override { return "equivocator"; }

  void start(const WorkloadAction& a, ByzantineContext& ctx) override {
    split(origin_kind(ctx.algorithm()), a.payload, workload_id(a, ctx.algorithm(), ctx.self()), ctx);
  }

  void on_receive(const ImpMessage& msg, ByzantineContext& ctx) override {
    const MessageId id = instance_of(msg);
    for (auto kind : reactions(ctx.algorithm(), msg.kind)) split(kind, msg.payload, id, ctx);
  }

 private:
  void split(MsgKind kind, const Payload& m, const MessageId& id, ByzantineContext& ctx) {
    if (!done_.emplace(kind, id).second) return;
    const Payload other = conflicting(m);
    for (Int i = 1; i <= ctx.n(); ++i) {
      const ProcessId to(static_cast<int>(i));
      if (to == ctx.self()) continue;
      ctx.send(to, make(kind, low_half(to, ctx.n()) ? m : other, id, ctx));
    }
  }

  std::set<std::pair<MsgKind, MessageId>> done_;
};

// Floods every protocol kind with the observed payload plus forged ones.
class QuorumSpammer : public ByzantineBehavior {
 public:
  std::string_view name() const override { return "quorum-spammer"; }

  void start(const WorkloadAction& a, ByzantineContext& ctx) override {
    const MessageId id = workload_id(a, ctx.algorithm(), ctx.self());
    flood(origin_kind(ctx.algorithm()), a.payload, id, ctx);
  }

  void on_receive(const ImpMessage& msg, ByzantineContext& ctx) override {
    const MessageId id = instance_of(msg);
    for (auto kind : reactions(ctx.algorithm(), msg.kind)) flood(kind, msg.payload, id, ctx);
  }

 private:
  void flood(MsgKind kind, const Payload& seen, const MessageId& id, ByzantineContext& ctx) {
    for (const Payload& m : {seen, Payload("spam-a"), Payload("spam-b")}) {
      if (!done_.emplace(kind, id, m).second) continue;
      for (Int i = 1; i <= ctx.n(); ++i) {
        const ProcessId to(static_cast<int>(i));
        if (to != ctx.self()) ctx.send(to, make(kind, m, id, ctx));
      }
    }
  }

  std::set<std::tuple<MsgKind, MessageId, Payload>> done_;
};

// Signs two payloads for one id and shows each half of the system one of them,
// together with every valid signature it has seen for that payload.
class SignatureEquivocator : public ByzantineBehavior {
 public:
  std::string_view name() const override { return "signature-equivocator"; }

  void start(const WorkloadAction& a, ByzantineContext& ctx) override {
    if (ctx.algorithm() != Algorithm::sb_klcast) return fallback_.start(a, ctx);
    act(a.payload, workload_id(a, ctx.algorithm(), ctx.self()), ctx);
  }

  void on_receive(const ImpMessage& msg, ByzantineContext& ctx) override {
    if (ctx.algorithm() != Algorithm::sb_klcast) return fallback_.on_receive(msg, ctx);
    if (msg.kind != MsgKind::Bundle) return;
    auto& known = known_[{msg.id, msg.payload}];
    for (const auto& s : msg.sigs)
      if (ctx.verify(s, msg.payload, msg.id)) known.insert(s);
    act(msg.payload, msg.id, ctx);
  }

 private:
  void act(const Payload& m, const MessageId& id, ByzantineContext& ctx) {
    if (!done_.insert(id).second) return;
    const Payload other = conflicting(m);
    for (const Payload* p : {&m, &other}) {
      auto& known = known_[{id, *p}];
      known.insert(ctx.sign(*p, id));
    }
    for (Int i = 1; i <= ctx.n(); ++i) {
      const ProcessId to(static_cast<int>(i));
      if (to == ctx.self()) continue;
      const Payload& p = low_half(to, ctx.n()) ? m : other;
      const auto& sigs = known_[{id, p}];
      ctx.send(to, ImpMessage{MsgKind::Bundle, p, id, {sigs.begin(), sigs.end()}, {}});
    }
  }

  Equivocator fallback_;
  std::set<MessageId> done_;
  std::map<std::pair<MessageId, Payload>, std::set<Signature>> known_;
};

}  // namespace

bool is_known_behavior(std::string_view name) {
  return name == "silent" || name == "equivocator" || name == "quorum-spammer" || name == "signature-equivocator";
}

std::unique_ptr<ByzantineBehavior> make_byzantine_behavior(std::string_view name) {
  if (name == "silent") return std::make_unique<Silent>();
  if (name == "equivocator") return std::make_unique<Equivocator>();
  if (name == "quorum-spammer") return std::make_unique<QuorumSpammer>();
  if (name == "signature-equivocator") return std::make_unique<SignatureEquivocator>();
  throw ConfigError("unknown Byzantine behavior: " + std::string(name));
}

}  // namespace mbrb
