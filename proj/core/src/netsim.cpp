#include "mbrb/netsim.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "mbrb/errors.hpp"
#include "mbrb/klcast_sb.hpp"

namespace mbrb {

std::string_view to_string(MsgKind k) {
  switch (k) {
    case MsgKind::Msg: return "MSG";
    case MsgKind::Init: return "INIT";
    case MsgKind::Echo: return "ECHO";
    case MsgKind::Ready: return "READY";
    case MsgKind::Witness: return "WITNESS";
    case MsgKind::Bundle: return "BUNDLE";
  }
  return "?";
}

MsgKind msg_kind_from_string(std::string_view s) {
  for (auto k : {MsgKind::Msg, MsgKind::Init, MsgKind::Echo, MsgKind::Ready, MsgKind::Witness, MsgKind::Bundle})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown message kind: " + std::string(s));
}

std::string describe(const ImpMessage& m) {
  std::ostringstream os;
  os << to_string(m.kind) << "(" << m.payload << ", (" << m.id.sn << "," << m.id.origin.index << ")";
  if (m.kind == MsgKind::Bundle) {
    os << ", {";
    for (std::size_t i = 0; i < m.sigs.size(); ++i) os << (i ? "," : "") << "p" << m.sigs[i].signer.index;
    os << "}";
  }
  os << ")";
  return os.str();
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::bracha: return "bracha";
    case Algorithm::imbs_raynal: return "imbs-raynal";
    case Algorithm::sf_klcast: return "sf-klcast";
    case Algorithm::sb_klcast: return "sb-klcast";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view s) {
  if (s == "bracha") return Algorithm::bracha;
  if (s == "imbs-raynal" || s == "ir") return Algorithm::imbs_raynal;
  if (s == "sf-klcast") return Algorithm::sf_klcast;
  if (s == "sb-klcast") return Algorithm::sb_klcast;
  throw ConfigError("unknown algorithm: " + std::string(s));
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::ur_broadcast: return "ur_broadcast";
    case EventKind::send: return "send";
    case EventKind::suppressed: return "suppressed";
    case EventKind::received: return "received";
    case EventKind::kl_cast: return "kl_cast";
    case EventKind::kl_deliver: return "kl_deliver";
    case EventKind::mbrb_broadcast: return "mbrb_broadcast";
    case EventKind::mbrb_deliver: return "mbrb_deliver";
  }
  return "?";
}

EventKind event_kind_from_string(std::string_view s) {
  for (auto k : {EventKind::ur_broadcast, EventKind::send, EventKind::suppressed, EventKind::received,
                 EventKind::kl_cast, EventKind::kl_deliver, EventKind::mbrb_broadcast, EventKind::mbrb_deliver})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown event kind: " + std::string(s));
}

std::string_view to_string(AdversaryStrategy::Variant v) {
  using V = AdversaryStrategy::Variant;
  switch (v) {
    case V::none: return "none";
    case V::fixed_victims: return "fixed-victims";
    case V::random_per_broadcast: return "random-per-broadcast";
    case V::rotating: return "rotating";
    case V::custom_hook: return "custom-hook";
  }
  return "?";
}

AdversaryStrategy::Variant adversary_variant_from_string(std::string_view s) {
  using V = AdversaryStrategy::Variant;
  for (auto v : {V::none, V::fixed_victims, V::random_per_broadcast, V::rotating, V::custom_hook})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown adversary variant: " + std::string(s));
}

class Network::Context : public ByzantineContext {
 public:
  Context(Network& net, ProcessId self) : net_(net), self_(self) {}

  ProcessId self() const override { return self_; }
  Int n() const override { return net_.sys_.n; }
  Algorithm algorithm() const override { return net_.algorithm_; }
  void send(ProcessId to, ImpMessage msg) override { net_.send(self_, to, std::move(msg)); }
  Signature sign(const Payload& m, const MessageId& id) override {
    if (!net_.signatures_) throw ConfigError("no signature scheme configured");
    return net_.signatures_->sign(self_, m, id);
  }
  bool verify(const Signature& s, const Payload& m, const MessageId& id) const override {
    return net_.signatures_ && net_.signatures_->verify(s.signer, m, id, s);
  }
  std::mt19937_64& rng() override { return net_.byz_rng_; }

 private:
  Network& net_;
  ProcessId self_;
};

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::array<std::uint32_t, 2> w{};
  seq.generate(w.begin(), w.end());
  return (std::uint64_t(w[0]) << 32) | w[1];
}

}  // namespace

Network::Network(SystemParams sys, std::vector<ProcessId> byzantine, Algorithm algorithm, AdversaryStrategy adversary,
                 std::uint64_t seed, NetworkOptions options)
    : sys_(sys),
      algorithm_(algorithm),
      adversary_(std::move(adversary)),
      options_(std::move(options)),
      slots_(static_cast<std::size_t>(sys.n)),
      byzantine_(static_cast<std::size_t>(sys.n), false),
      sched_rng_(seed),
      adv_rng_(mix(adversary_.seed, seed)),
      byz_rng_(mix(seed, 0x62797a616e74696eULL)) {
  for (auto p : byzantine) {
    if (p.index < 1 || p.index > sys.n) throw ConfigError("byzantine id out of range");
    byzantine_[p.index - 1] = true;
  }
  for (int i = 1; i <= sys.n; ++i)
    if (!byzantine_[i - 1]) correct_.push_back(ProcessId(i));
}

Network::~Network() = default;

Network::Slot& Network::slot(ProcessId p) {
  if (p.index < 1 || p.index > sys_.n) throw ConfigError("process id out of range: " + std::to_string(p.index));
  return slots_[p.index - 1];
}

void Network::set_correct(ProcessId p, std::unique_ptr<ProcessLogic> logic) {
  if (is_byzantine(p)) throw ConfigError("process " + std::to_string(p.index) + " is Byzantine");
  slot(p).logic = std::move(logic);
}

void Network::set_byzantine(ProcessId p, std::unique_ptr<ByzantineBehavior> behavior) {
  if (!is_byzantine(p)) throw ConfigError("process " + std::to_string(p.index) + " is correct");
  slot(p).behavior = std::move(behavior);
}

void Network::set_signatures(std::shared_ptr<SignatureScheme> scheme) { signatures_ = std::move(scheme); }

bool Network::is_byzantine(ProcessId p) const {
  return p.index >= 1 && p.index <= sys_.n && byzantine_[p.index - 1];
}

ProcessLogic* Network::logic(ProcessId p) { return slot(p).logic.get(); }

std::vector<ProcessId> Network::choose_victims(ProcessId sender, const ImpMessage& msg, std::uint64_t group) {
  using V = AdversaryStrategy::Variant;
  const auto budget = static_cast<std::size_t>(std::min<Int>(sys_.t_m, static_cast<Int>(correct_.size())));
  std::vector<ProcessId> victims;
  switch (adversary_.variant) {
    case V::none:
      break;
    case V::fixed_victims:
      victims = adversary_.victims;
      break;
    case V::random_per_broadcast: {
      std::vector<ProcessId> pool = correct_;
      for (std::size_t i = 0; i < budget; ++i) {
        std::uniform_int_distribution<std::size_t> d(i, pool.size() - 1);
        std::swap(pool[i], pool[d(adv_rng_)]);
      }
      victims.assign(pool.begin(), pool.begin() + budget);
      break;
    }
    case V::rotating: {
      const std::size_t start = broadcasts_seen_ % correct_.size();
      for (std::size_t i = 0; i < budget; ++i) victims.push_back(correct_[(start + i) % correct_.size()]);
      break;
    }
    case V::custom_hook: {
      if (!adversary_.hook) throw ConfigError("custom-hook adversary without a hook");
      victims = adversary_.hook(BroadcastInfo{sender, msg, group, correct_}, adv_rng_);
      break;
    }
  }
  std::sort(victims.begin(), victims.end());
  victims.erase(std::unique(victims.begin(), victims.end()), victims.end());
  if (static_cast<Int>(victims.size()) > sys_.t_m) throw ConfigError("adversary exceeded its t_m budget");
  for (auto v : victims)
    if (v.index < 1 || v.index > sys_.n || is_byzantine(v))
      throw ConfigError("adversary victim must be a correct process");
  return victims;
}

void Network::ur_broadcast(ProcessId sender, ImpMessage msg) {
  msg.sender = sender;
  const std::uint64_t group = next_group_++;
  const std::uint64_t step = trace_.steps;
  trace_.events.push_back(TraceEvent{step, EventKind::ur_broadcast, sender, {}, group, msg, {}, {}, {}});
  ++trace_.stats.ur_broadcasts;
  std::vector<ProcessId> victims;
  if (!is_byzantine(sender)) {
    victims = choose_victims(sender, msg, group);
    ++broadcasts_seen_;
  }
  for (int i = 1; i <= sys_.n; ++i) {
    const ProcessId to(i);
    if (std::binary_search(victims.begin(), victims.end(), to)) {
      trace_.events.push_back(TraceEvent{step, EventKind::suppressed, sender, to, group, msg, {}, {}, {}});
      ++trace_.stats.suppressed;
      continue;
    }
    pending_.push_back(PendingCopy{group, sender, to, msg});
  }
}

void Network::send(ProcessId from, ProcessId to, ImpMessage msg) {
  if (!is_byzantine(from)) throw ConfigError("only Byzantine processes send outside ur_broadcast");
  if (to.index < 1 || to.index > sys_.n) throw ConfigError("send to unknown process");
  msg.sender = from;
  const std::uint64_t group = next_group_++;
  trace_.events.push_back(TraceEvent{trace_.steps, EventKind::send, from, to, group, msg, {}, {}, {}});
  ++trace_.stats.sends;
  pending_.push_back(PendingCopy{group, from, to, std::move(msg)});
}

void Network::apply(ProcessId p, Outbox& out) {
  for (auto& item : out.items) {
    if (auto* m = std::get_if<ImpMessage>(&item)) {
      ur_broadcast(p, std::move(*m));
    } else {
      auto& e = std::get<LocalEvent>(item);
      TraceEvent ev;
      ev.step = trace_.steps;
      ev.kind = e.kind;
      ev.process = p;
      ev.object = e.object;
      ev.payload = std::move(e.payload);
      ev.id = e.id;
      trace_.events.push_back(std::move(ev));
    }
  }
}

void Network::perform(const WorkloadAction& action) {
  auto& s = slot(action.process);
  if (s.behavior) {
    Context ctx(*this, action.process);
    s.behavior->start(action, ctx);
    return;
  }
  if (!s.logic) throw ConfigError("process " + std::to_string(action.process.index) + " has no logic");
  Outbox out;
  s.logic->start(action, out);
  apply(action.process, out);
}

std::size_t Network::pick(std::size_t candidates) {
  std::uniform_int_distribution<std::size_t> d(0, candidates - 1);
  return d(sched_rng_);
}

void Network::deliver(std::size_t index) {
  PendingCopy copy = std::move(pending_[index]);
  pending_[index] = std::move(pending_.back());
  pending_.pop_back();
  ++trace_.steps;
  trace_.events.push_back(
      TraceEvent{trace_.steps, EventKind::received, copy.to, copy.from, copy.group, copy.msg, {}, {}, {}});
  ++trace_.stats.received;
  auto& s = slot(copy.to);
  if (s.behavior) {
    Context ctx(*this, copy.to);
    s.behavior->on_receive(copy.msg, ctx);
  } else if (s.logic) {
    Outbox out;
    s.logic->on_receive(copy.msg, out);
    apply(copy.to, out);
  }
}

bool Network::step() {
  if (pending_.empty()) return false;
  std::size_t i = options_.reorder ? options_.reorder(pending_, sched_rng_) : pick(pending_.size());
  if (i >= pending_.size()) throw ConfigError("reorder hook returned an out-of-range index");
  deliver(i);
  return true;
}

void Network::run(std::span<const WorkloadAction> workload) {
  std::size_t next = 0;
  while (trace_.steps < options_.max_steps) {
    const bool more = next < workload.size();
    if (pending_.empty() && !more) break;
    if (more && (pending_.empty() || pick(pending_.size() + 1) == pending_.size())) {
      perform(workload[next++]);
      continue;
    }
    step();
  }
  trace_.quiescent = pending_.empty() && next == workload.size();
}

}  // namespace mbrb
