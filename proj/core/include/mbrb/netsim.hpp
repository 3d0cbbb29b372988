#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mbrb/params.hpp"
#include "mbrb/types.hpp"

namespace mbrb {

class SignatureScheme;

enum class Algorithm { bracha, imbs_raynal, sf_klcast, sb_klcast };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view s);

enum class EventKind : std::uint8_t {
  ur_broadcast,
  send,  // Byzantine point-to-point send, outside the ur_broadcast macro
  suppressed,
  received,
  kl_cast,
  kl_deliver,
  mbrb_broadcast,
  mbrb_deliver,
};

std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

inline bool is_network_event(EventKind k) {
  return k == EventKind::ur_broadcast || k == EventKind::send || k == EventKind::suppressed ||
         k == EventKind::received;
}

struct TraceEvent {
  std::uint64_t step = 0;
  EventKind kind = EventKind::received;
  ProcessId process;  // issuer for ur_broadcast/send, recipient for received, owner of local events
  ProcessId peer;     // recipient for send/suppressed, sender for received
  std::uint64_t group = 0;  // identifies the ur_broadcast or send a copy belongs to
  ImpMessage msg;           // network events
  MsgKind object = MsgKind::Msg;  // local kl-cast events: tag of the kl-cast object
  Payload payload;                // local events
  MessageId id;                   // local events; (sn, origin) for mbrb events
};

struct TraceStats {
  std::uint64_t ur_broadcasts = 0;
  std::uint64_t sends = 0;
  std::uint64_t suppressed = 0;
  std::uint64_t received = 0;
};

struct Trace {
  std::vector<TraceEvent> events;
  bool quiescent = false;
  std::uint64_t steps = 0;
  TraceStats stats;
};

struct WorkloadAction {
  ProcessId process;
  std::int64_t sn = 0;
  Payload payload;
  ProcessId origin;  // kl-cast id origin; mbrb ignores it (origin is the caller)
};

struct LocalEvent {
  EventKind kind = EventKind::kl_deliver;
  MsgKind object = MsgKind::Msg;
  Payload payload;
  MessageId id;
};

// Effects produced by a correct process handler, in order.
class Outbox {
 public:
  void broadcast(ImpMessage m) { items.emplace_back(std::move(m)); }
  void emit(EventKind kind, MsgKind object, Payload payload, MessageId id) {
    items.emplace_back(LocalEvent{kind, object, std::move(payload), id});
  }

  std::vector<std::variant<ImpMessage, LocalEvent>> items;
};

class ProcessLogic {
 public:
  virtual ~ProcessLogic() = default;
  virtual void start(const WorkloadAction& action, Outbox& out) = 0;
  virtual void on_receive(const ImpMessage& msg, Outbox& out) = 0;
  // True when receiving msg could not change this process's state or output.
  virtual bool is_inert(const ImpMessage& msg) const = 0;
  virtual void fingerprint(std::string& out) const = 0;
  virtual std::unique_ptr<ProcessLogic> clone() const = 0;
};

class ByzantineContext {
 public:
  virtual ~ByzantineContext() = default;
  virtual ProcessId self() const = 0;
  virtual Int n() const = 0;
  virtual Algorithm algorithm() const = 0;
  virtual void send(ProcessId to, ImpMessage msg) = 0;
  // Signs under the Byzantine process's own identity only.
  virtual Signature sign(const Payload& m, const MessageId& id) = 0;
  virtual bool verify(const Signature& s, const Payload& m, const MessageId& id) const = 0;
  virtual std::mt19937_64& rng() = 0;
};

class ByzantineBehavior {
 public:
  virtual ~ByzantineBehavior() = default;
  virtual std::string_view name() const = 0;
  virtual void start(const WorkloadAction&, ByzantineContext&) {}
  virtual void on_receive(const ImpMessage&, ByzantineContext&) {}
};

// silent | equivocator | quorum-spammer | signature-equivocator
std::unique_ptr<ByzantineBehavior> make_byzantine_behavior(std::string_view name);
bool is_known_behavior(std::string_view name);

struct BroadcastInfo {
  ProcessId sender;
  const ImpMessage& msg;
  std::uint64_t group;
  std::span<const ProcessId> correct;  // all correct processes, ascending
};

using VictimHook = std::function<std::vector<ProcessId>(const BroadcastInfo&, std::mt19937_64&)>;

struct PendingCopy {
  std::uint64_t group = 0;
  ProcessId from;
  ProcessId to;
  ImpMessage msg;
};

// Returns the index of the pending copy to deliver next.
using ReorderHook = std::function<std::size_t(std::span<const PendingCopy>, std::mt19937_64&)>;

struct AdversaryStrategy {
  enum class Variant { none, fixed_victims, random_per_broadcast, rotating, custom_hook };
  Variant variant = Variant::none;
  std::vector<ProcessId> victims;  // fixed_victims
  std::uint64_t seed = 0;
  VictimHook hook;  // custom_hook
};

std::string_view to_string(AdversaryStrategy::Variant v);
AdversaryStrategy::Variant adversary_variant_from_string(std::string_view s);

struct NetworkOptions {
  std::uint64_t max_steps = 10'000'000;
  ReorderHook reorder;
};

class Network {
 public:
  Network(SystemParams sys, std::vector<ProcessId> byzantine, Algorithm algorithm, AdversaryStrategy adversary,
          std::uint64_t seed, NetworkOptions options = {});
  ~Network();
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  void set_correct(ProcessId p, std::unique_ptr<ProcessLogic> logic);
  void set_byzantine(ProcessId p, std::unique_ptr<ByzantineBehavior> behavior);
  void set_signatures(std::shared_ptr<SignatureScheme> scheme);

  bool is_byzantine(ProcessId p) const;
  std::span<const ProcessId> correct() const { return correct_; }
  const SystemParams& sys() const { return sys_; }

  // Macro-operation: one copy per process; the adversary may suppress up to t_m
  // copies to correct recipients when the sender is correct.
  void ur_broadcast(ProcessId sender, ImpMessage msg);
  // Point-to-point send outside the macro (Byzantine senders only).
  void send(ProcessId from, ProcessId to, ImpMessage msg);

  void perform(const WorkloadAction& action);
  // Delivers one pending copy. Returns false when nothing is pending.
  bool step();
  // Runs workload actions interleaved with deliveries until quiescence or max_steps.
  void run(std::span<const WorkloadAction> workload);

  std::span<const PendingCopy> pending() const { return pending_; }
  const Trace& trace() const { return trace_; }
  Trace take_trace() { return std::move(trace_); }
  ProcessLogic* logic(ProcessId p);

 private:
  class Context;
  struct Slot {
    std::unique_ptr<ProcessLogic> logic;
    std::unique_ptr<ByzantineBehavior> behavior;
  };

  Slot& slot(ProcessId p);
  void apply(ProcessId p, Outbox& out);
  void deliver(std::size_t index);
  std::vector<ProcessId> choose_victims(ProcessId sender, const ImpMessage& msg, std::uint64_t group);
  std::size_t pick(std::size_t candidates);

  SystemParams sys_;
  Algorithm algorithm_;
  AdversaryStrategy adversary_;
  NetworkOptions options_;
  std::vector<Slot> slots_;
  std::vector<bool> byzantine_;
  std::vector<ProcessId> correct_;
  std::vector<PendingCopy> pending_;
  std::shared_ptr<SignatureScheme> signatures_;
  std::mt19937_64 sched_rng_;
  std::mt19937_64 adv_rng_;
  std::mt19937_64 byz_rng_;
  std::uint64_t next_group_ = 1;
  std::uint64_t broadcasts_seen_ = 0;
  Trace trace_;
};

}  // namespace mbrb
