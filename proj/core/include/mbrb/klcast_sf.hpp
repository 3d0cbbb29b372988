#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mbrb/netsim.hpp"
#include "mbrb/params.hpp"
#include "mbrb/types.hpp"

namespace mbrb {

// Signature-free kl-cast state of one process. `tag` is the message kind used
// on the wire (MSG standalone, ECHO/READY/WITNESS inside MBRB).
class SfKlcast {
 public:
  SfKlcast(KlcastConfig cfg, MsgKind tag) : cfg_(cfg), tag_(tag) {}

  // Both return the payload kl-delivered as a consequence, if any.
  std::optional<Payload> kl_cast(const Payload& m, const MessageId& id, Outbox& out);
  std::optional<Payload> on_msg(ProcessId sender, const Payload& m, const MessageId& id, Outbox& out);

  bool is_inert(ProcessId sender, const Payload& m, const MessageId& id) const;
  bool has_broadcast(const MessageId& id) const;
  bool has_broadcast(const Payload& m, const MessageId& id) const;
  std::optional<Payload> delivered(const MessageId& id) const;
  std::size_t sender_count(const Payload& m, const MessageId& id) const;

  const KlcastConfig& config() const { return cfg_; }
  MsgKind tag() const { return tag_; }
  void fingerprint(std::string& out) const;

 private:
  struct Entry {
    std::vector<ProcessId> senders;  // sorted, distinct
    bool broadcast = false;
  };
  struct Instance {
    std::map<Payload, Entry> entries;
    bool any_broadcast = false;
    std::optional<Payload> delivered;
  };

  bool settled(const Instance& inst, const Entry& e) const;
  void ur_broadcast(Instance& inst, const Payload& m, const MessageId& id, Outbox& out);

  KlcastConfig cfg_;
  MsgKind tag_;
  std::map<MessageId, Instance> instances_;
};

class SfKlcastLogic : public ProcessLogic {
 public:
  explicit SfKlcastLogic(KlcastConfig cfg) : state_(cfg, MsgKind::Msg) {}

  // id = (action.sn, action.origin)
  void start(const WorkloadAction& action, Outbox& out) override;
  void on_receive(const ImpMessage& msg, Outbox& out) override;
  bool is_inert(const ImpMessage& msg) const override;
  void fingerprint(std::string& out) const override { state_.fingerprint(out); }
  std::unique_ptr<ProcessLogic> clone() const override { return std::make_unique<SfKlcastLogic>(*this); }

  const SfKlcast& state() const { return state_; }

 private:
  SfKlcast state_;
};

}  // namespace mbrb
