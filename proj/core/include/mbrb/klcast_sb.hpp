#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "mbrb/netsim.hpp"
#include "mbrb/params.hpp"
#include "mbrb/types.hpp"

namespace mbrb {

class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;
  virtual Signature sign(ProcessId signer, const Payload& m, const MessageId& id) = 0;
  virtual bool verify(ProcessId claimed, const Payload& m, const MessageId& id, const Signature& s) const = 0;
};

std::uint64_t signature_digest(const Payload& m, const MessageId& id);

// Simulation-grade scheme: a signature is valid iff its signer registered it
// through sign(). Not thread-safe; one instance per simulation.
class RegistrySignatureScheme : public SignatureScheme {
 public:
  Signature sign(ProcessId signer, const Payload& m, const MessageId& id) override;
  bool verify(ProcessId claimed, const Payload& m, const MessageId& id, const Signature& s) const override;

 private:
  std::set<Signature> registry_;
};

class SbKlcast {
 public:
  SbKlcast(ProcessId self, Int q_d, std::shared_ptr<SignatureScheme> scheme);

  // Each returns the payload kl-delivered as a consequence, if any.
  std::optional<Payload> kl_cast(const Payload& m, const MessageId& id, Outbox& out);
  std::optional<Payload> on_bundle(const ImpMessage& msg, Outbox& out);

  bool is_inert(const ImpMessage& msg) const;
  bool has_signed(const MessageId& id) const { return signed_.count(id) != 0; }
  std::optional<Payload> delivered(const MessageId& id) const;
  const std::set<Signature>& sent_sigs(const Payload& m, const MessageId& id) const;
  const std::set<Signature>& known_sigs(const Payload& m, const MessageId& id) const;
  void fingerprint(std::string& out) const;

 private:
  struct Entry {
    std::set<Signature> known;
    std::set<Signature> sent;
  };
  using Key = std::pair<MessageId, Payload>;

  void rebroadcast(const Key& key, Entry& e, Outbox& out);
  std::optional<Payload> check_delivery(const Key& key, Outbox& out);

  ProcessId self_;
  Int q_d_;
  std::shared_ptr<SignatureScheme> scheme_;
  std::set<MessageId> signed_;
  std::map<Key, Entry> entries_;
  std::map<MessageId, Payload> delivered_;
};

class SbKlcastLogic : public ProcessLogic {
 public:
  SbKlcastLogic(ProcessId self, Int q_d, std::shared_ptr<SignatureScheme> scheme)
      : state_(self, q_d, std::move(scheme)) {}

  void start(const WorkloadAction& action, Outbox& out) override;
  void on_receive(const ImpMessage& msg, Outbox& out) override;
  bool is_inert(const ImpMessage& msg) const override;
  void fingerprint(std::string& out) const override { state_.fingerprint(out); }
  std::unique_ptr<ProcessLogic> clone() const override { return std::make_unique<SbKlcastLogic>(*this); }

  const SbKlcast& state() const { return state_; }

 private:
  SbKlcast state_;
};

}  // namespace mbrb
