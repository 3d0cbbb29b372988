#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "mbrb/klcast_sf.hpp"
#include "mbrb/netsim.hpp"
#include "mbrb/params.hpp"

namespace mbrb {

// One process running Bracha-revisited (obj_E, obj_R) or Imbs-Raynal-revisited
// (obj_W). Multiplexes any number of broadcast instances keyed by (sn, origin).
class MbrbProcess {
 public:
  MbrbProcess(ProcessId self, const MbrbGuarantee& g);
  MbrbProcess(ProcessId self, const SystemParams& sys, MbrbAlgorithm algo);

  void mbrb_broadcast(const Payload& m, Int sn, Outbox& out);  // SequenceReuse on reused sn
  void on_message(const ImpMessage& msg, Outbox& out);
  bool is_inert(const ImpMessage& msg) const;

  MbrbAlgorithm algorithm() const { return algo_; }
  ProcessId self() const { return self_; }
  const SfKlcast& obj_e() const;
  const SfKlcast& obj_r() const;
  const SfKlcast& obj_w() const;
  const std::map<MessageId, Payload>& delivered() const { return delivered_; }
  void fingerprint(std::string& out) const;

 private:
  void on_init(ProcessId sender, const Payload& m, Int sn, Outbox& out);
  void on_echo_kldelivered(const Payload& m, const MessageId& id, Outbox& out);
  void on_ready_kldelivered(const Payload& m, const MessageId& id, Outbox& out);
  void on_witness_kldelivered(const Payload& m, const MessageId& id, Outbox& out);
  void deliver(const Payload& m, const MessageId& id, Outbox& out);

  ProcessId self_;
  MbrbAlgorithm algo_;
  SfKlcast first_;   // obj_E or obj_W
  std::optional<SfKlcast> second_;  // obj_R
  std::set<Int> used_sns_;
  std::map<MessageId, Payload> delivered_;
};

class MbrbLogic : public ProcessLogic {
 public:
  MbrbLogic(ProcessId self, const MbrbGuarantee& g) : proc_(self, g) {}

  void start(const WorkloadAction& action, Outbox& out) override;
  void on_receive(const ImpMessage& msg, Outbox& out) override { proc_.on_message(msg, out); }
  bool is_inert(const ImpMessage& msg) const override { return proc_.is_inert(msg); }
  void fingerprint(std::string& out) const override { proc_.fingerprint(out); }
  std::unique_ptr<ProcessLogic> clone() const override { return std::make_unique<MbrbLogic>(*this); }

  const MbrbProcess& process() const { return proc_; }

 private:
  MbrbProcess proc_;
};

}  // namespace mbrb
