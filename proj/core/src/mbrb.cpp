#include "mbrb/mbrb.hpp"

#include "mbrb/errors.hpp"

namespace mbrb {

namespace {

SfKlcast first_object(const MbrbGuarantee& g) {
  if (g.algorithm == MbrbAlgorithm::bracha) return SfKlcast(g.object("obj_E").config, MsgKind::Echo);
  return SfKlcast(g.object("obj_W").config, MsgKind::Witness);
}

}  // namespace

MbrbProcess::MbrbProcess(ProcessId self, const MbrbGuarantee& g)
    : self_(self), algo_(g.algorithm), first_(first_object(g)) {
  if (algo_ == MbrbAlgorithm::bracha) second_.emplace(g.object("obj_R").config, MsgKind::Ready);
}

MbrbProcess::MbrbProcess(ProcessId self, const SystemParams& sys, MbrbAlgorithm algo)
    : MbrbProcess(self, mbrb_configs(algo, sys)) {}

const SfKlcast& MbrbProcess::obj_e() const {
  if (algo_ != MbrbAlgorithm::bracha) throw ConfigError("obj_E exists only in Bracha-revisited");
  return first_;
}

const SfKlcast& MbrbProcess::obj_r() const {
  if (algo_ != MbrbAlgorithm::bracha) throw ConfigError("obj_R exists only in Bracha-revisited");
  return *second_;
}

const SfKlcast& MbrbProcess::obj_w() const {
  if (algo_ != MbrbAlgorithm::imbs_raynal) throw ConfigError("obj_W exists only in Imbs-Raynal-revisited");
  return first_;
}

void MbrbProcess::mbrb_broadcast(const Payload& m, Int sn, Outbox& out) {
  if (!used_sns_.insert(sn).second)
    throw SequenceReuse("process " + std::to_string(self_.index) + " reused sequence number " + std::to_string(sn));
  out.emit(EventKind::mbrb_broadcast, MsgKind::Init, m, MessageId{sn, self_});
  out.broadcast(ImpMessage{MsgKind::Init, m, MessageId{sn, self_}, {}, {}});
}

void MbrbProcess::on_message(const ImpMessage& msg, Outbox& out) {
  switch (msg.kind) {
    case MsgKind::Init:
      on_init(msg.sender, msg.payload, msg.id.sn, out);
      break;
    case MsgKind::Echo:
      if (algo_ != MbrbAlgorithm::bracha) break;
      if (auto d = first_.on_msg(msg.sender, msg.payload, msg.id, out)) on_echo_kldelivered(*d, msg.id, out);
      break;
    case MsgKind::Ready:
      if (algo_ != MbrbAlgorithm::bracha) break;
      if (auto d = second_->on_msg(msg.sender, msg.payload, msg.id, out)) on_ready_kldelivered(*d, msg.id, out);
      break;
    case MsgKind::Witness:
      if (algo_ != MbrbAlgorithm::imbs_raynal) break;
      if (auto d = first_.on_msg(msg.sender, msg.payload, msg.id, out)) on_witness_kldelivered(*d, msg.id, out);
      break;
    default:
      break;
  }
}

void MbrbProcess::on_init(ProcessId sender, const Payload& m, Int sn, Outbox& out) {
  // the instance origin is the authenticated sender, whatever the message claims
  first_.kl_cast(m, MessageId{sn, sender}, out);
}

void MbrbProcess::on_echo_kldelivered(const Payload& m, const MessageId& id, Outbox& out) {
  second_->kl_cast(m, id, out);
}

void MbrbProcess::on_ready_kldelivered(const Payload& m, const MessageId& id, Outbox& out) { deliver(m, id, out); }

void MbrbProcess::on_witness_kldelivered(const Payload& m, const MessageId& id, Outbox& out) {
  deliver(m, id, out);
}

void MbrbProcess::deliver(const Payload& m, const MessageId& id, Outbox& out) {
  if (!delivered_.emplace(id, m).second) return;
  out.emit(EventKind::mbrb_deliver, MsgKind::Init, m, id);
}

bool MbrbProcess::is_inert(const ImpMessage& msg) const {
  switch (msg.kind) {
    case MsgKind::Init:
      return first_.has_broadcast(MessageId{msg.id.sn, msg.sender});
    case MsgKind::Echo:
      return algo_ != MbrbAlgorithm::bracha || first_.is_inert(msg.sender, msg.payload, msg.id);
    case MsgKind::Ready:
      return algo_ != MbrbAlgorithm::bracha || second_->is_inert(msg.sender, msg.payload, msg.id);
    case MsgKind::Witness:
      return algo_ != MbrbAlgorithm::imbs_raynal || first_.is_inert(msg.sender, msg.payload, msg.id);
    default:
      return true;
  }
}

void MbrbProcess::fingerprint(std::string& out) const {
  first_.fingerprint(out);
  if (second_) second_->fingerprint(out);
  for (auto sn : used_sns_) out.append(reinterpret_cast<const char*>(&sn), sizeof sn);
  out += '|';
  for (const auto& [id, m] : delivered_) {
    out.append(reinterpret_cast<const char*>(&id.sn), sizeof id.sn);
    out.append(reinterpret_cast<const char*>(&id.origin.index), sizeof id.origin.index);
    out += m;
    out += '\0';
  }
}

void MbrbLogic::start(const WorkloadAction& action, Outbox& out) {
  proc_.mbrb_broadcast(action.payload, action.sn, out);
}

}  // namespace mbrb
