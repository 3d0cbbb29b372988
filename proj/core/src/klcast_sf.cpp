#include "mbrb/klcast_sf.hpp"

#include <algorithm>

namespace mbrb {

namespace {

void put_int(std::string& out, std::int64_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); }

void put_str(std::string& out, const std::string& s) {
  put_int(out, static_cast<std::int64_t>(s.size()));
  out += s;
}

}  // namespace

void SfKlcast::ur_broadcast(Instance& inst, const Payload& m, const MessageId& id, Outbox& out) {
  inst.entries[m].broadcast = true;
  inst.any_broadcast = true;
  out.broadcast(ImpMessage{tag_, m, id, {}, {}});
}

std::optional<Payload> SfKlcast::kl_cast(const Payload& m, const MessageId& id, Outbox& out) {
  out.emit(EventKind::kl_cast, tag_, m, id);
  auto& inst = instances_[id];
  if (!inst.any_broadcast) ur_broadcast(inst, m, id, out);
  return std::nullopt;
}

std::optional<Payload> SfKlcast::on_msg(ProcessId sender, const Payload& m, const MessageId& id, Outbox& out) {
  auto& inst = instances_[id];
  auto& e = inst.entries[m];
  auto it = std::lower_bound(e.senders.begin(), e.senders.end(), sender);
  if (it != e.senders.end() && *it == sender) return std::nullopt;
  e.senders.insert(it, sender);
  const auto count = static_cast<Int>(e.senders.size());

  if (count >= cfg_.q_f && ((!cfg_.single && !e.broadcast) || !inst.any_broadcast)) ur_broadcast(inst, m, id, out);

  if (count >= cfg_.q_d && !inst.delivered) {
    inst.delivered = m;
    out.emit(EventKind::kl_deliver, tag_, m, id);
    return m;
  }
  return std::nullopt;
}

bool SfKlcast::settled(const Instance& inst, const Entry& e) const {
  return inst.delivered && (cfg_.single ? inst.any_broadcast : e.broadcast);
}

bool SfKlcast::is_inert(ProcessId sender, const Payload& m, const MessageId& id) const {
  auto it = instances_.find(id);
  if (it == instances_.end()) return false;
  const auto& inst = it->second;
  auto e = inst.entries.find(m);
  if (e == inst.entries.end()) return inst.delivered && cfg_.single && inst.any_broadcast;
  if (settled(inst, e->second)) return true;
  return std::binary_search(e->second.senders.begin(), e->second.senders.end(), sender);
}

bool SfKlcast::has_broadcast(const MessageId& id) const {
  auto it = instances_.find(id);
  return it != instances_.end() && it->second.any_broadcast;
}

bool SfKlcast::has_broadcast(const Payload& m, const MessageId& id) const {
  auto it = instances_.find(id);
  if (it == instances_.end()) return false;
  auto e = it->second.entries.find(m);
  return e != it->second.entries.end() && e->second.broadcast;
}

std::optional<Payload> SfKlcast::delivered(const MessageId& id) const {
  auto it = instances_.find(id);
  return it == instances_.end() ? std::nullopt : it->second.delivered;
}

std::size_t SfKlcast::sender_count(const Payload& m, const MessageId& id) const {
  auto it = instances_.find(id);
  if (it == instances_.end()) return 0;
  auto e = it->second.entries.find(m);
  return e == it->second.entries.end() ? 0 : e->second.senders.size();
}

void SfKlcast::fingerprint(std::string& out) const {
  put_int(out, static_cast<std::int64_t>(instances_.size()));
  for (const auto& [id, inst] : instances_) {
    put_int(out, id.sn);
    put_int(out, id.origin.index);
    put_int(out, inst.any_broadcast);
    put_int(out, inst.delivered ? 1 : 0);
    if (inst.delivered) put_str(out, *inst.delivered);
    put_int(out, static_cast<std::int64_t>(inst.entries.size()));
    for (const auto& [m, e] : inst.entries) {
      put_str(out, m);
      put_int(out, e.broadcast);
      // once nothing can change for this entry, the exact senders no longer matter
      if (settled(inst, e)) {
        put_int(out, -1);
        continue;
      }
      put_int(out, static_cast<std::int64_t>(e.senders.size()));
      for (auto p : e.senders) put_int(out, p.index);
    }
  }
}

void SfKlcastLogic::start(const WorkloadAction& action, Outbox& out) {
  state_.kl_cast(action.payload, MessageId{action.sn, action.origin}, out);
}

void SfKlcastLogic::on_receive(const ImpMessage& msg, Outbox& out) {
  if (msg.kind != MsgKind::Msg) return;
  state_.on_msg(msg.sender, msg.payload, msg.id, out);
}

bool SfKlcastLogic::is_inert(const ImpMessage& msg) const {
  return msg.kind != MsgKind::Msg || state_.is_inert(msg.sender, msg.payload, msg.id);
}

}  // namespace mbrb
