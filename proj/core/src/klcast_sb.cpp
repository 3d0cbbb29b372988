#include "mbrb/klcast_sb.hpp"

#include "mbrb/errors.hpp"

namespace mbrb {

std::uint64_t signature_digest(const Payload& m, const MessageId& id) {
  // FNV-1a over payload, sn and origin
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t len = m.size();
  feed(&len, sizeof len);
  feed(m.data(), m.size());
  feed(&id.sn, sizeof id.sn);
  feed(&id.origin.index, sizeof id.origin.index);
  return h;
}

Signature RegistrySignatureScheme::sign(ProcessId signer, const Payload& m, const MessageId& id) {
  Signature s{signer, signature_digest(m, id)};
  registry_.insert(s);
  return s;
}

bool RegistrySignatureScheme::verify(ProcessId claimed, const Payload& m, const MessageId& id,
                                     const Signature& s) const {
  return s.signer == claimed && s.digest == signature_digest(m, id) && registry_.count(s) != 0;
}

SbKlcast::SbKlcast(ProcessId self, Int q_d, std::shared_ptr<SignatureScheme> scheme)
    : self_(self), q_d_(q_d), scheme_(std::move(scheme)) {
  if (!scheme_) throw ConfigError("signature-based kl-cast needs a signature scheme");
  if (q_d_ < 1) throw ConfigError("q_d must be positive");
}

void SbKlcast::rebroadcast(const Key& key, Entry& e, Outbox& out) {
  e.sent = e.known;
  out.broadcast(ImpMessage{MsgKind::Bundle, key.second, key.first, {e.sent.begin(), e.sent.end()}, {}});
}

std::optional<Payload> SbKlcast::check_delivery(const Key& key, Outbox& out) {
  const auto& e = entries_.at(key);
  if (static_cast<Int>(e.sent.size()) < q_d_ || delivered_.count(key.first)) return std::nullopt;
  delivered_.emplace(key.first, key.second);
  out.emit(EventKind::kl_deliver, MsgKind::Bundle, key.second, key.first);
  return key.second;
}

std::optional<Payload> SbKlcast::kl_cast(const Payload& m, const MessageId& id, Outbox& out) {
  out.emit(EventKind::kl_cast, MsgKind::Bundle, m, id);
  if (signed_.count(id)) return std::nullopt;
  signed_.insert(id);
  const Key key{id, m};
  auto& e = entries_[key];
  e.known.insert(scheme_->sign(self_, m, id));
  rebroadcast(key, e, out);
  return check_delivery(key, out);
}

std::optional<Payload> SbKlcast::on_bundle(const ImpMessage& msg, Outbox& out) {
  const Key key{msg.id, msg.payload};
  auto it = entries_.find(key);
  std::set<Signature> fresh;
  for (const auto& s : msg.sigs) {
    if (it != entries_.end() && it->second.sent.count(s)) continue;
    if (scheme_->verify(s.signer, msg.payload, msg.id, s)) fresh.insert(s);
  }
  if (fresh.empty()) return std::nullopt;
  auto& e = entries_[key];
  e.known.insert(fresh.begin(), fresh.end());
  rebroadcast(key, e, out);
  return check_delivery(key, out);
}

bool SbKlcast::is_inert(const ImpMessage& msg) const {
  if (msg.kind != MsgKind::Bundle) return true;
  auto it = entries_.find(Key{msg.id, msg.payload});
  for (const auto& s : msg.sigs) {
    if (it != entries_.end() && it->second.sent.count(s)) continue;
    if (scheme_->verify(s.signer, msg.payload, msg.id, s)) return false;
  }
  return true;
}

std::optional<Payload> SbKlcast::delivered(const MessageId& id) const {
  auto it = delivered_.find(id);
  if (it == delivered_.end()) return std::nullopt;
  return it->second;
}

const std::set<Signature>& SbKlcast::sent_sigs(const Payload& m, const MessageId& id) const {
  static const std::set<Signature> empty;
  auto it = entries_.find(Key{id, m});
  return it == entries_.end() ? empty : it->second.sent;
}

const std::set<Signature>& SbKlcast::known_sigs(const Payload& m, const MessageId& id) const {
  static const std::set<Signature> empty;
  auto it = entries_.find(Key{id, m});
  return it == entries_.end() ? empty : it->second.known;
}

void SbKlcast::fingerprint(std::string& out) const {
  auto put = [&out](std::int64_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
  put(static_cast<std::int64_t>(signed_.size()));
  for (const auto& id : signed_) {
    put(id.sn);
    put(id.origin.index);
  }
  put(static_cast<std::int64_t>(entries_.size()));
  for (const auto& [key, e] : entries_) {
    put(key.first.sn);
    put(key.first.origin.index);
    put(static_cast<std::int64_t>(key.second.size()));
    out += key.second;
    put(static_cast<std::int64_t>(e.sent.size()));
    for (const auto& s : e.sent) {
      put(s.signer.index);
      put(static_cast<std::int64_t>(s.digest));
    }
  }
  put(static_cast<std::int64_t>(delivered_.size()));
  for (const auto& [id, m] : delivered_) {
    put(id.sn);
    put(id.origin.index);
    out += m;
  }
}

void SbKlcastLogic::start(const WorkloadAction& action, Outbox& out) {
  state_.kl_cast(action.payload, MessageId{action.sn, action.origin}, out);
}

void SbKlcastLogic::on_receive(const ImpMessage& msg, Outbox& out) {
  if (msg.kind == MsgKind::Bundle) state_.on_bundle(msg, out);
}

bool SbKlcastLogic::is_inert(const ImpMessage& msg) const { return state_.is_inert(msg); }

}  // namespace mbrb
