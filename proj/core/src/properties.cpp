#include "mbrb/properties.hpp"

#include <algorithm>
#include <sstream>

namespace mbrb {

std::size_t CensusEntry::correct_deliverers() const {
  std::set<ProcessId> all;
  for (const auto& [m, ps] : deliverers) all.insert(ps.begin(), ps.end());
  return all.size();
}

bool PropertyVerdicts::all_hold() const {
  return std::all_of(records.begin(), records.end(), [](const auto& r) { return !r.applicable || r.holds; });
}

const PropertyRecord* PropertyVerdicts::find(std::string_view name) const {
  for (const auto& r : records)
    if (r.name == name) return &r;
  return nullptr;
}

std::vector<const PropertyRecord*> PropertyVerdicts::failures() const {
  std::vector<const PropertyRecord*> out;
  for (const auto& r : records)
    if (r.applicable && !r.holds) out.push_back(&r);
  return out;
}

void PropertyVerdicts::append(PropertyVerdicts other, const std::string& prefix) {
  for (auto& r : other.records) {
    r.name = prefix + r.name;
    records.push_back(std::move(r));
  }
}

namespace {

struct Checker {
  PropertyRecord rec;

  explicit Checker(std::string_view name, bool applicable = true) {
    rec.name = std::string(name);
    rec.applicable = applicable;
  }
  void fail(const TraceEvent& e, const std::string& why) {
    if (rec.holds) rec.detail = why;
    rec.holds = false;
    if (rec.witness.size() < 8) rec.witness.push_back(e);
  }
  void fail(const std::vector<const TraceEvent*>& events, const std::string& why) {
    if (rec.holds) rec.detail = why;
    rec.holds = false;
    for (const auto* e : events)
      if (rec.witness.size() < 8) rec.witness.push_back(*e);
    if (rec.witness.empty()) {
      // a missing event is the violation; record a marker so the witness is non-empty
      TraceEvent marker;
      marker.kind = EventKind::kl_deliver;
      rec.witness.push_back(marker);
    }
  }
};

std::string id_str(const MessageId& id) {
  return "(" + std::to_string(id.sn) + ",p" + std::to_string(id.origin.index) + ")";
}

struct LocalView {
  // id -> payload -> correct invokers, with the first invocation event per process
  std::map<MessageId, std::map<Payload, std::map<ProcessId, const TraceEvent*>>> casts;
  // id -> deliveries by correct processes, in trace order
  std::map<MessageId, std::vector<const TraceEvent*>> deliveries;
};

LocalView collect(const Trace& t, const std::set<ProcessId>& correct, EventKind cast_kind, EventKind deliver_kind,
                  std::optional<MsgKind> object) {
  LocalView v;
  for (const auto& e : t.events) {
    if (!correct.count(e.process)) continue;
    if (object && e.object != *object && (e.kind == cast_kind || e.kind == deliver_kind)) continue;
    if (e.kind == cast_kind) v.casts[e.id][e.payload].emplace(e.process, &e);
    else if (e.kind == deliver_kind) v.deliveries[e.id].push_back(&e);
  }
  return v;
}

std::map<MessageId, CensusEntry> census_of(const LocalView& v) {
  std::map<MessageId, CensusEntry> c;
  for (const auto& [id, ds] : v.deliveries)
    for (const auto* e : ds) c[id].deliverers[e->payload].insert(e->process);
  return c;
}

// True when some correct process cast a payload other than m for id.
bool conflicting_cast(const LocalView& v, const MessageId& id, const Payload& m) {
  auto it = v.casts.find(id);
  if (it == v.casts.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](const auto& kv) { return kv.first != m && !kv.second.empty(); });
}

void no_duplication(Checker& ck, const LocalView& v) {
  for (const auto& [id, ds] : v.deliveries) {
    std::map<ProcessId, const TraceEvent*> first;
    for (const auto* e : ds) {
      auto [it, fresh] = first.emplace(e->process, e);
      if (!fresh) ck.fail({it->second, e}, "p" + std::to_string(e->process.index) + " delivered twice for " + id_str(id));
    }
  }
}

void no_duplicity(Checker& ck, const LocalView& v) {
  for (const auto& [id, ds] : v.deliveries) {
    for (const auto* e : ds)
      if (e->payload != ds.front()->payload) {
        ck.fail({ds.front(), e}, "different payloads delivered for " + id_str(id));
        break;
      }
  }
}

}  // namespace

PropertyVerdicts check_klcast_properties(const Trace& t, std::span<const ProcessId> correct_span,
                                         const KlcastGuarantees& g, MsgKind object) {
  const std::set<ProcessId> correct(correct_span.begin(), correct_span.end());
  const LocalView v = collect(t, correct, EventKind::kl_cast, EventKind::kl_deliver, object);
  PropertyVerdicts out;
  out.census = census_of(v);

  Checker validity(property::kl_validity);
  for (const auto& [id, ds] : v.deliveries) {
    for (const auto* e : ds) {
      Int before = 0;
      auto c = v.casts.find(id);
      if (c != v.casts.end()) {
        auto p = c->second.find(e->payload);
        if (p != c->second.end())
          for (const auto& [proc, cast] : p->second)
            if (cast < e) ++before;
      }
      if (before < g.k_prime)
        validity.fail(*e, "delivery of " + e->payload + " " + id_str(id) + " backed by " + std::to_string(before) +
                              " correct casters < k'=" + std::to_string(g.k_prime));
    }
  }

  Checker dup(property::kl_no_duplication);
  no_duplication(dup, v);

  Checker duplicity(property::kl_no_duplicity, g.delta);
  no_duplicity(duplicity, v);

  Checker local(property::kl_local_delivery);
  for (const auto& [id, by_payload] : v.casts) {
    for (const auto& [m, casters] : by_payload) {
      if (static_cast<Int>(casters.size()) < g.k || conflicting_cast(v, id, m)) continue;
      auto d = v.deliveries.find(id);
      const bool ok = d != v.deliveries.end() &&
                      std::any_of(d->second.begin(), d->second.end(), [&](auto* e) { return e->payload == m; });
      if (!ok) {
        std::vector<const TraceEvent*> w;
        for (const auto& [p, e] : casters) w.push_back(e);
        local.fail(w, std::to_string(casters.size()) + " correct casters of " + m + " " + id_str(id) +
                          " but no correct delivery");
      }
    }
  }

  Checker weak(property::kl_weak_global, g.global_mode == GlobalMode::weak);
  Checker strong(property::kl_strong_global, g.global_mode == GlobalMode::strong);
  for (const auto& [id, entry] : out.census) {
    const auto& ds = v.deliveries.at(id);
    if (static_cast<Int>(entry.correct_deliverers()) < g.ell)
      weak.fail({ds.front()}, std::to_string(entry.correct_deliverers()) + " correct deliverers for " + id_str(id) +
                                  " < ell=" + std::to_string(g.ell));
    for (const auto& [m, ps] : entry.deliverers) {
      if (conflicting_cast(v, id, m)) continue;
      if (static_cast<Int>(ps.size()) < g.ell) {
        auto e = std::find_if(ds.begin(), ds.end(), [&](auto* x) { return x->payload == m; });
        strong.fail({*e}, std::to_string(ps.size()) + " correct deliverers of " + m + " " + id_str(id) +
                              " < ell=" + std::to_string(g.ell));
      }
    }
  }

  for (auto* c : {&validity, &dup, &duplicity, &local, &weak, &strong}) out.records.push_back(std::move(c->rec));
  return out;
}

PropertyVerdicts check_mbrb_properties(const Trace& t, std::span<const ProcessId> correct_span, Int ell_mbrb) {
  const std::set<ProcessId> correct(correct_span.begin(), correct_span.end());
  const LocalView v = collect(t, correct, EventKind::mbrb_broadcast, EventKind::mbrb_deliver, std::nullopt);
  PropertyVerdicts out;
  out.census = census_of(v);

  Checker validity(property::mbrb_validity);
  for (const auto& [id, ds] : v.deliveries) {
    if (!correct.count(id.origin)) continue;
    for (const auto* e : ds) {
      bool ok = false;
      auto c = v.casts.find(id);
      if (c != v.casts.end()) {
        auto p = c->second.find(e->payload);
        if (p != c->second.end()) {
          auto b = p->second.find(id.origin);
          ok = b != p->second.end() && b->second < e;
        }
      }
      if (!ok) validity.fail(*e, "delivery of " + e->payload + " " + id_str(id) + " without a matching broadcast");
    }
  }

  Checker dup(property::mbrb_no_duplication);
  no_duplication(dup, v);

  Checker duplicity(property::mbrb_no_duplicity);
  no_duplicity(duplicity, v);

  Checker local(property::mbrb_local_delivery);
  Checker well_formed(property::mbrb_well_formed);
  // earliest broadcast per (process, sn); later ones reuse the sn
  std::map<std::pair<ProcessId, std::int64_t>, const TraceEvent*> first;
  std::vector<const TraceEvent*> reused;
  for (const auto& [id, by_payload] : v.casts)
    for (const auto& [m, casters] : by_payload)
      for (const auto& [p, ev] : casters) {
        const TraceEvent* e = ev;
        auto [it, fresh] = first.emplace(std::make_pair(p, id.sn), e);
        if (fresh) continue;
        if (e < it->second) std::swap(it->second, e);
        reused.push_back(e);
      }
  for (const auto* e : reused) {
    const auto* orig = first.at({e->process, e->id.sn});
    well_formed.fail({orig, e}, "p" + std::to_string(e->process.index) + " reused sn " + std::to_string(e->id.sn));
  }
  for (const auto& [key, e] : first) {
    auto d = v.deliveries.find(e->id);
    const bool ok = d != v.deliveries.end() &&
                    std::any_of(d->second.begin(), d->second.end(), [&](auto* x) { return x->payload == e->payload; });
    if (!ok) local.fail(*e, "no correct process delivered " + e->payload + " " + id_str(e->id));
  }

  Checker global(property::mbrb_global_delivery);
  for (const auto& [id, entry] : out.census) {
    for (const auto& [m, ps] : entry.deliverers) {
      if (static_cast<Int>(ps.size()) < ell_mbrb) {
        const auto& ds = v.deliveries.at(id);
        auto e = std::find_if(ds.begin(), ds.end(), [&](auto* x) { return x->payload == m; });
        global.fail(**e, std::to_string(ps.size()) + " correct deliverers of " + m + " " + id_str(id) +
                             " < ell_MBRB=" + std::to_string(ell_mbrb));
      }
    }
  }

  for (auto* c : {&validity, &dup, &duplicity, &local, &global, &well_formed})
    out.records.push_back(std::move(c->rec));
  return out;
}

PropertyVerdicts check_network_invariants(const Trace& t, std::span<const ProcessId> correct_span, Int t_m) {
  const std::set<ProcessId> correct(correct_span.begin(), correct_span.end());
  struct Group {
    const TraceEvent* issue = nullptr;
    std::map<ProcessId, const TraceEvent*> suppressed;
    std::map<ProcessId, const TraceEvent*> received;
  };
  std::map<std::uint64_t, Group> groups;
  Checker budget(property::net_budget);
  Checker auth(property::net_authentication);
  Checker integrity(property::net_integrity);

  for (const auto& e : t.events) {
    switch (e.kind) {
      case EventKind::ur_broadcast:
      case EventKind::send:
        groups[e.group].issue = &e;
        break;
      case EventKind::suppressed: {
        auto& g = groups[e.group];
        if (!g.issue || g.issue->kind != EventKind::ur_broadcast) {
          integrity.fail(e, "suppression of a copy that was never ur-broadcast");
          break;
        }
        g.suppressed.emplace(e.peer, &e);
        if (correct.count(g.issue->process)) {
          const auto hits = std::count_if(g.suppressed.begin(), g.suppressed.end(),
                                          [&](const auto& kv) { return correct.count(kv.first) != 0; });
          if (hits > t_m)
            budget.fail({g.issue, &e}, "more than t_m=" + std::to_string(t_m) + " copies suppressed");
        }
        break;
      }
      case EventKind::received: {
        auto it = groups.find(e.group);
        if (it == groups.end() || !it->second.issue) {
          auth.fail(e, "copy received from a group that was never issued");
          break;
        }
        auto& g = it->second;
        const auto* issue = g.issue;
        if (issue->process != e.peer || e.msg.sender != issue->process ||
            (issue->kind == EventKind::send && issue->peer != e.process))
          auth.fail({issue, &e}, "received copy attributed to a process that did not send it");
        if (!(e.msg == issue->msg)) integrity.fail({issue, &e}, "received copy differs from the sent message");
        if (g.suppressed.count(e.process)) integrity.fail({issue, &e}, "suppressed copy was received");
        if (!g.received.emplace(e.process, &e).second) integrity.fail({issue, &e}, "copy received twice");
        break;
      }
      default:
        break;
    }
  }
  PropertyVerdicts out;
  for (auto* c : {&budget, &auth, &integrity}) out.records.push_back(std::move(c->rec));
  return out;
}

PropertyVerdicts check_properties(const Trace& t, const Scenario& s, const Expected& expected) {
  const auto correct = s.correct();
  PropertyVerdicts out;
  if (const auto* g = std::get_if<MbrbGuarantee>(&expected)) {
    out = check_mbrb_properties(t, correct, g->ell_mbrb);
    for (const auto& obj : g->objects) {
      if (!obj.assumptions.satisfied()) continue;
      const MsgKind tag = obj.name == "obj_E" ? MsgKind::Echo : obj.name == "obj_R" ? MsgKind::Ready : MsgKind::Witness;
      out.append(check_klcast_properties(t, correct, obj.guarantees, tag), obj.name + "/");
    }
  } else {
    const auto& kg = std::get<KlcastGuarantees>(expected);
    out = check_klcast_properties(t, correct, kg, s.algorithm == Algorithm::sb_klcast ? MsgKind::Bundle : MsgKind::Msg);
  }
  out.append(check_network_invariants(t, correct, s.t_m));
  return out;
}

std::string format_witness(const PropertyRecord& r) {
  std::ostringstream os;
  os << r.detail;
  for (const auto& e : r.witness) {
    os << "\n    [step " << e.step << "] " << to_string(e.kind) << " p" << e.process.index;
    if (is_network_event(e.kind)) {
      if (e.peer.valid()) os << " peer=p" << e.peer.index;
      os << " " << describe(e.msg);
    } else {
      os << " " << to_string(e.object) << "(" << e.payload << ") " << id_str(e.id);
    }
  }
  return os.str();
}

}  // namespace mbrb
