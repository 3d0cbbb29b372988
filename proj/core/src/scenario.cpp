#include "mbrb/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mbrb/errors.hpp"
#include "mbrb/klcast_sb.hpp"
#include "mbrb/klcast_sf.hpp"
#include "mbrb/mbrb.hpp"

namespace mbrb {

using nlohmann::json;

SystemParams Scenario::sys() const {
  return SystemParams::make(n, t_b, t_m, n - static_cast<Int>(byzantine.size()));
}

bool Scenario::is_byzantine(ProcessId p) const {
  return std::any_of(byzantine.begin(), byzantine.end(), [p](const auto& b) { return b.id == p; });
}

std::vector<ProcessId> Scenario::correct() const {
  std::vector<ProcessId> out;
  for (int i = 1; i <= n; ++i)
    if (!is_byzantine(ProcessId(i))) out.push_back(ProcessId(i));
  return out;
}

std::vector<ProcessId> Scenario::byzantine_ids() const {
  std::vector<ProcessId> out;
  for (const auto& b : byzantine) out.push_back(b.id);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool is_mbrb(Algorithm a) { return a == Algorithm::bracha || a == Algorithm::imbs_raynal; }

MbrbAlgorithm to_mbrb(Algorithm a) {
  return a == Algorithm::bracha ? MbrbAlgorithm::bracha : MbrbAlgorithm::imbs_raynal;
}

std::string pid(ProcessId p) { return "p" + std::to_string(p.index); }

}  // namespace

void validate(const Scenario& s) {
  const SystemParams sys = s.sys();
  if (static_cast<Int>(s.byzantine.size()) > s.t_b)
    throw ConfigError("Byzantine roster larger than t_b=" + std::to_string(s.t_b));
  std::set<ProcessId> seen;
  for (const auto& b : s.byzantine) {
    if (b.id.index < 1 || b.id.index > s.n) throw ConfigError("Byzantine id out of range: " + pid(b.id));
    if (!seen.insert(b.id).second) throw ConfigError("duplicate Byzantine id: " + pid(b.id));
    if (!is_known_behavior(b.behavior)) throw ConfigError("unknown Byzantine behavior: " + b.behavior);
  }
  using V = AdversaryStrategy::Variant;
  if (s.adversary.variant == V::fixed_victims) {
    std::set<ProcessId> v(s.adversary.victims.begin(), s.adversary.victims.end());
    if (static_cast<Int>(v.size()) > s.t_m)
      throw ConfigError("fixed-victims set larger than t_m=" + std::to_string(s.t_m));
    for (auto p : v)
      if (p.index < 1 || p.index > s.n || s.is_byzantine(p))
        throw ConfigError("victim " + pid(p) + " is not a correct process");
  }
  if (s.adversary.variant == V::custom_hook && !s.adversary.hook)
    throw ConfigError("custom-hook adversary requires a programmatic hook");

  std::set<std::pair<ProcessId, Int>> used;
  for (const auto& a : s.workload) {
    if (a.process.index < 1 || a.process.index > s.n) throw ConfigError("workload process out of range");
    if (a.origin.valid() && (a.origin.index < 1 || a.origin.index > s.n))
      throw ConfigError("workload origin out of range");
    if (is_mbrb(s.algorithm) && !s.is_byzantine(a.process) && !used.emplace(a.process, a.sn).second)
      throw ConfigError(pid(a.process) + " reuses sequence number " + std::to_string(a.sn));
  }

  switch (s.algorithm) {
    case Algorithm::bracha:
    case Algorithm::imbs_raynal:
      try {
        mbrb_configs(to_mbrb(s.algorithm), sys);
      } catch (const AssumptionViolation& e) {
        throw ConfigError(e.what());
      } catch (const DegenerateInput& e) {
        throw ConfigError(e.what());
      }
      break;
    case Algorithm::sf_klcast:
      KlcastConfig::make(s.klcast.q_d, s.klcast.q_f, s.klcast.single);
      break;
    case Algorithm::sb_klcast:
      if (s.klcast.q_d < 1) throw ConfigError("q_d must be positive");
      break;
  }
}

Expected expected_guarantees(const Scenario& s) {
  const SystemParams sys = s.sys();
  try {
    switch (s.algorithm) {
      case Algorithm::bracha:
      case Algorithm::imbs_raynal: return mbrb_configs(to_mbrb(s.algorithm), sys);
      case Algorithm::sf_klcast: return sf_guarantees(sys, s.klcast);
      case Algorithm::sb_klcast: return sb_guarantees(sys, s.klcast.q_d);
    }
  } catch (const AssumptionViolation& e) {
    throw ConfigError(e.what());
  } catch (const DegenerateInput& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown algorithm");
}

std::unique_ptr<ProcessLogic> make_process_logic(const Scenario& s, ProcessId p,
                                                 const std::shared_ptr<SignatureScheme>& scheme) {
  switch (s.algorithm) {
    case Algorithm::bracha:
    case Algorithm::imbs_raynal: return std::make_unique<MbrbLogic>(p, mbrb_configs(to_mbrb(s.algorithm), s.sys()));
    case Algorithm::sf_klcast: return std::make_unique<SfKlcastLogic>(s.klcast);
    case Algorithm::sb_klcast: return std::make_unique<SbKlcastLogic>(p, s.klcast.q_d, scheme);
  }
  throw ConfigError("unknown algorithm");
}

Trace run_to_quiescence(const Scenario& s) { return run_to_quiescence(s, s.seed); }

Trace run_to_quiescence(const Scenario& s, std::uint64_t seed) {
  validate(s);
  NetworkOptions opts;
  opts.max_steps = s.max_steps;
  opts.reorder = s.reorder;
  Network net(s.sys(), s.byzantine_ids(), s.algorithm, s.adversary, seed, opts);
  auto scheme = std::make_shared<RegistrySignatureScheme>();
  net.set_signatures(scheme);
  for (auto p : net.correct()) net.set_correct(p, make_process_logic(s, p, scheme));
  for (const auto& b : s.byzantine) net.set_byzantine(b.id, make_byzantine_behavior(b.behavior));

  std::vector<WorkloadAction> workload = s.workload;
  for (auto& a : workload)
    if (!a.origin.valid()) a.origin = a.process;
  net.run(workload);
  return net.take_trace();
}

// ---- JSON ----

namespace {

ProcessId read_pid(const json& j) { return ProcessId(j.get<int>()); }

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

Scenario from_json(const json& j) {
  Scenario s;
  for (const char* key : {"n", "t_b", "t_m", "algorithm"})
    if (!j.contains(key)) throw ConfigError(std::string("scenario is missing field '") + key + "'");
  s.n = j.at("n").get<Int>();
  s.t_b = j.at("t_b").get<Int>();
  s.t_m = j.at("t_m").get<Int>();
  s.seed = field_or<std::uint64_t>(j, "seed", 0);
  s.max_steps = field_or<std::uint64_t>(j, "max_steps", s.max_steps);
  if (j.contains("byzantine"))
    for (const auto& b : j.at("byzantine"))
      s.byzantine.push_back(ByzantineSpec{read_pid(b.at("id")), field_or<std::string>(b, "behavior", "silent")});
  if (j.contains("adversary")) {
    const auto& a = j.at("adversary");
    s.adversary.variant = adversary_variant_from_string(field_or<std::string>(a, "variant", "none"));
    s.adversary.seed = field_or<std::uint64_t>(a, "seed", 0);
    if (a.contains("victims"))
      for (const auto& v : a.at("victims")) s.adversary.victims.push_back(read_pid(v));
  }
  const auto& alg = j.at("algorithm");
  if (alg.is_string()) {
    s.algorithm = algorithm_from_string(alg.get<std::string>());
  } else {
    s.algorithm = algorithm_from_string(alg.at("name").get<std::string>());
    s.klcast.q_d = field_or<Int>(alg, "q_d", 1);
    s.klcast.q_f = field_or<Int>(alg, "q_f", 1);
    s.klcast.single = field_or<bool>(alg, "single", true);
  }
  if (j.contains("workload"))
    for (const auto& w : j.at("workload")) {
      WorkloadAction a;
      a.process = read_pid(w.at("process"));
      a.sn = w.at("sn").get<std::int64_t>();
      a.payload = w.at("payload").get<std::string>();
      if (w.contains("origin")) a.origin = read_pid(w.at("origin"));
      s.workload.push_back(std::move(a));
    }
  if (j.contains("forged_payloads")) s.forged_payloads = j.at("forged_payloads").get<std::vector<Payload>>();
  return s;
}

json msg_json(const ImpMessage& m) {
  json j{{"kind", std::string(to_string(m.kind))},
         {"payload", m.payload},
         {"sn", m.id.sn},
         {"origin", m.id.origin.index},
         {"sender", m.sender.index}};
  if (m.kind == MsgKind::Bundle) {
    json sigs = json::array();
    for (const auto& s : m.sigs) sigs.push_back({s.signer.index, s.digest});
    j["sigs"] = std::move(sigs);
  }
  return j;
}

ImpMessage msg_from_json(const json& j) {
  ImpMessage m;
  m.kind = msg_kind_from_string(j.at("kind").get<std::string>());
  m.payload = j.at("payload").get<std::string>();
  m.id = MessageId{j.at("sn").get<std::int64_t>(), read_pid(j.at("origin"))};
  m.sender = read_pid(j.at("sender"));
  if (j.contains("sigs"))
    for (const auto& s : j.at("sigs")) m.sigs.push_back(Signature{read_pid(s.at(0)), s.at(1).get<std::uint64_t>()});
  return m;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j{{"n", s.n}, {"t_b", s.t_b}, {"t_m", s.t_m}, {"seed", s.seed}};
  json byz = json::array();
  for (const auto& b : s.byzantine) byz.push_back({{"id", b.id.index}, {"behavior", b.behavior}});
  j["byzantine"] = byz;
  json adv{{"variant", std::string(to_string(s.adversary.variant))}, {"seed", s.adversary.seed}};
  if (!s.adversary.victims.empty()) {
    json v = json::array();
    for (auto p : s.adversary.victims) v.push_back(p.index);
    adv["victims"] = v;
  }
  j["adversary"] = adv;
  if (is_mbrb(s.algorithm)) {
    j["algorithm"] = std::string(to_string(s.algorithm));
  } else {
    json a{{"name", std::string(to_string(s.algorithm))}, {"q_d", s.klcast.q_d}};
    if (s.algorithm == Algorithm::sf_klcast) {
      a["q_f"] = s.klcast.q_f;
      a["single"] = s.klcast.single;
    }
    j["algorithm"] = a;
  }
  json w = json::array();
  for (const auto& a : s.workload) {
    json x{{"process", a.process.index}, {"sn", a.sn}, {"payload", a.payload}};
    if (a.origin.valid()) x["origin"] = a.origin.index;
    w.push_back(x);
  }
  j["workload"] = w;
  j["max_steps"] = s.max_steps;
  j["forged_payloads"] = s.forged_payloads;
  return j.dump(2);
}

std::string trace_to_jsonl(const Trace& t) {
  std::string out;
  for (const auto& e : t.events) {
    json j{{"step", e.step}, {"event", std::string(to_string(e.kind))}, {"process", e.process.index}};
    if (is_network_event(e.kind)) {
      if (e.peer.valid()) j["peer"] = e.peer.index;
      j["group"] = e.group;
      j["msg"] = msg_json(e.msg);
    } else {
      j["object"] = std::string(to_string(e.object));
      j["payload"] = e.payload;
      j["sn"] = e.id.sn;
      j["origin"] = e.id.origin.index;
    }
    out += j.dump();
    out += '\n';
  }
  json summary{{"quiescent", t.quiescent},
               {"steps", t.steps},
               {"ur_broadcasts", t.stats.ur_broadcasts},
               {"sends", t.stats.sends},
               {"suppressed", t.stats.suppressed},
               {"received", t.stats.received}};
  out += json{{"summary", summary}}.dump();
  out += '\n';
  return out;
}

Trace trace_from_jsonl(std::string_view text) {
  Trace t;
  std::istringstream in{std::string(text)};
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (j.contains("summary")) {
        const auto& s = j.at("summary");
        t.quiescent = s.at("quiescent").get<bool>();
        t.steps = s.at("steps").get<std::uint64_t>();
        t.stats.ur_broadcasts = s.at("ur_broadcasts").get<std::uint64_t>();
        t.stats.sends = s.at("sends").get<std::uint64_t>();
        t.stats.suppressed = s.at("suppressed").get<std::uint64_t>();
        t.stats.received = s.at("received").get<std::uint64_t>();
        continue;
      }
      TraceEvent e;
      e.step = j.at("step").get<std::uint64_t>();
      e.kind = event_kind_from_string(j.at("event").get<std::string>());
      e.process = read_pid(j.at("process"));
      if (is_network_event(e.kind)) {
        if (j.contains("peer")) e.peer = read_pid(j.at("peer"));
        e.group = j.at("group").get<std::uint64_t>();
        e.msg = msg_from_json(j.at("msg"));
      } else {
        e.object = msg_kind_from_string(j.at("object").get<std::string>());
        e.payload = j.at("payload").get<std::string>();
        e.id = MessageId{j.at("sn").get<std::int64_t>(), read_pid(j.at("origin"))};
      }
      t.events.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed trace: ") + e.what());
  }
  return t;
}

}  // namespace mbrb
