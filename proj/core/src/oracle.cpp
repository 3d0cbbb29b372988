#include "mbrb/oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

#include <absl/container/flat_hash_set.h>

#include "mbrb/battery.hpp"
#include "mbrb/errors.hpp"
#include "mbrb/klcast_sb.hpp"

namespace mbrb {

namespace {

struct Item {
  bool action = false;
  bool byz = false;  // optional: a Byzantine menu message may never be sent
  int action_index = -1;
  ProcessId to;
  ImpMessage msg;

  auto key() const {
    return std::tie(action, to, msg.kind, msg.payload, msg.sender, msg.id, action_index, byz);
  }
  friend bool operator<(const Item& a, const Item& b) { return a.key() < b.key(); }
};

struct LogEntry {
  EventKind kind;
  ProcessId process;
  MsgKind object;
  Payload payload;
  MessageId id;

  auto key() const { return std::tie(kind, process, object, payload, id); }
  friend bool operator<(const LogEntry& a, const LogEntry& b) { return a.key() < b.key(); }
};

struct Proc {
  std::shared_ptr<const ProcessLogic> logic;  // null for Byzantine processes
  std::shared_ptr<const std::string> fp;
};

struct State {
  std::vector<Proc> procs;
  std::vector<Item> pending;  // sorted
  std::vector<LogEntry> log;  // sorted
  std::vector<Payload> payloads;  // sorted, every payload ever enqueued
};

template <class T>
void sorted_insert(std::vector<T>& v, T x) {
  v.insert(std::upper_bound(v.begin(), v.end(), x), std::move(x));
}

void put(std::string& out, std::int64_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); }

void put(std::string& out, const std::string& s) {
  put(out, static_cast<std::int64_t>(s.size()));
  out += s;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool is_mbrb(Algorithm a) { return a == Algorithm::bracha || a == Algorithm::imbs_raynal; }

class Explorer {
 public:
  Explorer(const Scenario& s, const OracleOptions& opts)
      : s_(s), opts_(opts), expected_(expected_guarantees(s)), correct_(s.correct()) {}

  OracleReport run() {
    State init = initial_state();
    visit(std::move(init));
    while (!stack_.empty()) {
      State st = std::move(stack_.back());
      stack_.pop_back();
      expand(st);
    }
    return rep_;
  }

 private:
  State initial_state() {
    State st;
    st.procs.resize(static_cast<std::size_t>(s_.n));
    auto scheme = std::make_shared<RegistrySignatureScheme>();
    for (auto p : correct_) {
      auto logic = make_process_logic(s_, p, scheme);
      st.procs[p.index - 1] = make_proc(std::move(logic));
    }

    std::set<Payload> payloads(s_.forged_payloads.begin(), s_.forged_payloads.end());
    MessageId instance;
    for (std::size_t i = 0; i < s_.workload.size(); ++i) {
      WorkloadAction a = s_.workload[i];
      if (!a.origin.valid()) a.origin = a.process;
      const MessageId id = is_mbrb(s_.algorithm) ? MessageId{a.sn, a.process} : MessageId{a.sn, a.origin};
      if (i == 0) instance = id;
      if (id != instance) throw ConfigError("the oracle explores a single broadcast instance");
      payloads.insert(a.payload);
      if (s_.is_byzantine(a.process)) continue;  // covered by the Byzantine menu
      actions_.push_back(a);
      Item it;
      it.action = true;
      it.action_index = static_cast<int>(actions_.size() - 1);
      it.to = a.process;
      sorted_insert(st.pending, std::move(it));
    }
    if (s_.workload.empty()) throw ConfigError("the oracle needs a workload");
    if (is_mbrb(s_.algorithm) && s_.workload.size() != 1)
      throw ConfigError("the oracle explores exactly one mbrb_broadcast");

    for (auto b : s_.byzantine_ids()) {
      std::vector<MsgKind> kinds;
      switch (s_.algorithm) {
        case Algorithm::bracha: kinds = {MsgKind::Echo, MsgKind::Ready}; break;
        case Algorithm::imbs_raynal: kinds = {MsgKind::Witness}; break;
        default: kinds = {MsgKind::Msg}; break;
      }
      if (is_mbrb(s_.algorithm) && instance.origin == b) kinds.push_back(MsgKind::Init);
      if (!opts_.menu_kinds.empty())
        std::erase_if(kinds, [&](MsgKind k) {
          return std::find(opts_.menu_kinds.begin(), opts_.menu_kinds.end(), k) == opts_.menu_kinds.end();
        });
      for (auto kind : kinds)
        for (const auto& m : payloads)
          for (auto to : correct_) {
            Item it;
            it.byz = true;
            it.to = to;
            it.msg = ImpMessage{kind, m, instance, {}, b};
            sorted_insert(st.pending, std::move(it));
            ++rep_.menu_size;
          }
    }
    st.payloads.assign(payloads.begin(), payloads.end());
    // the initial payload set counts every payload the run can ever carry
    if (rep_.menu_size == 0) {
      std::set<Payload> used;
      for (const auto& a : actions_) used.insert(a.payload);
      st.payloads.assign(used.begin(), used.end());
    }
    return st;
  }

  static Proc make_proc(std::unique_ptr<ProcessLogic> logic) {
    auto fp = std::make_shared<std::string>();
    logic->fingerprint(*fp);
    return Proc{std::shared_ptr<const ProcessLogic>(std::move(logic)), std::move(fp)};
  }

  std::pair<std::uint64_t, std::uint64_t> key(const State& st) {
    buf_.clear();
    for (const auto& p : st.procs) {
      if (p.fp) put(buf_, *p.fp);
      else put(buf_, -1);
    }
    put(buf_, static_cast<std::int64_t>(st.pending.size()));
    for (const auto& it : st.pending) {
      put(buf_, it.action ? 1 : 0);
      put(buf_, it.byz ? 1 : 0);
      put(buf_, it.action_index);
      put(buf_, it.to.index);
      put(buf_, static_cast<std::int64_t>(it.msg.kind));
      put(buf_, it.msg.payload);
      put(buf_, it.msg.sender.index);
      put(buf_, it.msg.id.sn);
      put(buf_, it.msg.id.origin.index);
    }
    for (const auto& e : st.log) {
      put(buf_, static_cast<std::int64_t>(e.kind));
      put(buf_, e.process.index);
      put(buf_, e.payload);
    }
    for (const auto& m : st.payloads) put(buf_, m);
    return {std::hash<std::string>{}(buf_), fnv1a(buf_)};
  }

  void visit(State&& st) {
    ++rep_.transitions;
    if (!visited_.insert(key(st)).second) return;
    ++rep_.states;
    if (rep_.states > opts_.max_branches)
      throw StateSpaceOverflow("state space exceeds " + std::to_string(opts_.max_branches) + " states (" +
                                   std::to_string(rep_.states - 1) + " explored, " +
                                   std::to_string(rep_.terminals) + " terminal)",
                               rep_.states - 1, rep_.terminals);
    const bool terminal = std::none_of(st.pending.begin(), st.pending.end(), [](const Item& i) { return !i.byz; });
    if (terminal) evaluate(st);
    if (!st.pending.empty()) stack_.push_back(std::move(st));
  }

  void evaluate(const State& st) {
    ++rep_.terminals;
    Trace t;
    t.quiescent = true;
    std::uint64_t step = 0;
    for (const auto& e : st.log) {
      TraceEvent ev;
      ev.step = step++;
      ev.kind = e.kind;
      ev.process = e.process;
      ev.object = e.object;
      ev.payload = e.payload;
      ev.id = e.id;
      t.events.push_back(std::move(ev));
    }
    PropertyVerdicts v;
    if (const auto* g = std::get_if<MbrbGuarantee>(&expected_)) {
      v = check_mbrb_properties(t, correct_, opts_.claimed_ell.value_or(g->ell_mbrb));
    } else {
      auto kg = std::get<KlcastGuarantees>(expected_);
      if (opts_.claimed_ell) kg.ell = *opts_.claimed_ell;
      v = check_klcast_properties(t, correct_, kg, MsgKind::Msg);
    }
    if (auto c = min_relevant_census(v, t, s_)) {
      rep_.min_deliverers = rep_.min_deliverers ? std::min(*rep_.min_deliverers, *c) : *c;
      rep_.census_values.insert(*c);
    }
    for (const auto* f : v.failures()) {
      ++rep_.failure_counts[f->name];
      if (rep_.counterexamples.size() < opts_.max_counterexamples)
        rep_.counterexamples.push_back(OracleCounterexample{f->name, format_witness(*f)});
    }
  }

  void expand(const State& st) {
    if (opts_.reduce && st.payloads.size() <= 1) {
      // With a single payload every handler commutes, so one canonical item
      // suffices; a Byzantine item is either sent now or never.
      successors(st, 0);
      if (st.pending.front().byz) {
        State dropped = st;
        dropped.pending.erase(dropped.pending.begin());
        visit(std::move(dropped));
      }
      return;
    }
    for (std::size_t i = 0; i < st.pending.size(); ++i) successors(st, i);
  }

  bool inert(const State& st, const Item& it) const {
    const auto& p = st.procs[it.to.index - 1];
    return !it.action && p.logic && p.logic->is_inert(it.msg);
  }

  void successors(const State& st, std::size_t index) {
    State base = st;
    const Item it = base.pending[index];
    base.pending.erase(base.pending.begin() + static_cast<std::ptrdiff_t>(index));
    const ProcessId p = it.to;
    auto logic = base.procs[p.index - 1].logic->clone();
    Outbox out;
    if (it.action) logic->start(actions_[it.action_index], out);
    else logic->on_receive(it.msg, out);
    base.procs[p.index - 1] = make_proc(std::move(logic));

    // copies to p may have become inert
    std::erase_if(base.pending, [&](const Item& x) { return x.to == p && inert(base, x); });

    std::vector<ImpMessage> broadcasts;
    for (auto& item : out.items) {
      if (auto* m = std::get_if<ImpMessage>(&item)) {
        m->sender = p;
        if (m->kind == MsgKind::Init) m->id.origin = p;
        broadcasts.push_back(std::move(*m));
        continue;
      }
      const auto& e = std::get<LocalEvent>(item);
      const bool keep = is_mbrb(s_.algorithm)
                            ? (e.kind == EventKind::mbrb_broadcast || e.kind == EventKind::mbrb_deliver)
                            : (e.kind == EventKind::kl_cast || e.kind == EventKind::kl_deliver);
      if (keep) sorted_insert(base.log, LogEntry{e.kind, p, e.object, e.payload, e.id});
    }

    std::vector<std::vector<Item>> copies(broadcasts.size());
    for (std::size_t b = 0; b < broadcasts.size(); ++b) {
      if (!std::binary_search(base.payloads.begin(), base.payloads.end(), broadcasts[b].payload))
        sorted_insert(base.payloads, broadcasts[b].payload);
      for (auto to : correct_) {
        Item c;
        c.to = to;
        c.msg = broadcasts[b];
        if (!inert(base, c)) copies[b].push_back(std::move(c));
      }
    }
    std::vector<std::vector<bool>> suppressed(broadcasts.size());
    choose(base, copies, suppressed, 0);
  }

  // Enumerates every victim subset of size <= t_m for each broadcast in turn.
  void choose(const State& base, const std::vector<std::vector<Item>>& copies,
              std::vector<std::vector<bool>>& suppressed, std::size_t b) {
    if (b == copies.size()) {
      State ns = base;
      for (std::size_t i = 0; i < copies.size(); ++i)
        for (std::size_t j = 0; j < copies[i].size(); ++j)
          if (!suppressed[i][j]) sorted_insert(ns.pending, copies[i][j]);
      visit(std::move(ns));
      return;
    }
    const std::size_t m = copies[b].size();
    const std::size_t budget = static_cast<std::size_t>(std::min<Int>(s_.t_m, static_cast<Int>(m)));
    std::vector<bool>& mask = suppressed[b];
    for (std::size_t k = 0; k <= budget; ++k) {
      mask.assign(m, false);
      std::fill(mask.end() - static_cast<std::ptrdiff_t>(k), mask.end(), true);
      do {
        ++rep_.victim_choices;
        if (static_cast<Int>(std::count(mask.begin(), mask.end(), true)) > s_.t_m) rep_.budget_ok = false;
        choose(base, copies, suppressed, b + 1);
      } while (std::next_permutation(mask.begin(), mask.end()));
    }
  }

  const Scenario& s_;
  OracleOptions opts_;
  Expected expected_;
  std::vector<ProcessId> correct_;
  std::vector<WorkloadAction> actions_;
  absl::flat_hash_set<std::pair<std::uint64_t, std::uint64_t>> visited_;
  std::vector<State> stack_;
  std::string buf_;
  OracleReport rep_;
};

}  // namespace

OracleReport exhaustive_oracle(const Scenario& s, const OracleOptions& opts) {
  validate(s);
  if (s.n > 6) throw ConfigError("the oracle is limited to n <= 6");
  if (s.algorithm == Algorithm::sb_klcast) throw ConfigError("the oracle covers signature-free algorithms only");
  Explorer ex(s, opts);
  return ex.run();
}

}  // namespace mbrb
