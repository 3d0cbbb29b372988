#include "mbrb/battery.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "mbrb/errors.hpp"

namespace mbrb {

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
  return out;
}

std::optional<Int> min_relevant_census(const PropertyVerdicts& v, const Trace& t, const Scenario& s) {
  std::map<MessageId, Int> counts;
  for (const auto& [id, entry] : v.census) counts[id] = static_cast<Int>(entry.correct_deliverers());
  // instances a correct process broadcast or kl-cast count even with zero deliverers
  const EventKind start = (s.algorithm == Algorithm::bracha || s.algorithm == Algorithm::imbs_raynal)
                              ? EventKind::mbrb_broadcast
                              : EventKind::kl_cast;
  for (const auto& e : t.events)
    if (e.kind == start && !s.is_byzantine(e.process)) counts.emplace(e.id, 0);
  std::optional<Int> out;
  for (const auto& [id, c] : counts) out = out ? std::min(*out, c) : c;
  return out;
}

namespace {

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<BatteryFailure> failures;
  std::optional<Int> census;
  bool quiescent = true;
  std::uint64_t steps = 0;
  std::uint64_t received = 0;
};

RunResult run_one(const Scenario& s, const Expected& expected, std::uint64_t seed) {
  RunResult r;
  r.seed = seed;
  const Trace t = run_to_quiescence(s, seed);
  const auto v = check_properties(t, s, expected);
  for (const auto* f : v.failures()) r.failures.push_back(BatteryFailure{seed, f->name, format_witness(*f)});
  r.census = min_relevant_census(v, t, s);
  r.quiescent = t.quiescent;
  r.steps = t.steps;
  r.received = t.stats.received;
  return r;
}

}  // namespace

BatteryReport run_battery(const Scenario& s, std::span<const std::uint64_t> seeds, unsigned threads) {
  validate(s);
  const Expected expected = expected_guarantees(s);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, seeds.size())));

  std::vector<RunResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        results[i] = run_one(s, expected, seeds[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  BatteryReport rep;
  rep.runs = results.size();
  for (auto& r : results) {
    for (auto& f : r.failures) {
      ++rep.failure_counts[f.property];
      rep.failures.push_back(std::move(f));
    }
    if (r.census) {
      rep.min_census = rep.min_census ? std::min(*rep.min_census, *r.census) : *r.census;
      rep.max_census = rep.max_census ? std::max(*rep.max_census, *r.census) : *r.census;
    }
    if (!r.quiescent) ++rep.non_quiescent;
    rep.total_steps += r.steps;
    rep.total_received += r.received;
  }
  std::sort(rep.failures.begin(), rep.failures.end(),
            [](const auto& a, const auto& b) { return std::tie(a.seed, a.property) < std::tie(b.seed, b.property); });
  return rep;
}

}  // namespace mbrb
