#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbrb/properties.hpp"
#include "mbrb/scenario.hpp"

namespace mbrb {

struct BatteryFailure {
  std::uint64_t seed = 0;
  std::string property;
  std::string witness;
};

struct BatteryReport {
  std::size_t runs = 0;
  std::vector<BatteryFailure> failures;  // sorted by (seed, property)
  std::map<std::string, std::size_t> failure_counts;
  // Minimum correct-deliverer count over instances that are delivered by some
  // correct process or were broadcast by a correct origin; unset if none.
  std::optional<Int> min_census;
  std::optional<Int> max_census;
  std::size_t non_quiescent = 0;
  std::uint64_t total_steps = 0;
  std::uint64_t total_received = 0;

  bool ok() const { return failures.empty() && non_quiescent == 0; }
};

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count);

// Runs the scenario once per seed on a pool of worker threads (0 = hardware
// concurrency). Results do not depend on the thread count.
BatteryReport run_battery(const Scenario& scenario, std::span<const std::uint64_t> seeds, unsigned threads = 0);

// Census of instances that count towards BatteryReport::min_census.
std::optional<Int> min_relevant_census(const PropertyVerdicts& v, const Trace& t, const Scenario& s);

}  // namespace mbrb
