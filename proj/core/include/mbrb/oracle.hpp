#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbrb/properties.hpp"
#include "mbrb/scenario.hpp"

namespace mbrb {

struct OracleOptions {
  std::uint64_t max_branches = 10'000'000;  // cap on distinct explored states
  std::size_t max_counterexamples = 5;
  // Replaces the ell (or ell_mbrb) checked at terminals; lets tests confirm
  // the oracle finds counterexamples.
  std::optional<Int> claimed_ell;
  // Restricts the Byzantine menu to these kinds; empty means every kind the
  // algorithm reacts to.
  std::vector<MsgKind> menu_kinds;
  // Explore one canonical order while a single payload is in flight.
  bool reduce = true;
};

struct OracleCounterexample {
  std::string property;
  std::string witness;
};

struct OracleReport {
  std::uint64_t states = 0;       // distinct states explored
  std::uint64_t transitions = 0;  // successor states generated
  std::uint64_t terminals = 0;    // states where every correct copy and action is consumed
  std::uint64_t victim_choices = 0;
  std::size_t menu_size = 0;  // Byzantine point-to-point messages available
  std::optional<Int> min_deliverers;
  std::set<Int> census_values;  // deliverer counts seen at terminal states
  std::map<std::string, std::uint64_t> failure_counts;
  std::vector<OracleCounterexample> counterexamples;
  bool budget_ok = true;

  bool ok() const { return failure_counts.empty() && budget_ok; }
};

// Explores every schedule of the scenario: every delivery order (up to
// commuting single-payload steps), every victim set of size <= t_m per
// ur_broadcast of a correct process, every subset and ordering of Byzantine
// messages from the menu (kinds x {workload, forged} payloads x correct
// recipients), and every timing of the workload actions. Properties are
// checked on each terminal state.
//
// Requires n <= 6, a single broadcast instance and a signature-free algorithm.
// Throws StateSpaceOverflow when more than max_branches states are reached.
OracleReport exhaustive_oracle(const Scenario& s, const OracleOptions& opts = {});

}  // namespace mbrb
