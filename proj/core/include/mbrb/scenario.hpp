#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mbrb/netsim.hpp"
#include "mbrb/params.hpp"

namespace mbrb {

struct ByzantineSpec {
  ProcessId id;
  std::string behavior = "silent";
};

struct Scenario {
  Int n = 0;
  Int t_b = 0;
  Int t_m = 0;
  std::vector<ByzantineSpec> byzantine;
  AdversaryStrategy adversary;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::bracha;
  KlcastConfig klcast;  // sf-klcast: q_d, q_f, single; sb-klcast: q_d
  std::vector<WorkloadAction> workload;
  std::uint64_t max_steps = 10'000'000;
  std::vector<Payload> forged_payloads{"forged"};  // exhaustive oracle menu
  ReorderHook reorder;

  // c is the number of processes not on the Byzantine roster.
  SystemParams sys() const;
  bool is_byzantine(ProcessId p) const;
  std::vector<ProcessId> correct() const;
  std::vector<ProcessId> byzantine_ids() const;
};

using Expected = std::variant<MbrbGuarantee, KlcastGuarantees>;

// Throws ConfigError when the scenario is inconsistent.
void validate(const Scenario& s);
// Guarantees the properties are checked against. ConfigError when the
// algorithm's assumptions do not hold for the scenario.
Expected expected_guarantees(const Scenario& s);

Scenario parse_scenario(std::string_view json);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);

Trace run_to_quiescence(const Scenario& s);
Trace run_to_quiescence(const Scenario& s, std::uint64_t seed);

// Correct-process logic for the scenario's algorithm.
std::unique_ptr<ProcessLogic> make_process_logic(const Scenario& s, ProcessId p,
                                                 const std::shared_ptr<SignatureScheme>& scheme);

// Line-delimited JSON, one event per line, then a summary line.
std::string trace_to_jsonl(const Trace& t);
Trace trace_from_jsonl(std::string_view text);

}  // namespace mbrb
