#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbrb/netsim.hpp"
#include "mbrb/params.hpp"
#include "mbrb/scenario.hpp"

namespace mbrb {

struct PropertyRecord {
  std::string name;
  // Not-applicable records are still evaluated but do not count towards all_hold().
  bool applicable = true;
  bool holds = true;
  std::vector<TraceEvent> witness;  // non-empty iff !holds
  std::string detail;
};

struct CensusEntry {
  std::map<Payload, std::set<ProcessId>> deliverers;  // correct deliverers per payload
  std::size_t correct_deliverers() const;
};

struct PropertyVerdicts {
  std::vector<PropertyRecord> records;
  std::map<MessageId, CensusEntry> census;

  bool all_hold() const;
  const PropertyRecord* find(std::string_view name) const;
  std::vector<const PropertyRecord*> failures() const;
  void append(PropertyVerdicts other, const std::string& prefix = "");
};

namespace property {
inline constexpr std::string_view kl_validity = "kl-Validity";
inline constexpr std::string_view kl_no_duplication = "kl-No-duplication";
inline constexpr std::string_view kl_no_duplicity = "kl-Conditional-no-duplicity";
inline constexpr std::string_view kl_local_delivery = "kl-Local-delivery";
inline constexpr std::string_view kl_weak_global = "kl-Weak-Global-delivery";
inline constexpr std::string_view kl_strong_global = "kl-Strong-Global-delivery";
inline constexpr std::string_view mbrb_validity = "MBRB-Validity";
inline constexpr std::string_view mbrb_no_duplication = "MBRB-No-duplication";
inline constexpr std::string_view mbrb_no_duplicity = "MBRB-No-duplicity";
inline constexpr std::string_view mbrb_local_delivery = "MBRB-Local-delivery";
inline constexpr std::string_view mbrb_global_delivery = "MBRB-Global-delivery";
inline constexpr std::string_view mbrb_well_formed = "MBRB-Broadcast-well-formedness";
inline constexpr std::string_view net_budget = "net-Suppression-budget";
inline constexpr std::string_view net_authentication = "net-Channel-authentication";
inline constexpr std::string_view net_integrity = "net-No-duplication-corruption";
}  // namespace property

// The six kl-cast properties over the kl_cast / kl_deliver events of one object.
PropertyVerdicts check_klcast_properties(const Trace& t, std::span<const ProcessId> correct,
                                         const KlcastGuarantees& g, MsgKind object);
// The six MBRB properties over mbrb_broadcast / mbrb_deliver events.
PropertyVerdicts check_mbrb_properties(const Trace& t, std::span<const ProcessId> correct, Int ell_mbrb);
PropertyVerdicts check_network_invariants(const Trace& t, std::span<const ProcessId> correct, Int t_m);

// Properties for the scenario's algorithm plus network invariants. For MBRB
// scenarios, constituent kl-cast objects whose assumptions hold are checked too
// under an "obj_X/" prefix.
PropertyVerdicts check_properties(const Trace& t, const Scenario& s, const Expected& expected);

std::string format_witness(const PropertyRecord& r);

}  // namespace mbrb
