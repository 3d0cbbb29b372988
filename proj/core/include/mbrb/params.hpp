#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mbrb {

using Int = std::int64_t;

inline constexpr Int kMaxProcesses = 1'000'000;

struct SystemParams {
  Int n = 0;
  Int t_b = 0;
  Int t_m = 0;
  Int c = 0;

  // Validates all invariants; c defaults to n - t_b. Throws ConfigError.
  static SystemParams make(Int n, Int t_b, Int t_m, std::optional<Int> c = std::nullopt);

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct KlcastConfig {
  Int q_d = 1;
  Int q_f = 1;
  bool single = true;

  static KlcastConfig make(Int q_d, Int q_f, bool single);

  friend bool operator==(const KlcastConfig&, const KlcastConfig&) = default;
};

struct AssumptionVerdict {
  std::string name;
  Int lhs = 0;
  bool satisfied = false;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionVerdict> verdicts;
  std::optional<Int> alpha;  // sf only
  // Set when c > n - t_b: the inequalities were proven for c = n - t_b.
  bool informational = false;

  bool satisfied() const;
  const AssumptionVerdict* find(const std::string& name) const;
};

enum class GlobalMode { weak, strong };

struct KlcastGuarantees {
  Int k_prime = 0;
  Int k = 0;
  Int ell = 0;
  bool delta = false;
  GlobalMode global_mode = GlobalMode::weak;

  friend bool operator==(const KlcastGuarantees&, const KlcastGuarantees&) = default;
};

struct BoundCheck {
  bool holds = false;
  Int slack = 0;  // b87: n - 3t_b - 2t_m; ir16: n(t_b+2t_m) - rhs
};

AssumptionReport check_sf_assumptions(const SystemParams& sys, const KlcastConfig& cfg);
KlcastGuarantees sf_guarantees(const SystemParams& sys, const KlcastConfig& cfg);

AssumptionReport check_sb_assumptions(const SystemParams& sys, Int q_d);
KlcastGuarantees sb_guarantees(const SystemParams& sys, Int q_d);

// Guarantee formulas evaluated without checking the assumptions. Requires
// c - t_m - q_d + q_f > 0 and c - q_d + 1 > 0, otherwise AssumptionViolation.
KlcastGuarantees sf_formulas(const SystemParams& sys, const KlcastConfig& cfg);

BoundCheck check_b87(const SystemParams& sys);
BoundCheck check_ir16(const SystemParams& sys);

enum class MbrbAlgorithm { bracha, imbs_raynal };

struct KlcastObject {
  std::string name;  // "obj_E", "obj_R", "obj_W"
  KlcastConfig config;
  KlcastGuarantees guarantees;
  AssumptionReport assumptions;
};

struct MbrbGuarantee {
  MbrbAlgorithm algorithm = MbrbAlgorithm::bracha;
  std::vector<KlcastObject> objects;
  Int ell_mbrb = 0;

  const KlcastObject& object(const std::string& name) const;
};

MbrbGuarantee bracha_configs(const SystemParams& sys);
MbrbGuarantee ir_config(const SystemParams& sys);
MbrbGuarantee mbrb_configs(MbrbAlgorithm algo, const SystemParams& sys);

const char* to_string(MbrbAlgorithm a);
const char* to_string(GlobalMode m);

// Exact floor/ceil of num/den for den > 0.
Int floor_div(__int128 num, __int128 den);
Int ceil_div(__int128 num, __int128 den);

}  // namespace mbrb
