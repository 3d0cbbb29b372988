#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbrb/params.hpp"

namespace mbrb {

struct ObjectCell {
  std::string name;
  Int k = 0;
  Int ell = 0;
};

struct SweepRow {
  Int t_b = 0;
  Int t_m = 0;
  bool feasible = false;
  std::string reason;  // why the cell is infeasible
  std::optional<Int> ell_mbrb;
  std::vector<ObjectCell> objects;
};

// One row per (t_b, t_m) in the inclusive ranges, t_b-major. c = n - t_b.
std::vector<SweepRow> sweep(Int n, MbrbAlgorithm algo, Int tb_min, Int tb_max, Int tm_min, Int tm_max);

std::string sweep_csv(MbrbAlgorithm algo, const std::vector<SweepRow>& rows);

}  // namespace mbrb
