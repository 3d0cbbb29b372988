#include "mbrb/sweep.hpp"

#include <sstream>

#include "mbrb/errors.hpp"

namespace mbrb {

std::vector<SweepRow> sweep(Int n, MbrbAlgorithm algo, Int tb_min, Int tb_max, Int tm_min, Int tm_max) {
  if (tb_min > tb_max || tm_min > tm_max || tb_min < 0 || tm_min < 0) throw ConfigError("empty sweep range");
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>((tb_max - tb_min + 1) * (tm_max - tm_min + 1)));
  for (Int tb = tb_min; tb <= tb_max; ++tb) {
    for (Int tm = tm_min; tm <= tm_max; ++tm) {
      SweepRow row;
      row.t_b = tb;
      row.t_m = tm;
      try {
        const auto g = mbrb_configs(algo, SystemParams::make(n, tb, tm));
        row.feasible = true;
        row.ell_mbrb = g.ell_mbrb;
        for (const auto& o : g.objects) row.objects.push_back({o.name, o.guarantees.k, o.guarantees.ell});
      } catch (const Error& e) {
        row.reason = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string sweep_csv(MbrbAlgorithm algo, const std::vector<SweepRow>& rows) {
  const std::vector<std::string> names =
      algo == MbrbAlgorithm::bracha ? std::vector<std::string>{"objE", "objR"} : std::vector<std::string>{"objW"};
  std::ostringstream out;
  out << "t_b,t_m,feasible,ell_mbrb";
  for (const auto& nm : names) out << ',' << nm << "_k," << nm << "_ell";
  out << '\n';
  for (const auto& r : rows) {
    out << r.t_b << ',' << r.t_m << ',' << (r.feasible ? 1 : 0) << ',';
    if (r.ell_mbrb) out << *r.ell_mbrb;
    else out << "NA";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (r.feasible && i < r.objects.size()) out << ',' << r.objects[i].k << ',' << r.objects[i].ell;
      else out << ",NA,NA";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mbrb
