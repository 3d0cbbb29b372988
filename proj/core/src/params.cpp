#include "mbrb/params.hpp"

#include <algorithm>
#include <sstream>

#include "mbrb/errors.hpp"

namespace mbrb {

namespace {

using I128 = __int128;

std::string sys_str(const SystemParams& s) {
  std::ostringstream os;
  os << "(n=" << s.n << ", t_b=" << s.t_b << ", t_m=" << s.t_m << ", c=" << s.c << ")";
  return os.str();
}

Int narrow(I128 v) {
  if (v > I128(INT64_MAX) || v < I128(INT64_MIN)) throw ConfigError("integer overflow in parameter algebra");
  return static_cast<Int>(v);
}

AssumptionVerdict verdict(std::string name, I128 lhs, bool ok, std::string detail) {
  return AssumptionVerdict{std::move(name), narrow(lhs), ok, std::move(detail)};
}

}  // namespace

Int floor_div(I128 num, I128 den) {
  if (den <= 0) throw AssumptionViolation("non-positive denominator");
  I128 q = num / den;
  if (num % den != 0 && num < 0) --q;
  return narrow(q);
}

Int ceil_div(I128 num, I128 den) {
  if (den <= 0) throw AssumptionViolation("non-positive denominator");
  I128 q = num / den;
  if (num % den != 0 && num > 0) ++q;
  return narrow(q);
}

SystemParams SystemParams::make(Int n, Int t_b, Int t_m, std::optional<Int> c) {
  SystemParams s{n, t_b, t_m, c.value_or(n - t_b)};
  if (n < 1 || n > kMaxProcesses) throw ConfigError("n must be in [1, 1000000], got " + std::to_string(n));
  if (t_b < 0 || t_b >= n) throw ConfigError("need 0 <= t_b < n " + sys_str(s));
  if (t_m < 0) throw ConfigError("need t_m >= 0 " + sys_str(s));
  if (s.c < n - t_b || s.c > n) throw ConfigError("need n - t_b <= c <= n " + sys_str(s));
  if (t_m >= s.c) throw ConfigError("need t_m < c " + sys_str(s));
  return s;
}

KlcastConfig KlcastConfig::make(Int q_d, Int q_f, bool single) {
  if (q_f < 1 || q_d < q_f)
    throw ConfigError("need q_d >= q_f >= 1, got q_d=" + std::to_string(q_d) + " q_f=" + std::to_string(q_f));
  return KlcastConfig{q_d, q_f, single};
}

bool AssumptionReport::satisfied() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.satisfied; });
}

const AssumptionVerdict* AssumptionReport::find(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

AssumptionReport check_sf_assumptions(const SystemParams& s, const KlcastConfig& cfg) {
  AssumptionReport r;
  const I128 n = s.n, tb = s.t_b, tm = s.t_m, c = s.c, qd = cfg.q_d, qf = cfg.q_f;
  const I128 alpha = n + qf - tb - tm - 1;
  r.alpha = narrow(alpha);
  r.informational = s.c > s.n - s.t_b;

  // chain c - t_m >= q_d >= q_f + t_b >= 2t_b + 1; lhs is the tightest link
  const I128 l1 = (c - tm) - qd, l2 = qd - (qf + tb), l3 = (qf + tb) - (2 * tb + 1);
  std::ostringstream d1;
  d1 << "c-t_m=" << Int(c - tm) << " >= q_d=" << cfg.q_d << " >= q_f+t_b=" << Int(qf + tb)
     << " >= 2t_b+1=" << Int(2 * tb + 1);
  const I128 m1 = std::min({l1, l2, l3});
  r.verdicts.push_back(verdict("sf-A1", m1, m1 >= 0, d1.str()));

  const I128 a2 = alpha * alpha - 4 * (qf - 1) * (n - tb);
  r.verdicts.push_back(verdict("sf-A2", a2, a2 >= 0, "alpha^2 - 4(q_f-1)(n-t_b) >= 0"));

  const I128 a3 = alpha * (qd - 1) - (qf - 1) * (n - tb) - (qd - 1) * (qd - 1);
  r.verdicts.push_back(verdict("sf-A3", a3, a3 > 0, "alpha(q_d-1) - (q_f-1)(n-t_b) - (q_d-1)^2 > 0"));

  const I128 x = qd - 1 - tb;
  const I128 a4 = alpha * x - (qf - 1) * (n - tb) - x * x;
  r.verdicts.push_back(
      verdict("sf-A4", a4, a4 >= 0, "alpha(q_d-1-t_b) - (q_f-1)(n-t_b) - (q_d-1-t_b)^2 >= 0"));
  return r;
}

KlcastGuarantees sf_formulas(const SystemParams& s, const KlcastConfig& cfg) {
  const I128 n = s.n, tb = s.t_b, tm = s.t_m, c = s.c, qd = cfg.q_d, qf = cfg.q_f;
  const I128 kden = c - tm - qd + qf;
  const I128 lden = c - qd + 1;
  if (kden <= 0 || lden <= 0)
    throw AssumptionViolation("guarantee formulas undefined for " + sys_str(s) + " q_d=" +
                              std::to_string(cfg.q_d) + " q_f=" + std::to_string(cfg.q_f));
  KlcastGuarantees g;
  g.k_prime = narrow(qf - n + c);
  g.k = floor_div(c * (qf - 1), kden) + 1;
  g.ell = ceil_div(c * (lden - tm), lden);
  g.delta = (2 * qf > n + tb) || (cfg.single && 2 * qd > n + tb);
  g.global_mode = cfg.single ? GlobalMode::strong : GlobalMode::weak;
  return g;
}

KlcastGuarantees sf_guarantees(const SystemParams& s, const KlcastConfig& cfg) {
  const auto report = check_sf_assumptions(s, cfg);
  if (!report.satisfied()) {
    std::string failed;
    for (const auto& v : report.verdicts)
      if (!v.satisfied) failed += " " + v.name + "(lhs=" + std::to_string(v.lhs) + ")";
    throw AssumptionViolation("sf-kl assumptions fail for " + sys_str(s) + ":" + failed);
  }
  return sf_formulas(s, cfg);
}

AssumptionReport check_sb_assumptions(const SystemParams& s, Int q_d) {
  AssumptionReport r;
  r.informational = s.c > s.n - s.t_b;
  const I128 a1 = I128(s.c) - 2 * I128(s.t_m);
  r.verdicts.push_back(verdict("sb-A1", a1, a1 > 0, "c - 2t_m > 0"));
  const I128 l1 = I128(s.c) - s.t_m - q_d, l2 = I128(q_d) - (s.t_b + 1);
  const I128 m = std::min(l1, l2);
  std::ostringstream d;
  d << "c-t_m=" << (s.c - s.t_m) << " >= q_d=" << q_d << " >= t_b+1=" << (s.t_b + 1);
  r.verdicts.push_back(verdict("sb-A2", m, m >= 0, d.str()));
  return r;
}

KlcastGuarantees sb_guarantees(const SystemParams& s, Int q_d) {
  const auto report = check_sb_assumptions(s, q_d);
  if (!report.satisfied())
    throw AssumptionViolation("sb-kl assumptions fail for " + sys_str(s) + " q_d=" + std::to_string(q_d));
  KlcastGuarantees g;
  g.k_prime = q_d - s.n + s.c;
  g.k = q_d;
  g.ell = s.c - s.t_m;
  g.delta = 2 * q_d > s.n + s.t_b;
  g.global_mode = GlobalMode::strong;
  return g;
}

BoundCheck check_b87(const SystemParams& s) {
  const I128 slack = I128(s.n) - 3 * I128(s.t_b) - 2 * I128(s.t_m);
  BoundCheck b;
  b.slack = narrow(slack);
  b.holds = slack > 0 && slack * slack > 4 * I128(s.t_b) * I128(s.t_m);
  return b;
}

BoundCheck check_ir16(const SystemParams& s) {
  if (s.t_b == 0 && s.t_m == 0)
    throw DegenerateInput(
        "IR16 assumption vacuous for t_b = t_m = 0; all quorums reduce to the t_m = 0 classical case");
  const I128 tb = s.t_b, tm = s.t_m;
  const I128 lhs = I128(s.n) * (tb + 2 * tm);
  const I128 rhs = (5 * tb + 12 * tm) * (tb + 2 * tm) + 2 * tb * tm;
  return BoundCheck{lhs > rhs, narrow(lhs - rhs)};
}

const KlcastObject& MbrbGuarantee::object(const std::string& name) const {
  for (const auto& o : objects)
    if (o.name == name) return o;
  throw ConfigError("no kl-cast object named " + name);
}

namespace {

KlcastObject make_object(std::string name, const SystemParams& s, KlcastConfig cfg) {
  KlcastObject o;
  o.name = std::move(name);
  o.config = cfg;
  o.assumptions = check_sf_assumptions(s, cfg);
  o.guarantees = sf_formulas(s, cfg);
  return o;
}

}  // namespace

MbrbGuarantee bracha_configs(const SystemParams& s) {
  const auto b87 = check_b87(s);
  if (!b87.holds) throw AssumptionViolation("B87 assumption fails for " + sys_str(s));
  MbrbGuarantee g;
  g.algorithm = MbrbAlgorithm::bracha;
  g.objects.push_back(make_object("obj_E", s, KlcastConfig{(s.n + s.t_b) / 2 + 1, s.t_b + 1, true}));
  g.objects.push_back(make_object("obj_R", s, KlcastConfig{2 * s.t_b + s.t_m + 1, s.t_b + 1, true}));
  const I128 den = I128(s.c) - 2 * s.t_b - s.t_m;
  g.ell_mbrb = ceil_div(I128(s.c) * (den - s.t_m), den);

  const auto& e = g.objects[0].guarantees;
  const auto& r = g.objects[1].guarantees;
  if (s.c - s.t_m < e.k)
    throw AssumptionViolation("chaining c - t_m >= obj_E.k fails for " + sys_str(s));
  if (e.ell < r.k) throw AssumptionViolation("chaining obj_E.ell >= obj_R.k fails for " + sys_str(s));
  return g;
}

MbrbGuarantee ir_config(const SystemParams& s) {
  const auto ir = check_ir16(s);
  if (!ir.holds) throw AssumptionViolation("IR16 assumption fails for " + sys_str(s));
  MbrbGuarantee g;
  g.algorithm = MbrbAlgorithm::imbs_raynal;
  const Int q_d = (s.n + 3 * s.t_b) / 2 + 3 * s.t_m + 1;
  const Int q_f = (s.n + s.t_b) / 2 + 1;
  g.objects.push_back(make_object("obj_W", s, KlcastConfig{q_d, q_f, false}));
  const I128 den = I128(s.c) - (s.n + 3 * s.t_b) / 2 - 3 * I128(s.t_m);
  g.ell_mbrb = ceil_div(I128(s.c) * (den - s.t_m), den);
  if (s.c - s.t_m < g.objects[0].guarantees.k)
    throw AssumptionViolation("chaining c - t_m >= obj_W.k fails for " + sys_str(s));
  return g;
}

MbrbGuarantee mbrb_configs(MbrbAlgorithm algo, const SystemParams& s) {
  return algo == MbrbAlgorithm::bracha ? bracha_configs(s) : ir_config(s);
}

const char* to_string(MbrbAlgorithm a) {
  return a == MbrbAlgorithm::bracha ? "bracha" : "imbs-raynal";
}

const char* to_string(GlobalMode m) { return m == GlobalMode::strong ? "strong" : "weak"; }

}  // namespace mbrb
