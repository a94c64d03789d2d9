#include "hh/reduced.hpp"

#include <cmath>

#include "hh/roots.hpp"

namespace hh::reduced {

using quad::kDomainMeasure;

ModelParams::ModelParams(double alpha_, double theta_, double lambda_, double r_, double l_)
    : alpha(alpha_), theta(theta_), lambda(lambda_), r(r_), l(l_) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("ModelParams: alpha must be >= 0");
  if (!(theta > 0.0)) throw std::invalid_argument("ModelParams: theta must be > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("ModelParams: lambda must be >= 0");
  if (!(r > 0.0)) throw std::invalid_argument("ModelParams: r must be > 0");
  if (!(l > 0.0)) throw std::invalid_argument("ModelParams: l must be > 0");
}

const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::StableNode: return "stable_node";
    case StabilityClass::StableSpiral: return "stable_spiral";
    case StabilityClass::UnstableSpiral: return "unstable_spiral";
    case StabilityClass::UnstableNode: return "unstable_node";
    case StabilityClass::HopfCritical: return "hopf_critical";
  }
  return "?";
}

double tilde_c(const quad::WeightedMoments& M, double alpha) {
  auto s = M.slot(alpha);
  return s->Em() / s->E2();
}

double V_alpha(const quad::WeightedMoments& M, double alpha) {
  auto s = M.slot(alpha);
  return s->Em() * s->E1() / s->E2();
}

double tilde_l(const quad::WeightedMoments& M, double alpha, double r) {
  auto s = M.slot(alpha);
  double ct = s->Em() / s->E2();
  return r * kDomainMeasure / s->holling_mass(ct);
}

double tilde_l_derivative_at_zero(const quad::WeightedMoments& M, double r) {
  const double h = 1e-5;
  return (tilde_l(M, h, r) - tilde_l(M, -h, r)) / (2.0 * h);
}

ReducedEquilibrium solve_c0l(const quad::WeightedMoments& M, double alpha, double r, double l) {
  if (!(l > r))
    throw NoRoot("solve_c0l: requires l > r (predation mass is bounded by |Omega|)");
  auto s = M.slot(alpha);
  const double target = r * kDomainMeasure / l;

  // ∫ c e^{am}/(1+c e^{am}) dx increases strictly from 0 to |Omega| in c.
  double hi = 1.0;
  while (s->holling_mass(hi) < target) {
    hi *= 2.0;
    if (hi > 1e12) throw BracketFailure("solve_c0l: bracket expansion failed");
  }
  double c0 = brent([&](double c) { return s->holling_mass(c) - target; }, 0.0, hi);

  // Newton polish to a machine-level residual: the S2 = -c S3 identity and
  // the q0 line both assume the first equilibrium equation holds exactly.
  // d/dc [c S1(c)] = G1(c) - c G2(c).
  for (int it = 0; it < 3; ++it) {
    double f = s->holling_mass(c0) - target;
    double fp = s->holling(c0, 1) - c0 * s->holling(c0, 2);
    double next = c0 - f / fp;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    double moved = std::fabs(next - c0);
    c0 = next;
    if (moved <= 1e-16 * c0) break;
  }

  ReducedEquilibrium eq;
  eq.c0 = c0;
  eq.l = l;
  eq.alpha = alpha;
  eq.r = r;
  eq.q0 = l * c0 / (r * kDomainMeasure) * (s->Em() - c0 * s->E2());
  eq.residual_predator = s->holling_mass(c0) - target;
  eq.coexistence = (c0 > 0.0) && (eq.q0 > 0.0);
  return eq;
}

double S1(const quad::WeightedMoments& M, double alpha, double c) {
  return M.slot(alpha)->holling(c, 1);
}

double S3(const quad::WeightedMoments& M, double alpha, double c) {
  auto s = M.slot(alpha);
  double s1 = s->holling(c, 1);
  double s1p = -s->holling(c, 2);
  return (s1p / s1) * (s->Em() - c * s->E2()) + s->E2();
}

double S_of_l(const quad::WeightedMoments& M, double alpha, double r, double l) {
  ReducedEquilibrium eq = solve_c0l(M, alpha, r, l);
  return -eq.c0 * S3(M, alpha, eq.c0);
}

double S_of_l_direct(const quad::WeightedMoments& M, double alpha, double r, double l) {
  ReducedEquilibrium eq = solve_c0l(M, alpha, r, l);
  auto s = M.slot(alpha);
  double c0 = eq.c0, q0 = eq.q0;
  // ∫ e^{am} [m - 2 c0 e^{am} - q0/(1+c0 e^{am})^2] dx
  return s->integral([&](double m, double eam) {
    double d = 1.0 + c0 * eam;
    return eam * (m - 2.0 * c0 * eam - q0 / (d * d));
  });
}

std::optional<HopfPoint> find_hopf(const quad::WeightedMoments& M, double alpha, double r) {
  auto s = M.slot(alpha);
  if (s->big_T(0) <= 0.0) return std::nullopt;  // S(l) < 0 on the whole range

  const double ct = s->Em() / s->E2();
  auto s3 = [&](double c) {
    double s1 = s->holling(c, 1);
    double s1p = -s->holling(c, 2);
    return (s1p / s1) * (s->Em() - c * s->E2()) + s->E2();
  };
  // S3 is strictly increasing on (0, tilde_c) with S3(0) < 0 < S3(tilde_c),
  // so Brent bracketing cannot fail here.
  double c0 = brent(s3, 0.0, ct);

  HopfPoint hp;
  hp.c0_at_l0 = c0;
  hp.l0 = r * kDomainMeasure / s->holling_mass(c0);

  double q0 = hp.l0 * c0 / (r * kDomainMeasure) * (s->Em() - c0 * s->E2());
  double SM2 = -c0 * s->holling(c0, 1);  // ∫ e^{am} M2 dx
  double H21 = s->integral([&](double, double eam) {
    double d = 1.0 + c0 * eam;
    return eam / (d * d);
  });
  double SM3 = hp.l0 * q0 * H21;  // ∫ M3 dx

  double nu_sq = -SM2 * SM3 / (kDomainMeasure * s->E1());
  if (!(nu_sq > 0.0)) throw RootToleranceNotMet("find_hopf: frequency not positive");
  hp.nu0 = std::sqrt(nu_sq);

  double ratio = SM3 / (hp.nu0 * kDomainMeasure);
  hp.delta0 = 1.0 / std::sqrt(1.0 + ratio * ratio);
  hp.s20 = -hp.delta0 * ratio;

  double adj_ratio = hp.nu0 * s->E1() / SM3;
  hp.adj_delta0 = 1.0 / std::sqrt(1.0 + adj_ratio * adj_ratio);
  hp.adj_s20 = -hp.adj_delta0 * adj_ratio;

  const double dl = 1e-5 * hp.l0;
  double dS = (S_of_l(M, alpha, r, hp.l0 + dl) - S_of_l(M, alpha, r, hp.l0 - dl)) / (2.0 * dl);
  hp.transversality = dS / (2.0 * s->E1());
  return hp;
}

AlphaStarResult find_alpha_star(const quad::WeightedMoments& M) {
  double T0 = M.big_T(0.0, 0);
  if (T0 >= 0.0) return {AlphaStarResult::Kind::Always, 0.0};
  if (M.profile().max_sample <= 1.0) return {AlphaStarResult::Kind::Never, 0.0};

  double hi = 1.0;
  while (M.big_T(hi, 0) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw BracketExhausted("find_alpha_star: T stayed nonpositive up to 1e6");
  }
  double star = bisect([&](double a) { return M.big_T(a, 0); }, 0.0, hi, 1e-9);
  return {AlphaStarResult::Kind::Threshold, star};
}

StabilityReport reduced_jacobian(const quad::WeightedMoments& M, double alpha, double r,
                                 double l) {
  ReducedEquilibrium eq = solve_c0l(M, alpha, r, l);
  if (!eq.coexistence)
    throw NoRoot("reduced_jacobian: no coexistence equilibrium (l <= tilde_l)");
  auto s = M.slot(alpha);
  double c0 = eq.c0;

  double S = -c0 * S3(M, alpha, c0);
  double SM2 = -c0 * s->holling(c0, 1);
  double H21 = s->integral([&](double, double eam) {
    double d = 1.0 + c0 * eam;
    return eam / (d * d);
  });
  double SM3 = l * eq.q0 * H21;

  StabilityReport rep;
  rep.trace = S / s->E1();
  rep.det = -(SM2 / s->E1()) * (SM3 / kDomainMeasure);

  double disc = rep.trace * rep.trace - 4.0 * rep.det;
  if (disc < 0.0) {
    double im = std::sqrt(-disc) / 2.0;
    rep.eig1 = {rep.trace / 2.0, im};
    rep.eig2 = {rep.trace / 2.0, -im};
  } else {
    double root = std::sqrt(disc) / 2.0;
    rep.eig1 = {rep.trace / 2.0 + root, 0.0};
    rep.eig2 = {rep.trace / 2.0 - root, 0.0};
  }

  const double hopf_tol = 1e-8;
  if (std::fabs(rep.trace) < hopf_tol)
    rep.classification = StabilityClass::HopfCritical;
  else if (rep.trace < 0.0)
    rep.classification = disc < 0.0 ? StabilityClass::StableSpiral : StabilityClass::StableNode;
  else
    rep.classification = disc < 0.0 ? StabilityClass::UnstableSpiral : StabilityClass::UnstableNode;
  return rep;
}

double H_indicator(const quad::WeightedMoments& M) {
  auto s = M.slot(0.0);
  double P = s->Em();  // ∫ m dx at alpha = 0
  double Q = s->integral([](double m, double) { return m * m; });
  return 2.0 * P * P - kDomainMeasure * P - kDomainMeasure * Q;
}

}  // namespace hh::reduced
