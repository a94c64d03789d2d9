#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hh/errors.hpp"
#include "hh/expr.hpp"

namespace hh::quad {

// |Omega| for Omega = (0,1). Kept as a named constant so the weighted-integral
// formulas read like their continuous counterparts.
inline constexpr double kDomainMeasure = 1.0;

// Gauss-Legendre nodes and weights on [-1,1], computed by Newton iteration on
// the Legendre recurrence.
void gauss_legendre(int k, std::vector<double>& nodes, std::vector<double>& weights);

// Composite Gauss-Legendre rule on (0,1): fixed, deterministic, not adaptive.
struct QuadRule {
  int panels = 256;
  int points_per_panel = 4;
  std::vector<double> nodes;    // size panels * points_per_panel
  std::vector<double> weights;  // matching; sums to kDomainMeasure

  static QuadRule make(int panels = 256, int points_per_panel = 4);
};

template <class F>
double integrate(F&& f, const QuadRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double fx = f(rule.nodes[i]);
    if (!std::isfinite(fx)) throw NonFiniteIntegrand("integrand not finite");
    acc += rule.weights[i] * fx;
  }
  return acc;
}

// Profile samples shared between all weighted moments of one profile.
struct NodeData {
  std::vector<double> x;  // quadrature nodes
  std::vector<double> w;  // quadrature weights
  std::vector<double> m;  // m(x) at nodes
};

// All alpha-dependent weighted integrals for one advection rate:
// E_p = ∫ e^{p α m} dx (p = 1,2,3), Em = ∫ e^{α m} m dx, the Holling
// integrals G_q and the ladder T_k = ∫ e^{α m} m^k (m-1) dx.
class AlphaSlot {
 public:
  AlphaSlot(std::shared_ptr<const NodeData> nodes, double alpha);

  double alpha() const { return alpha_; }
  double E1() const { return E1_; }
  double E2() const { return E2_; }
  double E3() const { return E3_; }
  double Em() const { return Em_; }

  // G_q(c) = ∫ e^{q α m} / (1 + c e^{α m})^q dx for q in {1,2,3}:
  // G1 = S1(c), G2 = -S1'(c), G3 = S1''(c)/2.
  double holling(double c, int q) const;

  // ∫ c e^{α m} / (1 + c e^{α m}) dx, the predation mass at constant prey c.
  double holling_mass(double c) const;

  // T_k(alpha); T_0 is the advection indicator, T_k(0) = B_k.
  double big_T(int k) const;

  // Σ w_i f(m_i, e^{α m_i}) for ad-hoc weighted integrands.
  template <class F>
  double integral(F&& f) const {
    const auto& nd = *nodes_;
    double acc = 0.0;
    for (std::size_t i = 0; i < nd.w.size(); ++i) {
      double fx = f(nd.m[i], eam_[i]);
      if (!std::isfinite(fx)) throw NonFiniteIntegrand("integrand not finite");
      acc += nd.w[i] * fx;
    }
    return acc;
  }

 private:
  std::shared_ptr<const NodeData> nodes_;
  double alpha_;
  std::vector<double> eam_;  // e^{alpha m(x_i)}
  double E1_, E2_, E3_, Em_;
  mutable std::mutex tk_mutex_;
  mutable std::map<int, double> tk_cache_;
};

// Per-profile cache of AlphaSlot instances, keyed by alpha rounded to 15
// significant digits. Read-mostly after warm-up; interior synchronization so
// sweep workers can share one instance.
class WeightedMoments {
 public:
  explicit WeightedMoments(expr::EnvProfile profile, QuadRule rule = QuadRule::make());

  const expr::EnvProfile& profile() const { return profile_; }
  const QuadRule& rule() const { return rule_; }

  std::shared_ptr<const AlphaSlot> slot(double alpha) const;

  double E(int p, double alpha) const;
  double Em(double alpha) const;
  double big_T(double alpha, int k) const { return slot(alpha)->big_T(k); }
  double holling(double alpha, double c, int q) const { return slot(alpha)->holling(c, q); }
  double holling_mass(double alpha, double c) const { return slot(alpha)->holling_mass(c); }

  // B_k = ∫ m^k (m-1) dx for k = 0..k_max; sets *overflow and truncates if a
  // term leaves the representable range.
  std::vector<double> B_sequence(int k_max, bool* overflow = nullptr) const;

 private:
  expr::EnvProfile profile_;
  QuadRule rule_;
  std::shared_ptr<const NodeData> nodes_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const AlphaSlot>> slots_;
};

}  // namespace hh::quad
