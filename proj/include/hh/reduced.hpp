#pragma once

#include <complex>
#include <optional>

#include "hh/quad.hpp"

namespace hh::reduced {

// Nondimensionalized model parameters: alpha = advection/diffusion ratio,
// theta = predator/prey diffusion ratio, lambda = 1/d1, r = predator death
// rate, l = conversion rate.
struct ModelParams {
  double alpha = 0.0;
  double theta = 1.0;
  double lambda = 0.0;
  double r = 1.0;
  double l = 1.0;

  ModelParams() = default;
  ModelParams(double alpha_, double theta_, double lambda_, double r_, double l_);
};

// Coexistence point (c0, q0) of the weighted ODEs for given (alpha, r, l).
struct ReducedEquilibrium {
  double c0 = 0.0;
  double q0 = 0.0;
  double l = 0.0;
  double alpha = 0.0;
  double r = 0.0;
  double residual_predator = 0.0;  // predation-mass equation residual at c0
  bool coexistence = false;        // c0 > 0 and q0 > 0, i.e. l > tilde_l
};

struct HopfPoint {
  double l0 = 0.0;
  double c0_at_l0 = 0.0;
  double nu0 = 0.0;     // angular frequency of the critical pair +-i nu0
  double delta0 = 0.0;  // eigenvector components (delta0, i s20), normalized
  double s20 = 0.0;
  double adj_delta0 = 0.0;  // adjoint eigenvector components, normalized
  double adj_s20 = 0.0;
  double transversality = 0.0;  // S'(l0) / (2 ∫ e^{alpha m} dx) > 0
};

enum class StabilityClass {
  StableNode,
  StableSpiral,
  UnstableSpiral,
  UnstableNode,
  HopfCritical,
};

const char* to_string(StabilityClass c);

struct StabilityReport {
  double trace = 0.0;
  double det = 0.0;
  std::complex<double> eig1, eig2;  // eig1 has the larger (real, then imag) part
  StabilityClass classification = StabilityClass::StableNode;
};

// --- weighted-average quantities -------------------------------------------

// tilde_c = ∫ e^{alpha m} m dx / ∫ e^{2 alpha m} dx
double tilde_c(const quad::WeightedMoments& M, double alpha);

// V(alpha) = ∫ e^{alpha m} m dx ∫ e^{alpha m} dx / ∫ e^{2 alpha m} dx
double V_alpha(const quad::WeightedMoments& M, double alpha);

// Predator invasion threshold tilde_l = r |Omega| / ∫ tilde_c e^{alpha m} /
// (1 + tilde_c e^{alpha m}) dx; coexistence requires l > tilde_l.
double tilde_l(const quad::WeightedMoments& M, double alpha, double r);

// Central-difference d tilde_l / d alpha at alpha = 0 (step 1e-5); negative
// for non-constant profiles.
double tilde_l_derivative_at_zero(const quad::WeightedMoments& M, double r);

// --- equilibrium and stability functionals ---------------------------------

// Solves ∫ c e^{alpha m} / (1 + c e^{alpha m}) dx = r |Omega| / l for c by
// bracketed Brent iteration and fills in q0. Requires l > r.
ReducedEquilibrium solve_c0l(const quad::WeightedMoments& M, double alpha, double r, double l);

// S1(c) = ∫ e^{alpha m} / (1 + c e^{alpha m}) dx and the chain built on it.
double S1(const quad::WeightedMoments& M, double alpha, double c);
double S3(const quad::WeightedMoments& M, double alpha, double c);

// Stability functional S(l) evaluated through the c-parameterization
// S(l) = S2(c0l) = -c0l S3(c0l).
double S_of_l(const quad::WeightedMoments& M, double alpha, double r, double l);

// Direct evaluation ∫ e^{alpha m} M1 dx for cross-checking S_of_l.
double S_of_l_direct(const quad::WeightedMoments& M, double alpha, double r, double l);

// Hopf threshold l0 with frequency, eigenvector and adjoint components and
// the transversality value. Empty when T(alpha) <= 0 (no Hopf point).
std::optional<HopfPoint> find_hopf(const quad::WeightedMoments& M, double alpha, double r);

// Critical advection rate at which T(alpha) = ∫ e^{alpha m}(m-1) dx changes
// sign.
struct AlphaStarResult {
  enum class Kind { Always, Never, Threshold };
  Kind kind = Kind::Always;
  double value = 0.0;  // meaningful for Threshold only
};

AlphaStarResult find_alpha_star(const quad::WeightedMoments& M);

// 2x2 Jacobian of the weighted ODEs at the coexistence equilibrium:
// [[S(l)/E1, SM2/E1], [SM3/|Omega|, 0]].
StabilityReport reduced_jacobian(const quad::WeightedMoments& M, double alpha, double r, double l);

// H = 2 (∫m)^2 - |Omega| ∫m - |Omega| ∫m^2; its sign is the small-alpha
// monotonicity of l0(alpha).
double H_indicator(const quad::WeightedMoments& M);

}  // namespace hh::reduced
