#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "hh/expr.hpp"
#include "hh/linalg.hpp"
#include "hh/reduced.hpp"

namespace hh::pdesim {

using reduced::ModelParams;

// Cell-centered finite-volume grid on Omega = (0,1) with the profile sampled
// at cell centers and at faces (face values enter the weighted flux).
struct Grid1D {
  int n = 128;
  double h = 0.0;
  expr::EnvProfile profile;
  std::vector<double> xc;        // cell centers (i + 1/2) h
  std::vector<double> m_center;  // m at centers
  std::vector<double> m_face;    // m at faces i h, i = 0..n

  static Grid1D make(const expr::EnvProfile& profile, int n = 128);
};

struct FieldPair {
  Eigen::VectorXd u, v;
};

// Tridiagonal operator; row i maps to lower[i] y_{i-1} + diag[i] y_i +
// upper[i] y_{i+1} with zero-flux closure built into the coefficients.
struct DiffusionOp {
  std::vector<double> lower, diag, upper;
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
};

// e^{-alpha m} d/dx [ e^{alpha m} d/dx ] with zero weighted flux at both
// boundaries; face weights are evaluated at the face coordinates. alpha = 0
// yields the plain Neumann Laplacian used (scaled by theta) in the v-equation.
DiffusionOp weighted_laplacian_op(const Grid1D& g, double alpha);
linalg::Matrix assemble_weighted_laplacian(const Grid1D& g, double alpha);

// Semidiscrete right-hand side of the transformed model: weighted diffusion
// plus pointwise reaction at cell centers.
void rhs_semidiscrete(const FieldPair& state, const Grid1D& g, const ModelParams& p,
                      FieldPair& out);

// Largest admissible explicit step 0.45 h^2 / max(e^{alpha max m}, theta).
double explicit_dt_stab(const Grid1D& g, const ModelParams& p);

// ∫ e^{alpha m} u dx in discrete form; conserved under pure diffusion.
double weighted_mass(const Grid1D& g, double alpha, const Eigen::VectorXd& u);

enum class TimeMode { Explicit, Imex };

struct PdeTrajectory {
  std::vector<double> times;
  std::vector<FieldPair> snapshots;  // first = initial, last = final state
};

// RK4 on the semidiscrete system, or Crank-Nicolson diffusion with explicit
// reaction (dt up to 100 * dt_stab) in Imex mode.
PdeTrajectory time_step(const FieldPair& initial, const Grid1D& g, const ModelParams& p,
                        double dt, double t_end, TimeMode mode = TimeMode::Imex,
                        int snapshots = 2);

struct SteadyResult {
  FieldPair state;
  int iterations = 0;
  double residual = 0.0;
  bool positive = false;  // semi-trivial convergence is reported, not hidden
};

// Constant fields (c0l, q0l) — the lambda -> 0 limit of the steady state.
FieldPair coexistence_guess(const quad::WeightedMoments& M, const Grid1D& g,
                            const ModelParams& p);

// Damped Newton with the exact assembled Jacobian; residual infinity-norm
// target 1e-10. With no guess supplied, starts from coexistence_guess.
SteadyResult newton_steady_state(const Grid1D& g, const ModelParams& p,
                                 const FieldPair* initial_guess = nullptr);

// 2n x 2n linearization [W + lambda M1, lambda M2; lambda M3, theta D +
// lambda M4] at a steady state; shared with Newton.
linalg::Matrix assemble_linearization(const FieldPair& steady, const Grid1D& g,
                                      const ModelParams& p);

enum class Stability { Stable, Unstable, Critical };
const char* to_string(Stability s);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  // descending real part
  std::complex<double> rightmost_pair;            // maximal real part
  std::optional<std::complex<double>> rightmost_complex;  // maximal Re among Im != 0
  Stability stability = Stability::Stable;
};

// Full spectrum of the linearization; Critical when |Re| of the rightmost
// element is below 1e-3 * lambda (all reaction eigenvalues are O(lambda)).
SpectrumReport spectrum(const FieldPair& steady, const Grid1D& g, const ModelParams& p);

// Bisection for the sign change of Re(rightmost complex pair) in l over
// [l_lo, l_hi], to |Re| < 1e-4 * lambda.
double find_l_lambda(const Grid1D& g, const ModelParams& base, double l_lo, double l_hi);

}  // namespace hh::pdesim
