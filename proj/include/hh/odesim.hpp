#pragma once

#include <optional>
#include <vector>

#include "hh/quad.hpp"

namespace hh::odesim {

struct OdeState {
  double u = 0.0;
  double v = 0.0;
  double t = 0.0;
};

struct Sample {
  double t, u, v;
};

struct Trajectory {
  std::vector<Sample> samples;
  int clamp_warnings = 0;    // steps clamped after a tiny (< 1e-12) undershoot
  int deep_undershoots = 0;  // undershoots at or beyond 1e-12 (should stay 0)
};

enum class Attractor { Equilibrium, LimitCycle, Undetermined };

const char* to_string(Attractor a);

struct TrajectorySummary {
  Attractor attractor = Attractor::Undetermined;
  OdeState final_state;
  double amplitude = 0.0;  // peak-to-peak of v over the last window
  std::optional<double> period_estimate;
};

// Right-hand side of the weighted ODEs:
//   u' E1 = u (Em - u E2) - v ∫ e^{am} u / (1 + e^{am} u) dx
//   v'    = -r v + (l v / |Omega|) ∫ e^{am} u / (1 + e^{am} u) dx
// The nonlinear integral is evaluated by quadrature at each call; u enters it
// as a spatial constant (it is the reduced variable).
void rhs(double u, double v, const quad::AlphaSlot& slot, double r, double l, double& du,
         double& dv);

// Classical fixed-step RK4. Dense output is decimated to at most max_samples
// points. Nonnegativity is enforced by clamping with warning counters.
Trajectory integrate(const OdeState& initial, const quad::WeightedMoments& M, double alpha,
                     double r, double l, double t_end, double dt,
                     std::size_t max_samples = 100000);

// Drops the leading transient_fraction of the trajectory, measures the
// peak-to-peak amplitude of v over two consecutive windows and classifies the
// attractor. Requires at least 1000 post-transient samples.
TrajectorySummary classify(const Trajectory& traj, double transient_fraction = 0.5,
                           double amp_threshold = 1e-4);

}  // namespace hh::odesim
