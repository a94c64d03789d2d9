#include "hh/odesim.hpp"

#include <cmath>
#include <stdexcept>

namespace hh::odesim {

using quad::kDomainMeasure;

const char* to_string(Attractor a) {
  switch (a) {
    case Attractor::Equilibrium: return "equilibrium";
    case Attractor::LimitCycle: return "limit_cycle";
    case Attractor::Undetermined: return "undetermined";
  }
  return "?";
}

void rhs(double u, double v, const quad::AlphaSlot& slot, double r, double l, double& du,
         double& dv) {
  double hol = slot.holling_mass(u);
  du = (u * (slot.Em() - u * slot.E2()) - v * hol) / slot.E1();
  dv = -r * v + (l * v / kDomainMeasure) * hol;
}

Trajectory integrate(const OdeState& initial, const quad::WeightedMoments& M, double alpha,
                     double r, double l, double t_end, double dt, std::size_t max_samples) {
  if (!(dt > 0.0) || !(t_end > 0.0))
    throw std::invalid_argument("integrate: dt and t_end must be positive");

  auto slot_ptr = M.slot(alpha);
  const quad::AlphaSlot& slot = *slot_ptr;

  const long nsteps = static_cast<long>(std::ceil(t_end / dt));
  const long stride = std::max<long>(1, (nsteps + 1 + static_cast<long>(max_samples) - 1) /
                                            static_cast<long>(max_samples));

  Trajectory traj;
  traj.samples.reserve(static_cast<std::size_t>(nsteps / stride) + 2);

  double u = initial.u, v = initial.v, t = initial.t;
  traj.samples.push_back({t, u, v});

  auto clamp = [&](double& y) {
    if (y < 0.0) {
      if (y > -1e-12)
        ++traj.clamp_warnings;
      else
        ++traj.deep_undershoots;
      y = 0.0;
    }
  };

  double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
  for (long step = 1; step <= nsteps; ++step) {
    double h = (step == nsteps) ? (t_end + initial.t - t) : dt;
    rhs(u, v, slot, r, l, k1u, k1v);
    rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v, slot, r, l, k2u, k2v);
    rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v, slot, r, l, k3u, k3v);
    rhs(u + h * k3u, v + h * k3v, slot, r, l, k4u, k4v);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t += h;
    clamp(u);
    clamp(v);
    if (!std::isfinite(u) || !std::isfinite(v))
      throw NonFiniteState("integrate: trajectory blew up at t = " + std::to_string(t));
    if (step % stride == 0 || step == nsteps) traj.samples.push_back({t, u, v});
  }
  return traj;
}

TrajectorySummary classify(const Trajectory& traj, double transient_fraction,
                           double amp_threshold) {
  const auto& s = traj.samples;
  std::size_t start = static_cast<std::size_t>(transient_fraction * s.size());
  if (s.size() < start || s.size() - start < 1000)
    throw std::invalid_argument("classify: need at least 1000 post-transient samples");

  std::size_t mid = start + (s.size() - start) / 2;
  auto window_amp = [&](std::size_t lo, std::size_t hi) {
    double vmin = s[lo].v, vmax = s[lo].v;
    for (std::size_t i = lo; i < hi; ++i) {
      vmin = std::min(vmin, s[i].v);
      vmax = std::max(vmax, s[i].v);
    }
    return vmax - vmin;
  };
  double amp1 = window_amp(start, mid);
  double amp2 = window_amp(mid, s.size());

  double vbar = 0.0;
  for (std::size_t i = mid; i < s.size(); ++i) vbar += s[i].v;
  vbar /= static_cast<double>(s.size() - mid);

  TrajectorySummary out;
  out.final_state = {s.back().u, s.back().v, s.back().t};
  out.amplitude = amp2;

  double scale = std::max(std::fabs(vbar), 1e-12);
  if (amp2 / scale < amp_threshold) {
    out.attractor = Attractor::Equilibrium;
    return out;
  }

  double drift = std::fabs(amp2 - amp1) / std::max(amp1, amp2);
  if (drift >= 0.05) {
    out.attractor = Attractor::Undetermined;
    return out;
  }

  // mean spacing of the strict local maxima of v over the last window
  std::vector<double> peak_times;
  for (std::size_t i = mid + 1; i + 1 < s.size(); ++i)
    if (s[i].v > s[i - 1].v && s[i].v >= s[i + 1].v) peak_times.push_back(s[i].t);
  if (peak_times.size() < 3) {
    out.attractor = Attractor::Undetermined;
    return out;
  }
  out.attractor = Attractor::LimitCycle;
  out.period_estimate =
      (peak_times.back() - peak_times.front()) / static_cast<double>(peak_times.size() - 1);
  return out;
}

}  // namespace hh::odesim
