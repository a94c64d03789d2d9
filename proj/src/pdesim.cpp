#include "hh/pdesim.hpp"

#include <cmath>

namespace hh::pdesim {

using linalg::Matrix;
using linalg::Vector;
using quad::kDomainMeasure;

Grid1D Grid1D::make(const expr::EnvProfile& profile, int n) {
  if (n < 16) throw std::invalid_argument("Grid1D: need n >= 16 cells");
  Grid1D g;
  g.n = n;
  g.h = kDomainMeasure / n;
  g.profile = profile;
  g.xc.resize(n);
  g.m_center.resize(n);
  g.m_face.resize(n + 1);
  for (int i = 0; i < n; ++i) {
    g.xc[i] = (i + 0.5) * g.h;
    g.m_center[i] = profile.ast.eval(g.xc[i]);
  }
  for (int i = 0; i <= n; ++i) g.m_face[i] = profile.ast.eval(i * g.h);
  return g;
}

void DiffusionOp::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  const int n = static_cast<int>(diag.size());
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    double acc = diag[i] * in[i];
    if (i > 0) acc += lower[i] * in[i - 1];
    if (i + 1 < n) acc += upper[i] * in[i + 1];
    out[i] = acc;
  }
}

DiffusionOp weighted_laplacian_op(const Grid1D& g, double alpha) {
  const int n = g.n;
  DiffusionOp op;
  op.lower.assign(n, 0.0);
  op.diag.assign(n, 0.0);
  op.upper.assign(n, 0.0);
  const double inv_h2 = 1.0 / (g.h * g.h);
  for (int i = 0; i < n; ++i) {
    // zero weighted flux through the domain boundary
    double a_left = (i == 0) ? 0.0 : std::exp(alpha * g.m_face[i]);
    double a_right = (i == n - 1) ? 0.0 : std::exp(alpha * g.m_face[i + 1]);
    double scale = std::exp(-alpha * g.m_center[i]) * inv_h2;
    op.lower[i] = scale * a_left;
    op.upper[i] = scale * a_right;
    op.diag[i] = -scale * (a_left + a_right);
  }
  return op;
}

Matrix assemble_weighted_laplacian(const Grid1D& g, double alpha) {
  DiffusionOp op = weighted_laplacian_op(g, alpha);
  Matrix W = Matrix::Zero(g.n, g.n);
  for (int i = 0; i < g.n; ++i) {
    W(i, i) = op.diag[i];
    if (i > 0) W(i, i - 1) = op.lower[i];
    if (i + 1 < g.n) W(i, i + 1) = op.upper[i];
  }
  return W;
}

namespace {

// Operators and profile weights reused across the inner loops of one run.
struct Semidiscrete {
  const Grid1D& g;
  ModelParams p;
  DiffusionOp Wu;      // e^{-am} div(e^{am} grad)
  DiffusionOp Dv;      // plain Neumann Laplacian (unscaled)
  std::vector<double> eam;  // e^{alpha m} at centers

  Semidiscrete(const Grid1D& grid, const ModelParams& params)
      : g(grid), p(params), Wu(weighted_laplacian_op(grid, params.alpha)),
        Dv(weighted_laplacian_op(grid, 0.0)) {
    eam.resize(g.n);
    for (int i = 0; i < g.n; ++i) eam[i] = std::exp(p.alpha * g.m_center[i]);
  }

  void rhs(const FieldPair& s, FieldPair& out) const {
    Wu.apply(s.u, out.u);
    Dv.apply(s.v, out.v);
    for (int i = 0; i < g.n; ++i) {
      double E = eam[i];
      double denom = 1.0 + E * s.u[i];
      out.u[i] += p.lambda * s.u[i] * (g.m_center[i] - E * s.u[i] - s.v[i] / denom);
      out.v[i] = p.theta * out.v[i] + p.lambda * s.v[i] * (-p.r + p.l * E * s.u[i] / denom);
    }
  }
};

// Thomas factorization of (I - c * op), reused across steps.
struct TridiagFactor {
  std::vector<double> lower, diag, upper;

  TridiagFactor(const DiffusionOp& op, double c) {
    const int n = static_cast<int>(op.diag.size());
    lower.resize(n);
    diag.resize(n);
    upper.resize(n);
    for (int i = 0; i < n; ++i) {
      lower[i] = -c * op.lower[i];
      diag[i] = 1.0 - c * op.diag[i];
      upper[i] = -c * op.upper[i];
    }
    for (int i = 1; i < n; ++i) {  // strictly diagonally dominant, no pivoting
      double w = lower[i] / diag[i - 1];
      lower[i] = w;
      diag[i] -= w * upper[i - 1];
    }
  }

  void solve(Eigen::VectorXd& x) const {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) x[i] -= lower[i] * x[i - 1];
    x[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (x[i] - upper[i] * x[i + 1]) / diag[i];
  }
};

void check_finite(const FieldPair& s, double t) {
  double mu = s.u.cwiseAbs().maxCoeff();
  double mv = s.v.cwiseAbs().maxCoeff();
  if (!std::isfinite(mu) || !std::isfinite(mv))
    throw NonFiniteState("pde state not finite at t = " + std::to_string(t));
  if (mu > 1e10 || mv > 1e10)
    throw UnstableStep("pde norm exceeded 1e10 at t = " + std::to_string(t));
}

}  // namespace

double explicit_dt_stab(const Grid1D& g, const ModelParams& p) {
  double m_max = g.m_face[0];
  for (double m : g.m_face) m_max = std::max(m_max, m);
  for (double m : g.m_center) m_max = std::max(m_max, m);
  return 0.45 * g.h * g.h / std::max(std::exp(p.alpha * m_max), p.theta);
}

double weighted_mass(const Grid1D& g, double alpha, const Eigen::VectorXd& u) {
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i) acc += std::exp(alpha * g.m_center[i]) * u[i] * g.h;
  return acc;
}

void rhs_semidiscrete(const FieldPair& state, const Grid1D& g, const ModelParams& p,
                      FieldPair& out) {
  Semidiscrete sd(g, p);
  sd.rhs(state, out);
}

PdeTrajectory time_step(const FieldPair& initial, const Grid1D& g, const ModelParams& p,
                        double dt, double t_end, TimeMode mode, int snapshots) {
  if (!(dt > 0.0) || !(t_end > 0.0))
    throw std::invalid_argument("time_step: dt and t_end must be positive");
  const double dt_stab = explicit_dt_stab(g, p);
  if (mode == TimeMode::Explicit && dt > dt_stab)
    throw CflViolation("explicit dt exceeds 0.45 h^2 / max(e^{alpha max m}, theta)");
  if (mode == TimeMode::Imex && dt > 100.0 * dt_stab)
    throw CflViolation("imex dt exceeds 100x the explicit stability limit");

  Semidiscrete sd(g, p);
  const long nsteps = static_cast<long>(std::ceil(t_end / dt));
  snapshots = std::max(snapshots, 2);
  const long snap_stride = std::max<long>(1, nsteps / (snapshots - 1));

  PdeTrajectory traj;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(initial);

  FieldPair s = initial;
  FieldPair k1{Vector(g.n), Vector(g.n)}, k2 = k1, k3 = k1, k4 = k1;
  FieldPair tmp = k1;

  std::optional<TridiagFactor> fac_u, fac_v;
  if (mode == TimeMode::Imex) {
    fac_u.emplace(sd.Wu, 0.5 * dt);
    DiffusionOp theta_dv = sd.Dv;
    for (int i = 0; i < g.n; ++i) {
      theta_dv.lower[i] *= p.theta;
      theta_dv.diag[i] *= p.theta;
      theta_dv.upper[i] *= p.theta;
    }
    fac_v.emplace(theta_dv, 0.5 * dt);
  }

  double t = 0.0;
  for (long step = 1; step <= nsteps; ++step) {
    double h = (step == nsteps) ? (t_end - t) : dt;
    if (mode == TimeMode::Explicit) {
      sd.rhs(s, k1);
      tmp.u = s.u + 0.5 * h * k1.u;
      tmp.v = s.v + 0.5 * h * k1.v;
      sd.rhs(tmp, k2);
      tmp.u = s.u + 0.5 * h * k2.u;
      tmp.v = s.v + 0.5 * h * k2.v;
      sd.rhs(tmp, k3);
      tmp.u = s.u + h * k3.u;
      tmp.v = s.v + h * k3.v;
      sd.rhs(tmp, k4);
      s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
      s.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    } else {
      // Crank-Nicolson diffusion, explicit reaction. The stored factorization
      // assumes a fixed step, so the trailing fractional step reuses dt and
      // overshoots t_end by less than one dt; t is reported exactly.
      sd.Wu.apply(s.u, k1.u);
      sd.Dv.apply(s.v, k1.v);
      for (int i = 0; i < g.n; ++i) {
        double E = sd.eam[i];
        double denom = 1.0 + E * s.u[i];
        double ru = p.lambda * s.u[i] * (g.m_center[i] - E * s.u[i] - s.v[i] / denom);
        double rv = p.lambda * s.v[i] * (-p.r + p.l * E * s.u[i] / denom);
        tmp.u[i] = s.u[i] + 0.5 * dt * k1.u[i] + dt * ru;
        tmp.v[i] = s.v[i] + 0.5 * dt * p.theta * k1.v[i] + dt * rv;
      }
      fac_u->solve(tmp.u);
      fac_v->solve(tmp.v);
      s.u = tmp.u;
      s.v = tmp.v;
      h = dt;
    }
    t += h;
    check_finite(s, t);
    if (step % snap_stride == 0 || step == nsteps) {
      traj.times.push_back(t);
      traj.snapshots.push_back(s);
    }
  }
  return traj;
}

FieldPair coexistence_guess(const quad::WeightedMoments& M, const Grid1D& g,
                            const ModelParams& p) {
  reduced::ReducedEquilibrium eq = reduced::solve_c0l(M, p.alpha, p.r, p.l);
  FieldPair f;
  f.u = Vector::Constant(g.n, eq.c0);
  f.v = Vector::Constant(g.n, eq.q0);
  return f;
}

Matrix assemble_linearization(const FieldPair& steady, const Grid1D& g, const ModelParams& p) {
  const int n = g.n;
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  DiffusionOp Wu = weighted_laplacian_op(g, p.alpha);
  DiffusionOp Dv = weighted_laplacian_op(g, 0.0);
  for (int i = 0; i < n; ++i) {
    J(i, i) = Wu.diag[i];
    if (i > 0) J(i, i - 1) = Wu.lower[i];
    if (i + 1 < n) J(i, i + 1) = Wu.upper[i];
    J(n + i, n + i) = p.theta * Dv.diag[i];
    if (i > 0) J(n + i, n + i - 1) = p.theta * Dv.lower[i];
    if (i + 1 < n) J(n + i, n + i + 1) = p.theta * Dv.upper[i];
  }
  for (int i = 0; i < n; ++i) {
    double E = std::exp(p.alpha * g.m_center[i]);
    double u = steady.u[i], v = steady.v[i];
    double denom = 1.0 + E * u;
    double M1 = g.m_center[i] - 2.0 * E * u - v / (denom * denom);
    double M2 = -u / denom;
    double M3 = p.l * E * v / (denom * denom);
    double M4 = -p.r + p.l * E * u / denom;
    J(i, i) += p.lambda * M1;
    J(i, n + i) = p.lambda * M2;
    J(n + i, i) = p.lambda * M3;
    J(n + i, n + i) += p.lambda * M4;
  }
  return J;
}

SteadyResult newton_steady_state(const Grid1D& g, const ModelParams& p,
                                 const FieldPair* initial_guess) {
  FieldPair x;
  if (initial_guess) {
    x = *initial_guess;
  } else {
    quad::WeightedMoments M(g.profile);
    x = coexistence_guess(M, g, p);
  }

  Semidiscrete sd(g, p);
  FieldPair F{Vector(g.n), Vector(g.n)};
  FieldPair Ftrial = F;
  const double tol = 1e-10;
  const int max_iter = 50;

  auto inf_norm = [&](const FieldPair& f) {
    return std::max(f.u.cwiseAbs().maxCoeff(), f.v.cwiseAbs().maxCoeff());
  };

  sd.rhs(x, F);
  double res = inf_norm(F);
  int it = 0;
  while (res >= tol) {
    if (++it > max_iter) throw NewtonDiverged("newton_steady_state: iteration limit");
    Matrix J = assemble_linearization(x, g, p);
    Vector rhs(2 * g.n);
    rhs.head(g.n) = -F.u;
    rhs.tail(g.n) = -F.v;
    Vector delta = linalg::lu_solve(J, rhs);

    double step = 1.0;
    FieldPair trial;
    double trial_res = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 40; ++halvings) {
      trial.u = x.u + step * delta.head(g.n);
      trial.v = x.v + step * delta.tail(g.n);
      sd.rhs(trial, Ftrial);
      trial_res = inf_norm(Ftrial);
      if (std::isfinite(trial_res) && trial_res < res) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) throw NewtonDiverged("newton_steady_state: backtracking stalled");
    x = trial;
    F = Ftrial;
    res = trial_res;
  }

  SteadyResult out;
  out.state = x;
  out.iterations = it;
  out.residual = res;
  out.positive = (x.u.minCoeff() > 0.0) && (x.v.minCoeff() > 0.0);
  return out;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Critical: return "critical";
  }
  return "?";
}

SpectrumReport spectrum(const FieldPair& steady, const Grid1D& g, const ModelParams& p) {
  Matrix A = assemble_linearization(steady, g, p);
  linalg::EigenResult eig = linalg::eigenvalues(A);
  if (!eig.converged) throw NoConvergence("spectrum: eigenvalue iteration did not converge");

  SpectrumReport rep;
  rep.eigenvalues = std::move(eig.eigenvalues);
  rep.rightmost_pair = rep.eigenvalues.front();
  for (const auto& mu : rep.eigenvalues) {
    if (std::fabs(mu.imag()) > 1e-9 * (1.0 + std::fabs(mu.real()))) {
      rep.rightmost_complex = mu;  // list is sorted by descending real part
      break;
    }
  }

  double tol = 1e-3 * p.lambda + 1e-12;
  double re = rep.rightmost_pair.real();
  rep.stability = std::fabs(re) < tol ? Stability::Critical
                  : (re < 0.0 ? Stability::Stable : Stability::Unstable);
  return rep;
}

double find_l_lambda(const Grid1D& g, const ModelParams& base, double l_lo, double l_hi) {
  if (!(l_lo < l_hi)) throw std::invalid_argument("find_l_lambda: bad bracket");
  quad::WeightedMoments M(g.profile);

  // Far below the Hopf value the rightmost pair may degenerate to a real
  // eigenvalue; it is then negative, so the sign test still applies. Each l
  // starts Newton from its own (c0l, q0l) constants: a guess carried over
  // from a distant l can drop into the semi-trivial basin.
  auto re_rightmost = [&](double l) {
    ModelParams p = base;
    p.l = l;
    FieldPair guess = coexistence_guess(M, g, p);
    SteadyResult steady = newton_steady_state(g, p, &guess);
    SpectrumReport rep = spectrum(steady.state, g, p);
    return rep.rightmost_complex ? rep.rightmost_complex->real() : rep.rightmost_pair.real();
  };

  double g_lo = re_rightmost(l_lo);
  double g_hi = re_rightmost(l_hi);
  if (!(g_lo < 0.0 && g_hi > 0.0))
    throw NoSignChange("find_l_lambda: Re(rightmost pair) does not change sign on bracket");

  // The eigenvalue slope in l is O(lambda), so the |Re| target alone leaves
  // l underdetermined; narrow the bracket first, then verify the target.
  const double tol = 1e-4 * base.lambda;
  const double width_tol = 5e-4;
  for (int iter = 0; iter < 80 && (l_hi - l_lo) > width_tol; ++iter) {
    double mid = 0.5 * (l_lo + l_hi);
    double g_mid = re_rightmost(mid);
    if (g_mid == 0.0) return mid;
    if (g_mid < 0.0)
      l_lo = mid;
    else
      l_hi = mid;
  }
  double mid = 0.5 * (l_lo + l_hi);
  if (std::fabs(re_rightmost(mid)) >= tol)
    throw RootToleranceNotMet("find_l_lambda: |Re(rightmost pair)| above 1e-4 lambda");
  return mid;
}

}  // namespace hh::pdesim
