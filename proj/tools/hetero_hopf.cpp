#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "hh/config.hpp"
#include "hh/expr.hpp"
#include "hh/odesim.hpp"
#include "hh/pdesim.hpp"
#include "hh/quad.hpp"
#include "hh/reduced.hpp"
#include "hh/textio.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using hh::fmt17;
using hh::kCrlf;
using hh::config::RunConfig;

namespace {

struct Ctx {
  RunConfig cfg;
  hh::expr::EnvProfile profile;
  std::shared_ptr<hh::quad::WeightedMoments> M;
  std::string hash;
};

Ctx make_context(const std::string& config_path, const std::vector<std::string>& sets) {
  std::ifstream in(config_path);
  if (!in) throw hh::ConfigError("cannot open config file '" + config_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();

  Ctx ctx;
  ctx.cfg = RunConfig::parse(buf.str());
  for (const auto& kv : sets) ctx.cfg.apply_set(kv);
  ctx.cfg.validate();

  hh::expr::ProfileOptions popt;
  popt.allow_constant = ctx.cfg.allow_constant;
  ctx.profile = hh::expr::load_profile(ctx.cfg.m, 256, popt);
  ctx.M = std::make_shared<hh::quad::WeightedMoments>(
      ctx.profile, hh::quad::QuadRule::make(ctx.cfg.quad_panels, ctx.cfg.quad_points));
  ctx.hash = ctx.cfg.hash();
  return ctx;
}

fs::path out_file(const Ctx& ctx, const std::string& command, const std::string& ext) {
  fs::create_directories(ctx.cfg.out);
  return fs::path(ctx.cfg.out) / (command + "-" + ctx.hash + "." + ext);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json analyze_document(const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  auto& M = *ctx.M;

  json doc;
  doc["m"] = cfg.m;
  doc["alpha"] = cfg.alpha;
  doc["theta"] = cfg.theta;
  doc["lambda"] = cfg.lambda;
  doc["r"] = cfg.r;

  doc["tilde_l"] = hh::reduced::tilde_l(M, cfg.alpha, cfg.r);
  doc["tilde_c"] = hh::reduced::tilde_c(M, cfg.alpha);
  doc["V"] = hh::reduced::V_alpha(M, cfg.alpha);
  doc["T"] = M.big_T(cfg.alpha, 0);
  doc["H"] = hh::reduced::H_indicator(M);
  doc["tilde_l_prime_at_zero"] = hh::reduced::tilde_l_derivative_at_zero(M, cfg.r);

  auto star = hh::reduced::find_alpha_star(M);
  switch (star.kind) {
    case hh::reduced::AlphaStarResult::Kind::Always: doc["alpha_star"] = "always"; break;
    case hh::reduced::AlphaStarResult::Kind::Never: doc["alpha_star"] = "never"; break;
    case hh::reduced::AlphaStarResult::Kind::Threshold: doc["alpha_star"] = star.value; break;
  }

  auto hopf = hh::reduced::find_hopf(M, cfg.alpha, cfg.r);
  if (hopf) {
    doc["l0"] = hopf->l0;
    doc["c0"] = hopf->c0_at_l0;
    auto eq = hh::reduced::solve_c0l(M, cfg.alpha, cfg.r, hopf->l0);
    doc["q0"] = eq.q0;
    doc["nu0"] = hopf->nu0;
    doc["delta0"] = hopf->delta0;
    doc["s20"] = hopf->s20;
    doc["adj_delta0"] = hopf->adj_delta0;
    doc["adj_s20"] = hopf->adj_s20;
    doc["transversality"] = hopf->transversality;
  } else {
    doc["l0"] = nullptr;
    doc["c0"] = nullptr;
    doc["q0"] = nullptr;
    doc["nu0"] = nullptr;
    doc["delta0"] = nullptr;
    doc["s20"] = nullptr;
    doc["adj_delta0"] = nullptr;
    doc["adj_s20"] = nullptr;
    doc["transversality"] = nullptr;
  }
  return doc;
}

int cmd_analyze(const Ctx& ctx) {
  json doc = analyze_document(ctx);
  std::string text = doc.dump(2) + "\n";
  fs::path path = out_file(ctx, "analyze", "json");
  write_text(path, text);
  std::cout << text;
  std::cerr << "wrote " << path.string() << "\n";
  return 0;
}

// --- sweep ------------------------------------------------------------------

constexpr const char* kSweepHeader =
    "alpha,l,tilde_l,c0,q0,S,trace,det,re_mu_over_lambda,im_mu_over_lambda,classification";

std::string sweep_row(const hh::quad::WeightedMoments& M, double alpha, double l, double r) {
  // columns: alpha,l,tilde_l,c0,q0,S,trace,det,re_mu,im_mu,classification
  std::vector<std::string> cells = {fmt17(alpha), fmt17(l), "NA", "NA", "NA", "NA",
                                    "NA",         "NA",     "NA", "NA", "error"};
  try {
    cells[2] = fmt17(hh::reduced::tilde_l(M, alpha, r));
    if (!(l > r)) {
      cells[10] = "no_coexistence";
    } else {
      auto eq = hh::reduced::solve_c0l(M, alpha, r, l);
      cells[3] = fmt17(eq.c0);
      cells[4] = fmt17(eq.q0);
      if (!eq.coexistence) {
        cells[10] = "no_coexistence";
      } else {
        auto jac = hh::reduced::reduced_jacobian(M, alpha, r, l);
        cells[5] = fmt17(hh::reduced::S_of_l(M, alpha, r, l));
        cells[6] = fmt17(jac.trace);
        cells[7] = fmt17(jac.det);
        cells[8] = fmt17(jac.eig1.real());
        cells[9] = fmt17(jac.eig1.imag());
        cells[10] = hh::reduced::to_string(jac.classification);
      }
    }
  } catch (const std::exception&) {
    cells[10] = "error";
  }
  std::string row = cells[0];
  for (std::size_t i = 1; i < cells.size(); ++i) {
    row += ',';
    row += cells[i];
  }
  return row;
}

std::string gnuplot_script(const std::string& csv_name) {
  std::ostringstream gp;
  gp << "# two-parameter stability map\n"
     << "set datafile separator ','\n"
     << "set key outside\n"
     << "set xlabel 'alpha'\n"
     << "set ylabel 'l'\n"
     << "csv = '" << csv_name << "'\n"
     << "plot \\\n"
     << "  csv using 1:(strcol(11) eq 'stable_node' ? $2 : NaN) pt 5 lc rgb '#2166ac' t "
        "'stable node', \\\n"
     << "  csv using 1:(strcol(11) eq 'stable_spiral' ? $2 : NaN) pt 7 lc rgb '#67a9cf' t "
        "'stable spiral', \\\n"
     << "  csv using 1:(strcol(11) eq 'hopf_critical' ? $2 : NaN) pt 9 lc rgb '#1a9850' t "
        "'hopf critical', \\\n"
     << "  csv using 1:(strcol(11) eq 'unstable_spiral' ? $2 : NaN) pt 7 lc rgb '#ef8a62' t "
        "'unstable spiral', \\\n"
     << "  csv using 1:(strcol(11) eq 'unstable_node' ? $2 : NaN) pt 5 lc rgb '#b2182b' t "
        "'unstable node', \\\n"
     << "  csv using 1:(strcol(11) eq 'no_coexistence' ? $2 : NaN) pt 1 lc rgb '#999999' t "
        "'no coexistence'\n";
  return gp.str();
}

int cmd_sweep(const Ctx& ctx, int jobs) {
  const auto& cfg = ctx.cfg;
  hh::config::Range arange =
      cfg.alpha_range ? *cfg.alpha_range : hh::config::Range{cfg.alpha, cfg.alpha, 1};
  if (!cfg.l_range && !cfg.l)
    throw hh::ConfigError("sweep: needs l_range (or l for a single column)");
  hh::config::Range lrange = cfg.l_range ? *cfg.l_range : hh::config::Range{*cfg.l, *cfg.l, 1};

  std::vector<double> alphas = arange.points();
  std::vector<double> ls = lrange.points();
  const std::size_t total = alphas.size() * ls.size();
  std::vector<std::string> rows(total);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> any_error{false};
  auto worker = [&]() {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= total) return;
      double alpha = alphas[k / ls.size()];
      double l = ls[k % ls.size()];
      rows[k] = sweep_row(*ctx.M, alpha, l, cfg.r);
      if (rows[k].find(",error") != std::string::npos) any_error = true;
    }
  };
  jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ostringstream csv;
  csv << kSweepHeader << kCrlf;
  for (const auto& row : rows) csv << row << kCrlf;

  fs::path csv_path = out_file(ctx, "sweep", "csv");
  write_text(csv_path, csv.str());
  fs::path gp_path = out_file(ctx, "sweep", "gp");
  write_text(gp_path, gnuplot_script(csv_path.filename().string()));

  std::cerr << "wrote " << csv_path.string() << " (" << total << " rows)\n";
  std::cerr << "wrote " << gp_path.string() << "\n";
  return any_error ? 4 : 0;
}

// --- simulation commands ------------------------------------------------------

int cmd_ode_sim(const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.l) throw hh::ConfigError("ode-sim: 'l' is required");
  auto hopf = hh::reduced::find_hopf(*ctx.M, cfg.alpha, cfg.r);

  double char_rate = std::max(cfg.r, 1.0);
  if (hopf) char_rate = std::max(char_rate, hopf->nu0);
  double dt = cfg.ode_dt > 0.0 ? cfg.ode_dt : 1e-3 / char_rate;

  hh::odesim::OdeState init{cfg.ode_u0, cfg.ode_v0, 0.0};
  auto traj =
      hh::odesim::integrate(init, *ctx.M, cfg.alpha, cfg.r, *cfg.l, cfg.ode_t_end, dt);
  auto summary =
      hh::odesim::classify(traj, cfg.ode_transient_fraction, cfg.ode_amp_threshold);

  // the analysis does not decide sub/supercriticality; stay agnostic near l0
  if (hopf && std::fabs(*cfg.l - hopf->l0) / hopf->l0 < 0.02)
    summary.attractor = hh::odesim::Attractor::Undetermined;

  std::ostringstream csv;
  csv << "t,u,v" << kCrlf;
  for (const auto& s : traj.samples)
    csv << fmt17(s.t) << ',' << fmt17(s.u) << ',' << fmt17(s.v) << kCrlf;
  fs::path path = out_file(ctx, "ode-sim", "csv");
  write_text(path, csv.str());

  json doc;
  doc["attractor"] = hh::odesim::to_string(summary.attractor);
  doc["final_u"] = summary.final_state.u;
  doc["final_v"] = summary.final_state.v;
  doc["amplitude"] = summary.amplitude;
  if (summary.period_estimate)
    doc["period_estimate"] = *summary.period_estimate;
  else
    doc["period_estimate"] = nullptr;
  doc["clamp_warnings"] = traj.clamp_warnings;
  std::cout << doc.dump(2) << "\n";
  std::cerr << "wrote " << path.string() << " (" << traj.samples.size() << " samples)\n";
  return 0;
}

std::string snapshot_csv(const hh::pdesim::Grid1D& grid, const hh::pdesim::FieldPair& f) {
  std::ostringstream csv;
  csv << "x,u,v" << kCrlf;
  for (int i = 0; i < grid.n; ++i)
    csv << fmt17(grid.xc[i]) << ',' << fmt17(f.u[i]) << ',' << fmt17(f.v[i]) << kCrlf;
  return csv.str();
}

int cmd_pde_sim(const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.l) throw hh::ConfigError("pde-sim: 'l' is required");
  auto grid = hh::pdesim::Grid1D::make(ctx.profile, cfg.grid_n);
  hh::reduced::ModelParams p(cfg.alpha, cfg.theta, cfg.lambda, cfg.r, *cfg.l);

  auto mode = cfg.pde_mode == "explicit" ? hh::pdesim::TimeMode::Explicit
                                         : hh::pdesim::TimeMode::Imex;
  double dt_stab = hh::pdesim::explicit_dt_stab(grid, p);
  double dt = cfg.pde_dt > 0.0
                  ? cfg.pde_dt
                  : (mode == hh::pdesim::TimeMode::Explicit ? dt_stab : 50.0 * dt_stab);

  hh::pdesim::FieldPair init{Eigen::VectorXd::Constant(grid.n, cfg.pde_u0),
                             Eigen::VectorXd::Constant(grid.n, cfg.pde_v0)};
  auto traj = hh::pdesim::time_step(init, grid, p, dt, cfg.pde_t_end, mode,
                                    std::max(2, cfg.pde_snapshots));

  fs::path final_path = out_file(ctx, "pde-sim", "csv");
  write_text(final_path, snapshot_csv(grid, traj.snapshots.back()));
  if (cfg.pde_snapshots > 1) {
    for (std::size_t k = 0; k + 1 < traj.snapshots.size(); ++k) {
      fs::path p_k = final_path;
      p_k.replace_extension();
      p_k += "-snap" + std::to_string(k) + ".csv";
      write_text(p_k, snapshot_csv(grid, traj.snapshots[k]));
    }
  }

  const auto& fin = traj.snapshots.back();
  json doc;
  doc["t_end"] = traj.times.back();
  doc["max_u"] = fin.u.maxCoeff();
  doc["min_u"] = fin.u.minCoeff();
  doc["max_v"] = fin.v.maxCoeff();
  doc["min_v"] = fin.v.minCoeff();
  doc["weighted_mass_u"] = hh::pdesim::weighted_mass(grid, cfg.alpha, fin.u);
  std::cout << doc.dump(2) << "\n";
  std::cerr << "wrote " << final_path.string() << "\n";
  return 0;
}

hh::pdesim::SteadyResult steady_for_config(const Ctx& ctx, const hh::pdesim::Grid1D& grid,
                                           const hh::reduced::ModelParams& p) {
  if (p.lambda == 0.0) {
    // every constant pair is steady at lambda = 0; use the configured one
    hh::pdesim::SteadyResult st;
    st.state = {Eigen::VectorXd::Constant(grid.n, ctx.cfg.pde_u0),
                Eigen::VectorXd::Constant(grid.n, ctx.cfg.pde_v0)};
    st.positive = ctx.cfg.pde_u0 > 0.0 && ctx.cfg.pde_v0 > 0.0;
    return st;
  }
  auto guess = hh::pdesim::coexistence_guess(*ctx.M, grid, p);
  return hh::pdesim::newton_steady_state(grid, p, &guess);
}

int cmd_spectrum(const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.l) throw hh::ConfigError("spectrum: 'l' is required");
  auto grid = hh::pdesim::Grid1D::make(ctx.profile, cfg.grid_n);
  hh::reduced::ModelParams p(cfg.alpha, cfg.theta, cfg.lambda, cfg.r, *cfg.l);

  auto steady = steady_for_config(ctx, grid, p);
  auto rep = hh::pdesim::spectrum(steady.state, grid, p);

  std::ostringstream csv;
  csv << "re,im" << kCrlf;
  for (const auto& mu : rep.eigenvalues)
    csv << fmt17(mu.real()) << ',' << fmt17(mu.imag()) << kCrlf;
  fs::path path = out_file(ctx, "spectrum", "csv");
  write_text(path, csv.str());

  json doc;
  doc["steady_positive"] = steady.positive;
  doc["newton_iterations"] = steady.iterations;
  doc["rightmost_re"] = rep.rightmost_pair.real();
  doc["rightmost_im"] = rep.rightmost_pair.imag();
  if (p.lambda > 0.0) {
    doc["rightmost_re_over_lambda"] = rep.rightmost_pair.real() / p.lambda;
    doc["rightmost_im_over_lambda"] = rep.rightmost_pair.imag() / p.lambda;
  } else {
    doc["rightmost_re_over_lambda"] = nullptr;
    doc["rightmost_im_over_lambda"] = nullptr;
  }
  doc["stability"] = hh::pdesim::to_string(rep.stability);
  std::cout << doc.dump(2) << "\n";
  std::cerr << "wrote " << path.string() << " (" << rep.eigenvalues.size() << " eigenvalues)\n";
  return 0;
}

int cmd_hopf(const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  if (!(cfg.lambda > 0.0)) throw hh::ConfigError("hopf: lambda must be > 0");
  auto grid = hh::pdesim::Grid1D::make(ctx.profile, cfg.grid_n);
  hh::reduced::ModelParams base(cfg.alpha, cfg.theta, cfg.lambda, cfg.r, 1.0);

  if (ctx.M->big_T(cfg.alpha, 0) <= 0.0)
    throw hh::NoSignChange("hopf: T(alpha) <= 0, no Hopf point in the admissible range");
  auto hopf = hh::reduced::find_hopf(*ctx.M, cfg.alpha, cfg.r);
  double tl = hh::reduced::tilde_l(*ctx.M, cfg.alpha, cfg.r);

  double lo = cfg.hopf_bracket_lo > 0.0 ? cfg.hopf_bracket_lo : tl + 0.2;
  double hi = cfg.hopf_bracket_hi > 0.0 ? cfg.hopf_bracket_hi
                                        : std::max(2.0 * hopf->l0, lo + 0.5);

  double l_lambda = hh::pdesim::find_l_lambda(grid, base, lo, hi);

  std::ostringstream csv;
  csv << "lambda,l_lambda,l0_reduced" << kCrlf;
  csv << fmt17(cfg.lambda) << ',' << fmt17(l_lambda) << ',' << fmt17(hopf->l0) << kCrlf;
  fs::path path = out_file(ctx, "hopf", "csv");
  write_text(path, csv.str());

  json doc;
  doc["lambda"] = cfg.lambda;
  doc["l_lambda"] = l_lambda;
  doc["l0_reduced"] = hopf->l0;
  std::cout << doc.dump(2) << "\n";
  std::cerr << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetero-hopf: stability and Hopf-bifurcation analysis of a "
               "reaction-diffusion-advection predator-prey model on (0,1)"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  int jobs = 1;

  const char* names[] = {"analyze", "sweep", "ode-sim", "pde-sim", "spectrum", "hopf"};
  const char* descs[] = {
      "reduced-theory report: tilde_l, T, alpha*, l0, nu0, H (JSON)",
      "alpha x l stability sweep (CSV + gnuplot script)",
      "integrate the weighted ODEs and classify the attractor",
      "time-step the full PDE model",
      "spectrum of the PDE linearization at the steady state",
      "locate the PDE Hopf value l_lambda by spectral bisection"};
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--set", sets, "override a config key (key=value)");
    sub->add_option("--jobs", jobs, "worker threads for sweeps");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    Ctx ctx = make_context(config_path, sets);
    if (app.got_subcommand("analyze")) return cmd_analyze(ctx);
    if (app.got_subcommand("sweep")) return cmd_sweep(ctx, jobs);
    if (app.got_subcommand("ode-sim")) return cmd_ode_sim(ctx);
    if (app.got_subcommand("pde-sim")) return cmd_pde_sim(ctx);
    if (app.got_subcommand("spectrum")) return cmd_spectrum(ctx);
    if (app.got_subcommand("hopf")) return cmd_hopf(ctx);
    return 2;
  } catch (const hh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hh::SyntaxError& e) {
    std::cerr << "config error in profile expression: " << e.what() << "\n";
    return 2;
  } catch (const hh::H1Violation& e) {
    std::cerr << "config error: profile violates (H1): " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
