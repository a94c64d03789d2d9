#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hh/errors.hpp"

namespace hh::config {

// Inclusive linear range "lo:hi:count".
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  std::vector<double> points() const;
};

// Flat key = value run configuration with dotted sections. Every key has a
// CLI override via --set key=value; unknown keys are rejected.
struct RunConfig {
  std::string m;  // required profile expression
  double alpha = 0.0;
  double theta = 1.0;
  double lambda = 0.01;
  double r = 1.0;
  std::optional<double> l;
  std::optional<Range> l_range;
  std::optional<Range> alpha_range;
  std::string out = "out";
  bool allow_constant = false;

  int quad_panels = 256;
  int quad_points = 4;
  int grid_n = 128;

  double ode_u0 = 0.3;
  double ode_v0 = 1.6;
  double ode_t_end = 2000.0;
  double ode_dt = 0.0;  // 0 = auto: 1e-3 / max(r, nu0 if known, 1)
  double ode_transient_fraction = 0.5;
  double ode_amp_threshold = 1e-4;

  double pde_u0 = 0.5;
  double pde_v0 = 0.5;
  std::string pde_mode = "imex";  // or "explicit"
  double pde_dt = 0.0;            // 0 = auto from the stability limit
  double pde_t_end = 100.0;
  int pde_snapshots = 2;

  double hopf_bracket_lo = 0.0;  // 0 = auto: tilde_l + 0.2
  double hopf_bracket_hi = 0.0;  // 0 = auto: 2 * reduced l0

  // Throws ConfigError on malformed text, unknown keys or invariant
  // violations. line numbers are reported for file text; "--set" for
  // overrides.
  static RunConfig parse(const std::string& text);
  void apply_set(const std::string& key_equals_value);
  void validate() const;

  // Canonical "key = value" rendering of the effective configuration; the
  // basis of the output-file hash.
  std::string canonical() const;
  std::string hash() const;  // 16 hex digits of FNV-1a over canonical()
};

std::uint64_t fnv1a64(const std::string& text);

}  // namespace hh::config
