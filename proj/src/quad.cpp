#include "hh/quad.hpp"

#include <cstdio>
#include <limits>

namespace hh::quad {

void gauss_legendre(int k, std::vector<double>& nodes, std::vector<double>& weights) {
  if (k < 1) throw std::invalid_argument("gauss_legendre: need k >= 1");
  nodes.assign(k, 0.0);
  weights.assign(k, 0.0);
  constexpr double kPi = 3.14159265358979323846;
  const int m = (k + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (k + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < k; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = k * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) < 1e-15) break;
    }
    nodes[i] = -z;
    nodes[k - 1 - i] = z;
    weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[k - 1 - i] = weights[i];
  }
}

QuadRule QuadRule::make(int panels, int points_per_panel) {
  if (panels < 1 || points_per_panel < 1)
    throw std::invalid_argument("QuadRule: panels and points must be positive");
  QuadRule rule;
  rule.panels = panels;
  rule.points_per_panel = points_per_panel;

  std::vector<double> gx, gw;
  gauss_legendre(points_per_panel, gx, gw);

  const double width = kDomainMeasure / panels;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * points_per_panel);
  rule.weights.reserve(rule.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    double a = p * width;
    for (int j = 0; j < points_per_panel; ++j) {
      rule.nodes.push_back(a + 0.5 * width * (1.0 + gx[j]));
      rule.weights.push_back(0.5 * width * gw[j]);
    }
  }
  // normalize so the plain double sum of weights hits |Omega| to ~1 ulp
  long double total = 0.0L;
  for (double w : rule.weights) total += w;
  double scale = static_cast<double>(kDomainMeasure / total);
  for (double& w : rule.weights) w *= scale;
  return rule;
}

AlphaSlot::AlphaSlot(std::shared_ptr<const NodeData> nodes, double alpha)
    : nodes_(std::move(nodes)), alpha_(alpha) {
  const auto& nd = *nodes_;
  eam_.resize(nd.m.size());
  double e1 = 0, e2 = 0, e3 = 0, em = 0;
  for (std::size_t i = 0; i < nd.m.size(); ++i) {
    double e = std::exp(alpha_ * nd.m[i]);
    if (!std::isfinite(e)) throw NonFiniteIntegrand("e^{alpha m} overflow");
    eam_[i] = e;
    double we = nd.w[i] * e;
    e1 += we;
    e2 += we * e;
    e3 += we * e * e;
    em += we * nd.m[i];
  }
  E1_ = e1;
  E2_ = e2;
  E3_ = e3;
  Em_ = em;
  if (!std::isfinite(E2_) || !std::isfinite(E3_))
    throw NonFiniteIntegrand("weighted moment overflow");
}

double AlphaSlot::holling(double c, int q) const {
  if (q < 1 || q > 3) throw std::invalid_argument("holling: q must be 1, 2 or 3");
  const auto& nd = *nodes_;
  double acc = 0.0;
  switch (q) {
    case 1:
      for (std::size_t i = 0; i < eam_.size(); ++i)
        acc += nd.w[i] * eam_[i] / (1.0 + c * eam_[i]);
      break;
    case 2:
      for (std::size_t i = 0; i < eam_.size(); ++i) {
        double d = 1.0 + c * eam_[i];
        acc += nd.w[i] * eam_[i] * eam_[i] / (d * d);
      }
      break;
    case 3:
      for (std::size_t i = 0; i < eam_.size(); ++i) {
        double d = 1.0 + c * eam_[i];
        acc += nd.w[i] * eam_[i] * eam_[i] * eam_[i] / (d * d * d);
      }
      break;
  }
  if (!std::isfinite(acc)) throw NonFiniteIntegrand("holling integral not finite");
  return acc;
}

double AlphaSlot::holling_mass(double c) const {
  const auto& nd = *nodes_;
  double acc = 0.0;
  for (std::size_t i = 0; i < eam_.size(); ++i) {
    double ce = c * eam_[i];
    acc += nd.w[i] * ce / (1.0 + ce);
  }
  return acc;
}

double AlphaSlot::big_T(int k) const {
  if (k < 0) throw std::invalid_argument("big_T: k must be >= 0");
  {
    std::lock_guard<std::mutex> lock(tk_mutex_);
    auto it = tk_cache_.find(k);
    if (it != tk_cache_.end()) return it->second;
  }
  const auto& nd = *nodes_;
  double acc = 0.0;
  for (std::size_t i = 0; i < eam_.size(); ++i) {
    double mk = 1.0;
    for (int j = 0; j < k; ++j) mk *= nd.m[i];
    acc += nd.w[i] * eam_[i] * mk * (nd.m[i] - 1.0);
  }
  std::lock_guard<std::mutex> lock(tk_mutex_);
  tk_cache_.emplace(k, acc);
  return acc;
}

WeightedMoments::WeightedMoments(expr::EnvProfile profile, QuadRule rule)
    : profile_(std::move(profile)), rule_(std::move(rule)) {
  auto nd = std::make_shared<NodeData>();
  nd->x = rule_.nodes;
  nd->w = rule_.weights;
  nd->m.resize(nd->x.size());
  for (std::size_t i = 0; i < nd->x.size(); ++i) nd->m[i] = profile_.ast.eval(nd->x[i]);
  nodes_ = std::move(nd);
}

std::shared_ptr<const AlphaSlot> WeightedMoments::slot(double alpha) const {
  char key[32];
  std::snprintf(key, sizeof key, "%.14e", alpha);  // 15 significant digits
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = slots_.find(key);
    if (it != slots_.end()) return it->second;
  }
  auto made = std::make_shared<AlphaSlot>(nodes_, alpha);
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = slots_.emplace(key, made);
  return it->second;
}

double WeightedMoments::E(int p, double alpha) const {
  auto s = slot(alpha);
  switch (p) {
    case 1: return s->E1();
    case 2: return s->E2();
    case 3: return s->E3();
    default: throw std::invalid_argument("E: p must be 1, 2 or 3");
  }
}

double WeightedMoments::Em(double alpha) const { return slot(alpha)->Em(); }

std::vector<double> WeightedMoments::B_sequence(int k_max, bool* overflow) const {
  if (k_max < 0) throw std::invalid_argument("B_sequence: k_max must be >= 0");
  if (overflow) *overflow = false;
  const auto& nd = *nodes_;
  std::vector<double> out;
  out.reserve(k_max + 1);
  std::vector<double> powk(nd.m.size(), 1.0);  // m^k per node
  for (int k = 0; k <= k_max; ++k) {
    double bk = 0.0;
    for (std::size_t i = 0; i < nd.m.size(); ++i) bk += nd.w[i] * powk[i] * (nd.m[i] - 1.0);
    if (!std::isfinite(bk)) {
      if (overflow) *overflow = true;
      break;
    }
    out.push_back(bk);
    for (std::size_t i = 0; i < nd.m.size(); ++i) powk[i] *= nd.m[i];
  }
  return out;
}

}  // namespace hh::quad
