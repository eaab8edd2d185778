#include "gmt/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmt/error.hpp"

namespace gmt {

double mass_in_ball(const PointMeasure& mu, const Ball& b) {
  std::vector<std::size_t> ids;
  mu.query(b, ids);
  double m = 0.0;
  for (std::size_t i : ids) m += mu.weight(i);
  return m;
}

double theta(const PointMeasure& mu, const Ball& b) {
  if (!(b.radius > 0.0)) throw Error(ErrorKind::kInvalidArgument, "ball radius must be positive");
  return mass_in_ball(mu, b) / ipow(b.radius, mu.n());
}

double p_mu(const PointMeasure& mu, const Ball& b) {
  if (!(b.radius > 0.0)) throw Error(ErrorKind::kInvalidArgument, "ball radius must be positive");
  if (mu.empty()) return 0.0;
  const int n = mu.n();
  const Ball& bb = mu.bounding_ball();
  const double cover = dist(b.center, bb.center) + bb.radius;
  double sum = 0.0;
  double scale = 1.0;
  for (int j = 0;; ++j, scale *= 2.0) {
    const double r = scale * b.radius;
    if (r >= cover) {
      // Every later ball holds the whole mass.
      const double ratio = std::ldexp(1.0, -(n + 1));
      sum += mu.total_mass() / ipow(b.radius, n) * std::pow(ratio, j) / (1.0 - ratio);
      return sum;
    }
    sum += mass_in_ball(mu, Ball{b.center, r}) / ipow(r, n) / scale;
  }
}

bool is_p_doubling(const PointMeasure& mu, const Ball& b, double c) {
  return density_stats(mu, b, c).is_p_doubling;
}

DensityStats density_stats(const PointMeasure& mu, const Ball& b, double c) {
  if (c < 1.0) throw Error(ErrorKind::kInvalidArgument, "doubling constant must be at least 1");
  DensityStats s;
  s.theta = theta(mu, b);
  s.p_mu = p_mu(mu, b);
  s.constant_used = c;
  s.is_p_doubling = s.p_mu <= c * s.theta;
  return s;
}

DoublingScales doubling_scales(const PointMeasure& mu, const Ball& b0, const Ball& b1) {
  if (!(b1.radius > 0.0) || !(b0.radius >= b1.radius)) {
    throw Error(ErrorKind::kInvalidArgument, "need 0 < rad B1 <= rad B0");
  }
  DoublingScales out;
  out.N = static_cast<int>(std::floor(std::log2(b0.radius / b1.radius)));
  for (int j = 1; j <= out.N; ++j) {
    if (is_p_doubling(mu, b1.scaled(std::ldexp(1.0, j)), 4.0)) out.doubling.push_back(j);
  }
  return out;
}

double doubling_scale_lower_bound(int N, int n, double c0, double alpha) {
  // alpha theta(B0) <= 2^n P(2 B1) <= 2^n (2/3)^{N-D} 2^{nD} 4^{n+1} c0 theta(B0).
  const double kappa = alpha / (std::ldexp(1.0, n) * std::pow(4.0, n + 1) * c0);
  const double l15 = std::log(1.5);
  return (N * l15 + std::log(kappa)) / (n * std::log(2.0) + l15);
}

RadialProfile radial_profile(const PointMeasure& mu, const Point& x, double max_radius) {
  std::vector<std::size_t> ids;
  mu.query(Ball{x, max_radius}, ids);
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(ids.size());
  for (std::size_t i : ids) d.emplace_back(dist(mu.point(i), x), i);
  std::sort(d.begin(), d.end());
  RadialProfile p;
  p.radius.reserve(d.size());
  p.cumulative_mass.reserve(d.size());
  double m = 0.0;
  for (const auto& [r, i] : d) {
    m += mu.weight(i);
    p.radius.push_back(r);
    p.cumulative_mass.push_back(m);
  }
  return p;
}

double m_n(const PointMeasure& mu, const Point& x, double r_min, double r_max) {
  if (!(r_min <= r_max) || !(r_min > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "radius range must satisfy 0 < r_min <= r_max");
  }
  if (r_min < mu.resolution_floor() * (1.0 - 1e-12)) {
    throw Error(ErrorKind::kInvalidArgument, "r_min below the resolution floor");
  }
  const int n = mu.n();
  const RadialProfile p = radial_profile(mu, x, r_max);
  double best = 0.0;
  // Mass at r_min: every atom with distance <= r_min.
  auto upto = std::upper_bound(p.radius.begin(), p.radius.end(), r_min);
  const std::size_t k0 = static_cast<std::size_t>(upto - p.radius.begin());
  if (k0 > 0) best = p.cumulative_mass[k0 - 1] / ipow(r_min, n);
  for (std::size_t k = k0; k < p.radius.size(); ++k) {
    // Use the last atom at this exact distance so ties are fully counted.
    if (k + 1 < p.radius.size() && p.radius[k + 1] == p.radius[k]) continue;
    best = std::max(best, p.cumulative_mass[k] / ipow(p.radius[k], n));
  }
  return best;
}

double theta_star_upper(const PointMeasure& mu, const Point& x, double window) {
  const double h = mu.resolution_floor();
  return m_n(mu, x, h, window * h);
}

}  // namespace gmt
