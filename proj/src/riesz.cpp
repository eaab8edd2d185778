#include "gmt/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "gmt/error.hpp"
#include "gmt/parallel.hpp"

namespace gmt {

namespace {

// 1 / |x|^{n+1} from |x|^2.
inline double inv_radial(double r2, int n) {
  switch (n) {
    case 1: return 1.0 / r2;
    case 2: return 1.0 / (r2 * std::sqrt(r2));
    case 3: return 1.0 / (r2 * r2);
    default: return std::pow(r2, -0.5 * (n + 1));
  }
}

inline double truncation_weight(double r2, const KernelConfig& cfg) {
  if (cfg.eps <= 0.0) return 1.0;
  if (!cfg.smooth) return r2 > cfg.eps * cfg.eps ? 1.0 : 0.0;
  return bump_profile(std::sqrt(r2) / cfg.eps);
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

double bump_profile(double s) {
  if (s <= 1.0) return 0.0;
  if (s >= 2.0) return 1.0;
  const double t = s - 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

Point riesz_kernel(const Point& x, int n) {
  const double r2 = norm2(x);
  if (r2 == 0.0) return Point{};
  return inv_radial(r2, n) * x;
}

Point riesz_at(const PointMeasure& mu, const Point& x, const KernelConfig& cfg) {
  const int n = mu.n();
  Point s{};
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const Point d = x - mu.point(j);
    const double r2 = norm2(d);
    if (r2 == 0.0) continue;
    const double t = truncation_weight(r2, cfg);
    if (t == 0.0) continue;
    s += (t * mu.weight(j) * inv_radial(r2, n)) * d;
  }
  return s;
}

Point riesz_pv(const PointMeasure& mu, std::size_t i) {
  const int n = mu.n();
  const Point& x = mu.point(i);
  Point s{};
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (j == i) continue;
    const Point d = x - mu.point(j);
    const double r2 = norm2(d);
    if (r2 == 0.0) continue;
    s += (mu.weight(j) * inv_radial(r2, n)) * d;
  }
  return s;
}

VectorField kernel_sum(const PointMeasure& mu, const std::vector<double>* coeffs, const std::vector<char>* mask) {
  const int n = mu.n();
  const int d = mu.dim();
  const std::size_t N = mu.size();
  const std::vector<double>& c = coeffs ? *coeffs : mu.weights();
  VectorField out(N, d);
  parallel_for(N, [&](std::size_t i) {
    const Point& x = mu.point(i);
    Point s{};
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i || (mask && !(*mask)[j]) || c[j] == 0.0) continue;
      const Point diff = x - mu.point(j);
      const double r2 = norm2(diff);
      if (r2 == 0.0) continue;
      s += (c[j] * inv_radial(r2, n)) * diff;
    }
    for (int a = 0; a < d; ++a) out.at(i, a) = s[a];
  }, 16);
  return out;
}

VectorField riesz_pv_field(const PointMeasure& mu) { return kernel_sum(mu); }

double riesz_star(const PointMeasure& mu, const Point& x, double eps_min) {
  const int n = mu.n();
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double r = dist(x, mu.point(j));
    if (r > 0.0) d.emplace_back(r, j);
  }
  // Descending distance: eps sweeps down and atoms enter one distance group at a time.
  std::sort(d.begin(), d.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  Point s{};
  double best = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto [r, j] = d[k];
    s += mu.weight(j) * riesz_kernel(x - mu.point(j), n);
    const bool group_end = k + 1 == d.size() || d[k + 1].first != r;
    // The state after this group holds for eps in [next distance, r).
    if (group_end && r > eps_min) best = std::max(best, norm(s));
  }
  return best;
}

std::vector<double> geometric_eps_grid(double eps_min, double eps_max, double ratio) {
  if (!(eps_min > 0.0) || !(eps_max >= eps_min) || !(ratio > 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "eps grid requires 0 < eps_min <= eps_max and ratio > 1");
  }
  std::vector<double> g;
  for (int k = 0;; ++k) {
    const double e = eps_min * std::pow(ratio, k);
    if (e > eps_max * (1.0 + 1e-12)) break;
    g.push_back(e);
  }
  return g;
}

double riesz_star_smooth(const PointMeasure& mu, const Point& x, const std::vector<double>& eps_grid) {
  if (eps_grid.empty()) throw Error(ErrorKind::kInvalidArgument, "eps grid must be nonempty");
  double best = 0.0;
  for (double e : eps_grid) best = std::max(best, norm(riesz_at(mu, x, KernelConfig{e, true})));
  return best;
}

double oscillation_l2(const PointMeasure& mu, const std::vector<std::size_t>& atoms, const VectorField& field) {
  if (atoms.empty()) throw Error(ErrorKind::kEmptyDomain, "oscillation over a ball without atoms");
  if (field.atoms() != mu.size()) throw Error(ErrorKind::kInvalidArgument, "field length differs from atom count");
  const int k = field.components;
  std::vector<double> mean(k, 0.0);
  double m = 0.0;
  for (std::size_t a : atoms) {
    m += mu.weight(a);
    for (int c = 0; c < k; ++c) mean[c] += mu.weight(a) * field.at(a, c);
  }
  for (auto& v : mean) v /= m;
  double s = 0.0;
  for (std::size_t a : atoms) {
    double t = 0.0;
    for (int c = 0; c < k; ++c) {
      const double u = field.at(a, c) - mean[c];
      t += u * u;
    }
    s += mu.weight(a) * t;
  }
  return s;
}

double oscillation_l2(const PointMeasure& mu, const Ball& b, const VectorField& field) {
  return oscillation_l2(mu, mu.query(b), field);
}

VectorField riesz_apply(const PointMeasure& mu, const std::vector<double>& f, const std::vector<char>* mask) {
  if (f.size() != mu.size()) throw Error(ErrorKind::kInvalidArgument, "field length differs from atom count");
  std::vector<double> c(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) c[j] = mu.weight(j) * f[j];
  return kernel_sum(mu, &c, mask);
}

std::vector<double> riesz_contract(const PointMeasure& mu, const VectorField& g, const std::vector<char>* mask,
                                   const std::vector<double>* coeffs) {
  if (g.atoms() != mu.size() || g.components != mu.dim()) {
    throw Error(ErrorKind::kInvalidArgument, "vector field shape differs from the measure");
  }
  const int n = mu.n();
  const int d = mu.dim();
  const std::size_t N = mu.size();
  const std::vector<double>& c = coeffs ? *coeffs : mu.weights();
  std::vector<double> out(N, 0.0);
  parallel_for(N, [&](std::size_t i) {
    const Point& x = mu.point(i);
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i || (mask && !(*mask)[j]) || c[j] == 0.0) continue;
      const Point diff = x - mu.point(j);
      const double r2 = norm2(diff);
      if (r2 == 0.0) continue;
      double dg = 0.0;
      for (int a = 0; a < d; ++a) dg += diff[a] * g.at(j, a);
      s += c[j] * inv_radial(r2, n) * dg;
    }
    out[i] = s;
  }, 16);
  return out;
}

std::vector<double> riesz_adjoint_apply(const PointMeasure& mu, const VectorField& g, const std::vector<char>* mask,
                                        const std::vector<double>* coeffs) {
  auto out = riesz_contract(mu, g, mask, coeffs);
  for (auto& v : out) v = -v;
  return out;
}

NormEstimate operator_norm_estimate(const PointMeasure& mu, const Ball& b, int max_iterations, double tolerance) {
  const auto ids = mu.query(b);
  if (ids.size() < 2) throw Error(ErrorKind::kInvalidArgument, "operator norm needs at least two atoms");
  const PointMeasure sub = mu.restricted(ids);
  const std::size_t N = sub.size();
  const int d = sub.dim();
  std::vector<double> v(N);
  for (std::size_t i = 0; i < N; ++i) {
    v[i] = static_cast<double>(splitmix(i + 1) >> 11) * 0x1.0p-53 - 0.5;
  }
  auto wnorm2 = [&](const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += sub.weight(i) * f[i] * f[i];
    return s;
  };
  NormEstimate est;
  double prev = -1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const double vn = std::sqrt(wnorm2(v));
    if (vn == 0.0) break;
    for (auto& x : v) x /= vn;
    const VectorField tv = riesz_apply(sub, v);
    double tn = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      for (int a = 0; a < d; ++a) tn += sub.weight(i) * tv.at(i, a) * tv.at(i, a);
    }
    const double lambda = tn;  // Rayleigh quotient of R*R at the unit vector v
    est.value = std::sqrt(lambda);
    est.iterations = it;
    if (prev >= 0.0 && std::fabs(lambda - prev) <= tolerance * lambda) {
      est.converged = true;
      break;
    }
    prev = lambda;
    // The L^2(mu) adjoint of riesz_apply is riesz_adjoint_apply.
    v = riesz_adjoint_apply(sub, tv);
  }
  return est;
}

std::vector<Point> direct_riesz(const PointMeasure& mu, const std::vector<Point>& targets, const KernelConfig& cfg) {
  std::vector<Point> out(targets.size());
  parallel_for(targets.size(), [&](std::size_t t) { out[t] = riesz_at(mu, targets[t], cfg); }, 16);
  return out;
}

}  // namespace gmt
