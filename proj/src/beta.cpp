#include "gmt/beta.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gmt/density.hpp"
#include "gmt/error.hpp"
#include "gmt/parallel.hpp"

namespace gmt {

namespace {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// Weighted centroid and scatter matrix of atoms with weights ws.
void moments(const PointMeasure& mu, const std::vector<std::size_t>& ids, const std::vector<double>& ws,
             Point& centroid, double* scatter) {
  const int d = mu.dim();
  double m = 0.0;
  centroid = Point{};
  for (std::size_t k = 0; k < ids.size(); ++k) {
    m += ws[k];
    centroid += ws[k] * mu.point(ids[k]);
  }
  centroid = (1.0 / m) * centroid;
  std::fill(scatter, scatter + d * d, 0.0);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const Point y = mu.point(ids[k]) - centroid;
    for (int a = 0; a < d; ++a) {
      for (int c = 0; c < d; ++c) scatter[a * d + c] += ws[k] * y[a] * y[c];
    }
  }
}

Point unit_axis(int a) {
  Point e{};
  e[a] = 1.0;
  return e;
}

// Offset minimizing sum w |<y, nu> - t| for fixed nu: a weighted median.
double weighted_median_offset(const PointMeasure& mu, const std::vector<std::size_t>& ids, const Point& nu) {
  std::vector<std::pair<double, double>> v;
  v.reserve(ids.size());
  double total = 0.0;
  for (std::size_t i : ids) {
    v.emplace_back(dot(mu.point(i), nu), mu.weight(i));
    total += mu.weight(i);
  }
  std::sort(v.begin(), v.end());
  double acc = 0.0;
  for (const auto& [t, w] : v) {
    acc += w;
    if (acc >= 0.5 * total) return t;
  }
  return v.back().first;
}

double l1_sum(const PointMeasure& mu, const std::vector<std::size_t>& ids, const Point& nu, double t) {
  double s = 0.0;
  for (std::size_t i : ids) s += mu.weight(i) * std::fabs(dot(mu.point(i), nu) - t);
  return s;
}

Point normalized(Point v) {
  const double l = norm(v);
  return (1.0 / l) * v;
}

}  // namespace

double min_eigenvalue(const double* m, int d, double* eigenvector) {
  if (d == 2) {
    const double a = m[0], b = m[1], c = m[3];
    const double mean = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    double lam = mean - rad;
    if (eigenvector) {
      // Eigenvector of the smaller eigenvalue, stable branch choice.
      double vx, vy;
      if (a - lam >= c - lam) {
        vx = -b;
        vy = a - lam;
      } else {
        vx = c - lam;
        vy = -b;
      }
      const double l = std::hypot(vx, vy);
      if (l == 0.0) {
        vx = a <= c ? 1.0 : 0.0;
        vy = a <= c ? 0.0 : 1.0;
      } else {
        vx /= l;
        vy /= l;
      }
      eigenvector[0] = vx;
      eigenvector[1] = vy;
    }
    return lam;
  }
  SmallMatrix M(d, d);
  for (int a = 0; a < d; ++a) {
    for (int c = 0; c < d; ++c) M(a, c) = m[a * d + c];
  }
  Eigen::SelfAdjointEigenSolver<SmallMatrix> es(M);
  if (eigenvector) {
    for (int a = 0; a < d; ++a) eigenvector[a] = es.eigenvectors()(a, 0);
  }
  return es.eigenvalues()(0);
}

double plane_beta(const PointMeasure& mu, const Ball& b, const Point& base, const Point& normal, double p) {
  const int n = mu.n();
  double s = 0.0;
  for (std::size_t i : mu.query(b)) {
    s += mu.weight(i) * std::pow(std::fabs(dot(mu.point(i) - base, normal)) / b.radius, p);
  }
  return std::pow(s / ipow(b.radius, n), 1.0 / p);
}

PlaneFit beta2(const PointMeasure& mu, const Ball& b) {
  const int d = mu.dim();
  const int n = mu.n();
  PlaneFit fit;
  fit.p = 2.0;
  const auto ids = mu.query(b);
  if (ids.empty()) {
    fit.empty = true;
    fit.base = b.center;
    fit.normal = unit_axis(d - 1);
    return fit;
  }
  std::vector<double> ws(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) ws[k] = mu.weight(ids[k]);
  double scatter[kMaxDim * kMaxDim];
  moments(mu, ids, ws, fit.base, scatter);
  double ev[kMaxDim] = {0, 0, 0, 0};
  min_eigenvalue(scatter, d, ev);
  for (int a = 0; a < d; ++a) fit.normal[a] = ev[a];
  fit.normal = normalized(fit.normal);
  // The Rayleigh quotient summed directly keeps nearly flat fits accurate
  // relative to the residual rather than to the largest eigenvalue.
  double lam = 0.0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const double t = dot(mu.point(ids[k]) - fit.base, fit.normal);
    lam += ws[k] * t * t;
  }
  fit.beta = std::sqrt(lam / ipow(b.radius, n + 2));
  return fit;
}

PlaneFit beta_p(const PointMeasure& mu, const Ball& b, double p) {
  if (p == 2.0) return beta2(mu, b);
  if (p != 1.0) throw Error(ErrorKind::kInvalidArgument, "beta_p supports p in {1, 2}");
  const int d = mu.dim();
  const int n = mu.n();
  PlaneFit start = beta2(mu, b);
  PlaneFit fit = start;
  fit.p = 1.0;
  if (start.empty) return fit;
  const auto ids = mu.query(b);

  Point best_nu = start.normal;
  double best_t = dot(start.base, start.normal);
  double best = l1_sum(mu, ids, best_nu, best_t);

  auto consider = [&](const Point& nu_raw) {
    const Point nu = normalized(nu_raw);
    const double t = weighted_median_offset(mu, ids, nu);
    const double v = l1_sum(mu, ids, nu, t);
    if (v < best) {
      best = v;
      best_nu = nu;
      best_t = t;
      return true;
    }
    return false;
  };

  // Iteratively reweighted least squares: each step minimizes a quadratic
  // majorant of the L1 objective.
  const double floor = 1e-12 * b.radius;
  Point nu = best_nu;
  Point base = start.base;
  double prev = best;
  fit.converged = false;
  std::vector<double> ws(ids.size());
  double scatter[kMaxDim * kMaxDim];
  for (int it = 0; it < 500; ++it) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const double r = std::fabs(dot(mu.point(ids[k]) - base, nu));
      ws[k] = mu.weight(ids[k]) / std::max(r, floor);
    }
    moments(mu, ids, ws, base, scatter);
    double ev[kMaxDim] = {0, 0, 0, 0};
    min_eigenvalue(scatter, d, ev);
    for (int a = 0; a < d; ++a) nu[a] = ev[a];
    nu = normalized(nu);
    const double v = l1_sum(mu, ids, nu, dot(base, nu));
    if (v < best) {
      best = v;
      best_nu = nu;
      best_t = dot(base, nu);
    }
    if (std::fabs(prev - v) <= 1e-8 * std::max(prev, 1e-300)) {
      fit.converged = true;
      break;
    }
    prev = v;
  }
  consider(best_nu);

  if (d == 2 && ids.size() <= 200) {
    // Some optimal line passes through two atoms.
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t c = a + 1; c < ids.size(); ++c) {
        const Point dir = mu.point(ids[c]) - mu.point(ids[a]);
        if (norm2(dir) == 0.0) continue;
        Point nrm{};
        nrm[0] = -dir[1];
        nrm[1] = dir[0];
        consider(nrm);
      }
    }
  } else {
    // Pattern search over normal perturbations along coordinate directions.
    for (double step = 0.1; step > 1e-10; step *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int a = 0; a < d; ++a) {
          for (double sgn : {1.0, -1.0}) {
            Point trial = best_nu;
            trial[a] += sgn * step;
            if (consider(trial)) improved = true;
          }
        }
      }
    }
  }

  fit.normal = best_nu;
  fit.base = best_t * best_nu;
  fit.beta = best / (ipow(b.radius, n) * b.radius);
  return fit;
}

double log_midpoint_integral(const std::function<double(double)>& f, double r_min, double r_max, double step_log2) {
  if (!(r_min > 0.0 && r_min < r_max)) throw Error(ErrorKind::kInvalidArgument, "need 0 < r_min < r_max");
  const double s = step_log2 * std::log(2.0);
  const double span = std::log(r_max / r_min);
  const int cells = std::max(1, static_cast<int>(std::ceil(span / s - 1e-9)));
  double total = 0.0;
  for (int j = 0; j < cells; ++j) {
    const double hi = r_max * std::exp(-j * s);
    const double lo = std::max(r_min, r_max * std::exp(-(j + 1) * s));
    total += f(std::sqrt(lo * hi)) * std::log(hi / lo);
  }
  return total;
}

namespace {

// Adds atoms in order of distance and reports lambda_min * mass at any radius.
class MomentSweep {
 public:
  MomentSweep(const PointMeasure& mu, const Point& x, double r_max) : mu_(mu), x_(x) {
    const auto ids = mu.query(Ball{x, r_max});
    order_.reserve(ids.size());
    for (std::size_t i : ids) order_.emplace_back(dist(mu.point(i), x), i);
    std::sort(order_.begin(), order_.end());
  }

  // Include every atom with distance <= r.
  void advance(double r) {
    const int d = mu_.dim();
    while (next_ < order_.size() && order_[next_].first <= r) {
      const std::size_t i = order_[next_].second;
      const double w = mu_.weight(i);
      const Point y = mu_.point(i) - x_;
      m_ += w;
      for (int a = 0; a < d; ++a) {
        s1_[a] += w * y[a];
        for (int c = 0; c < d; ++c) s2_[a * d + c] += w * y[a] * y[c];
      }
      ++next_;
    }
  }

  // beta_2^2 theta times r^{2n+2}.
  double lambda_mass() const {
    if (m_ == 0.0) return 0.0;
    const int d = mu_.dim();
    double c[kMaxDim * kMaxDim];
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) c[a * d + b] = s2_[a * d + b] - s1_[a] * s1_[b] / m_;
    }
    return std::max(0.0, min_eigenvalue(c, d)) * m_;
  }

  const std::vector<std::pair<double, std::size_t>>& order() const { return order_; }

 private:
  const PointMeasure& mu_;
  Point x_;
  std::vector<std::pair<double, std::size_t>> order_;
  std::size_t next_ = 0;
  double m_ = 0.0;
  double s1_[kMaxDim] = {0, 0, 0, 0};
  double s2_[kMaxDim * kMaxDim] = {};
};

}  // namespace

double jones_wolff_sq(const PointMeasure& mu, const Point& x, double r_min, double r_max, const JonesWolffConfig& cfg) {
  if (r_min < mu.resolution_floor() * (1.0 - 1e-12)) {
    throw Error(ErrorKind::kInvalidArgument, "r_min below the resolution floor");
  }
  if (!(r_min < r_max)) throw Error(ErrorKind::kInvalidArgument, "need r_min < r_max");
  const int n = mu.n();
  const int q = 2 * n + 2;
  MomentSweep sweep(mu, x, r_max);
  if (cfg.exact) {
    // Between consecutive atom distances the integrand is c r^{-(2n+2)}.
    std::vector<double> cuts{r_min};
    for (const auto& [r, i] : sweep.order()) {
      if (r > r_min && r < r_max && r != cuts.back()) cuts.push_back(r);
    }
    cuts.push_back(r_max);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      sweep.advance(cuts[k]);
      const double c = sweep.lambda_mass();
      if (c == 0.0) continue;
      total += c / q * (std::pow(cuts[k], -q) - std::pow(cuts[k + 1], -q));
    }
    return total;
  }
  // Midpoints in decreasing order; collect then sweep upward.
  const double s = cfg.step_log2 * std::log(2.0);
  const double span = std::log(r_max / r_min);
  const int cells = std::max(1, static_cast<int>(std::ceil(span / s - 1e-9)));
  double total = 0.0;
  for (int j = cells - 1; j >= 0; --j) {
    const double hi = r_max * std::exp(-j * s);
    const double lo = std::max(r_min, r_max * std::exp(-(j + 1) * s));
    const double r = std::sqrt(lo * hi);
    sweep.advance(r);
    total += sweep.lambda_mass() * std::pow(r, -q) * std::log(hi / lo);
  }
  return total;
}

double jones_wolff(const PointMeasure& mu, const Point& x, double r_min, double r_max, const JonesWolffConfig& cfg) {
  return std::sqrt(jones_wolff_sq(mu, x, r_min, r_max, cfg));
}

double square_function_lhs(const PointMeasure& mu, const Ball& b0, const JonesWolffConfig& cfg) {
  const auto ids = mu.query(b0);
  const double h = mu.resolution_floor();
  const double top = 2.0 * b0.radius;
  if (!(h < top)) return 0.0;
  return blocked_sum(ids.size(), [&](std::size_t k) {
    const std::size_t i = ids[k];
    return mu.weight(i) * jones_wolff_sq(mu, mu.point(i), h, top, cfg);
  });
}

}  // namespace gmt
