#include "gmt/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "gmt/density.hpp"
#include "gmt/error.hpp"
#include "gmt/parallel.hpp"

namespace gmt {

namespace {
const double kPi = std::acos(-1.0);
}

double unit_sphere_area(int dim) {
  // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2).
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double newtonian_constant(int n) {
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "the newtonian kernel needs n >= 2");
  return 1.0 / ((n - 1) * unit_sphere_area(n + 1));
}

double smeared_self_energy(int n, double s, double c_n) {
  if (!(s > 0.0)) throw Error(ErrorKind::kInvalidArgument, "smearing radius must be positive");
  if (n == 1) return c_n * (std::log(1.0 / s) + 0.25);
  return c_n * std::pow(s, 1.0 - n) * 2.0 * (n + 1) / (n + 3);
}

EnergyReport riesz_energy(const PointMeasure& mu, double smear, double c_n) {
  const int n = mu.n();
  EnergyReport rep;
  rep.kernel = n == 1 ? "logarithmic" : "newtonian";
  rep.c_n = c_n > 0.0 ? c_n : (n == 1 ? 1.0 / (2.0 * kPi) : newtonian_constant(n));
  rep.smear = smear;
  const double self_unit = smeared_self_energy(n, smear, rep.c_n);
  const auto kernel = [&](double r) {
    if (r == 0.0) return self_unit;
    return n == 1 ? rep.c_n * std::log(1.0 / r) : rep.c_n * std::pow(r, 1.0 - n);
  };
  const std::size_t N = mu.size();
  rep.cross = 2.0 * blocked_sum(N, [&](std::size_t i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < N; ++j) row += mu.weight(j) * kernel(dist(mu.point(i), mu.point(j)));
    return mu.weight(i) * row;
  });
  rep.self = self_unit * blocked_sum(N, [&](std::size_t i) { return mu.weight(i) * mu.weight(i); });
  rep.energy = rep.cross + rep.self;
  return rep;
}

CapacityBound capacity_lower_bound(const PointMeasure& candidate, double smear, double c_n) {
  const double m = candidate.total_mass();
  if (!(m > 0.0)) throw Error(ErrorKind::kEmptyDomain, "candidate has no mass");
  std::vector<double> w = candidate.weights();
  for (double& x : w) x /= m;
  CapacityBound cb;
  cb.energy = riesz_energy(candidate.with_weights(std::move(w)), smear, c_n);
  const double I = cb.energy.energy;
  cb.inverse_energy = I > 0.0 ? 1.0 / I : 0.0;
  if (candidate.n() == 1) {
    cb.scale_warning = !(I > 0.0);
    cb.value = std::exp(-I / cb.energy.c_n);
  } else {
    cb.value = cb.inverse_energy;
  }
  return cb;
}

bool dense_sub_ball(const PointMeasure& mu, const Ball& b, double lo, double hi, double threshold, Ball* witness) {
  const double h = mu.resolution_floor();
  lo = std::max(lo, h);
  if (hi < lo) return false;
  const auto prof = radial_profile(mu, b.center, hi);
  const int n = mu.n();
  const auto check = [&](double r, double mass) {
    if (mass / ipow(r, n) >= threshold) {
      if (witness) *witness = Ball{b.center, r};
      return true;
    }
    return false;
  };
  double mass_lo = 0.0;
  std::size_t k = 0;
  while (k < prof.radius.size() && prof.radius[k] <= lo) mass_lo = prof.cumulative_mass[k++];
  if (check(lo, mass_lo)) return true;
  for (; k < prof.radius.size(); ++k) {
    if (k + 1 < prof.radius.size() && prof.radius[k + 1] == prof.radius[k]) continue;
    if (check(prof.radius[k], prof.cumulative_mass[k])) return true;
  }
  return false;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double nx = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / nx, my = sy / nx;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

DimScanTrajectory scan_one(const PointMeasure& mu, const Point& x, double radius, const DimScanParams& p,
                           double alpha, double delta1) {
  const int n = mu.n();
  const double h = mu.resolution_floor();
  const double jump = std::ldexp(1.0, -(2 * n + 2) * p.m);
  const double window_lo = std::pow(delta1, 2 * n + 2);
  DimScanTrajectory tr;
  tr.start = x;
  Ball bk{x, radius};
  double pk = p_mu(mu, bk);
  tr.steps.push_back(DimScanStep{bk.radius, pk, mass_in_ball(mu, bk), 0, 0.0, true});
  tr.stop_reason = "max-steps";
  for (int k = 0; k < p.max_steps; ++k) {
    const Ball b = bk.scaled(0.5);
    if (b.radius < h) {
      tr.stop_reason = "resolution";
      break;
    }
    DimScanStep& cur = tr.steps.back();
    Ball next;
    const DensityStats ds = density_stats(mu, b, 4.0);
    if (!ds.is_p_doubling) {
      cur.option = 1;
      cur.lemma_check = p_mu(mu, bk) > 1.5 * ds.p_mu;
      next = b;
    } else {
      if (delta1 * b.radius < h) {
        tr.stop_reason = "resolution";
        break;
      }
      Ball w;
      if (dense_sub_ball(mu, b, window_lo * b.radius, delta1 * b.radius, alpha * ds.theta, &w)) {
        tr.stop_reason = "good-ball";
        tr.witness = w;
        break;
      }
      cur.option = 2;
      next = b.scaled(jump);
    }
    const double pn = p_mu(mu, next);
    cur.ratio = pn / pk;
    tr.max_ratio = std::max(tr.max_ratio, cur.ratio);
    const double lo = 0.5 * jump * bk.radius, hi = 0.5 * bk.radius;
    if (next.radius < lo * (1.0 - 1e-12) || next.radius > hi * (1.0 + 1e-12)) tr.sandwich_ok = false;
    bk = next;
    pk = pn;
    tr.steps.push_back(DimScanStep{bk.radius, pk, mass_in_ball(mu, bk), 0, 0.0, true});
  }
  std::vector<double> lx, ly;
  for (const auto& s : tr.steps) {
    if (s.mass > 0.0) {
      lx.push_back(std::log(s.radius));
      ly.push_back(std::log(s.mass));
    }
  }
  tr.measured_exponent = lx.size() >= 2 ? fit_slope(lx, ly) : 0.0;
  return tr;
}

}  // namespace

DimScanResult dimension_scan(const PointMeasure& mu, const Ball& start, const std::vector<Point>& start_points,
                             const DimScanParams& params) {
  if (params.m < 3) throw Error(ErrorKind::kInvalidArgument, "m must be at least 3");
  if (!(start.radius > 0.0)) throw Error(ErrorKind::kInvalidArgument, "start radius must be positive");
  const int n = mu.n();
  DimScanResult res;
  res.m = params.m;
  res.alpha = params.alpha > 0.0 ? params.alpha : std::ldexp(1.0, -(n + 3));
  res.delta1 = std::ldexp(1.0, -params.m);
  res.beta = ((2 * n + 2) * params.m - 1) * std::log(2.0) / std::log(4.0 / 3.0);
  res.scan_exponent = n + 1.0 / res.beta;
  res.trajectories.resize(start_points.size());
  parallel_for(
      start_points.size(),
      [&](std::size_t i) {
        res.trajectories[i] = scan_one(mu, start_points[i], start.radius, params, res.alpha, res.delta1);
      },
      1);
  res.certified = !res.trajectories.empty();
  for (const auto& t : res.trajectories) {
    if (t.stop_reason == "good-ball") res.certified = false;
  }
  return res;
}

}  // namespace gmt
