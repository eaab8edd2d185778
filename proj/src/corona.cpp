#include "gmt/corona.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmt/density.hpp"
#include "gmt/error.hpp"
#include "gmt/parallel.hpp"

namespace gmt {

const char* to_string(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::kSigma: return "sigma";
    case SurrogateKind::kSigmaTilde: return "sigma_tilde";
    case SurrogateKind::kMu0: return "mu0";
    case SurrogateKind::kEta: return "eta";
  }
  return "unknown";
}

namespace {

std::vector<char> membership(const PointMeasure& mu, const Ball& b) {
  std::vector<char> in(mu.size(), 0);
  for (std::size_t a : mu.query(b)) in[a] = 1;
  return in;
}

bool all_in(const Cube& q, const std::vector<char>& in) {
  for (std::size_t a : q.atoms) {
    if (!in[a]) return false;
  }
  return true;
}

bool any_in(const Cube& q, const std::vector<char>& in) {
  for (std::size_t a : q.atoms) {
    if (in[a]) return true;
  }
  return false;
}

template <class Pred, class Descend>
void top_down(const Lattice& lat, const std::vector<int>& roots, Pred take, Descend descend, std::vector<int>& out) {
  std::vector<int> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    const int q = stack.back();
    stack.pop_back();
    if (take(q)) {
      out.push_back(q);
      continue;
    }
    if (!descend(q)) continue;
    const auto& ch = lat.cube(q).children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

StoppingFamily build_stopping(const PointMeasure& mu, const Lattice& lat, const Ball& b0, const CoronaParams& params) {
  if (!(params.theta0 > 0.0 && params.theta0 < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "theta0 must lie in (0, 1)");
  }
  StoppingFamily fam;
  fam.params = params;
  const int n = lat.n;
  const auto in15 = membership(mu, b0.scaled(1.5));
  const auto in18 = membership(mu, b0.scaled(1.8));
  top_down(
      lat, lat.levels[0],
      [&](int q) { return any_in(lat.cube(q), in15) && all_in(lat.cube(q), in18); },
      [&](int q) { return any_in(lat.cube(q), in15); }, fam.fmax);
  for (int q : fam.fmax) {
    const auto& a = lat.cube(q).atoms;
    fam.r0_atoms.insert(fam.r0_atoms.end(), a.begin(), a.end());
  }
  std::sort(fam.r0_atoms.begin(), fam.r0_atoms.end());
  for (std::size_t a : fam.r0_atoms) fam.mu_r0 += mu.weight(a);

  const double theta_b0 = theta(mu, b0);
  top_down(
      lat, fam.fmax,
      [&](int q) {
        const Cube& c = lat.cube(q);
        const double r = 3.5 * 28.0 * c.radius;
        return mass_in_ball(mu, Ball{c.center, r}) / ipow(r, n) <= params.theta0 * theta_b0;
      },
      [](int) { return true; }, fam.ld);
  for (int q : fam.ld) fam.ld_mass += lat.cube(q).mass;

  const double shrink = std::pow(params.theta0, 1.0 / (n + 1));
  for (int q : fam.ld) {
    const Cube& Q = lat.cube(q);
    const double limit = shrink * Q.side * (1.0 + 1e-12);
    int level = Q.level;
    while (level <= lat.depth() && lat.cube(lat.levels[level][0]).side > limit) ++level;
    if (level > lat.depth()) {
      throw Error(ErrorKind::kDepthExhausted, "lattice too shallow for the stopping side length");
    }
    std::vector<int> st;
    top_down(
        lat, {q}, [&](int p) { return lat.cube(p).side <= limit && lat.cube(p).db; }, [](int) { return true; },
        st);
    for (int p : st) fam.stop_mass += lat.cube(p).mass;
    fam.stop_all.insert(fam.stop_all.end(), st.begin(), st.end());
    fam.stop.push_back(std::move(st));
  }
  std::sort(fam.stop_all.begin(), fam.stop_all.end());

  std::vector<int> by_mass = fam.stop_all;
  std::stable_sort(by_mass.begin(), by_mass.end(),
                   [&](int a, int b) { return lat.cube(a).mass > lat.cube(b).mass; });
  const double target = (1.0 - 2.0 * params.eps0) * fam.mu_r0;
  for (int q : by_mass) {
    if (fam.stop0_mass >= target) break;
    fam.stop0.push_back(q);
    fam.stop0_mass += lat.cube(q).mass;
  }
  fam.stop0_threshold_met = fam.stop0_mass >= target;
  std::sort(fam.stop0.begin(), fam.stop0.end());
  return fam;
}

std::vector<std::size_t> inner_region(const PointMeasure& mu, const Lattice& lat, int qi, double kappa0) {
  if (!(kappa0 > 0.0 && kappa0 < 1.0)) throw Error(ErrorKind::kInvalidArgument, "kappa0 must lie in (0, 1)");
  const Cube& q = lat.cube(qi);
  const double reach = kappa0 * q.side;
  std::vector<std::size_t> out;
  std::vector<std::size_t> near;
  for (std::size_t a : q.atoms) {
    mu.query(Ball{mu.point(a), reach}, near);
    bool keep = true;
    for (std::size_t b : near) {
      if (lat.atom_cube[q.level][b] != qi && dist(mu.point(a), mu.point(b)) < reach) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(a);
  }
  return out;
}

std::vector<Point> sphere_samples(const Point& center, double radius, int dim, std::size_t count) {
  std::vector<Point> pts;
  pts.reserve(count);
  const double pi = std::acos(-1.0);
  if (dim == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double t = 2.0 * pi * static_cast<double>(k) / static_cast<double>(count);
      Point p = center;
      p[0] += radius * std::cos(t);
      p[1] += radius * std::sin(t);
      pts.push_back(p);
    }
    return pts;
  }
  if (dim == 3) {
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = golden * static_cast<double>(k);
      Point p = center;
      p[0] += radius * rho * std::cos(t);
      p[1] += radius * rho * std::sin(t);
      p[2] += radius * z;
      pts.push_back(p);
    }
    return pts;
  }
  throw Error(ErrorKind::kInvalidArgument, "sphere sampling supports d = 2 and d = 3");
}

std::vector<Point> ball_samples(const Point& center, double radius, int dim, std::size_t count) {
  const double pi = std::acos(-1.0);
  const double volume = dim == 2 ? pi : (dim == 3 ? 4.0 * pi / 3.0 : pi * pi / 2.0);
  const double a = radius * std::pow(volume / static_cast<double>(std::max<std::size_t>(count, 1)), 1.0 / dim);
  const auto m = static_cast<long>(std::floor(radius / a));
  std::vector<Point> pts;
  std::array<long, kMaxDim> z{};
  for (int i = 0; i < dim; ++i) z[i] = -m;
  for (;;) {
    Point off{};
    for (int i = 0; i < dim; ++i) off[i] = a * static_cast<double>(z[i]);
    if (norm2(off) <= radius * radius) pts.push_back(center + off);
    int i = 0;
    while (i < dim) {
      if (++z[i] <= m) break;
      z[i] = -m;
      ++i;
    }
    if (i == dim) break;
  }
  return pts;
}

namespace {

struct SurrogateBuilder {
  SurrogateMeasure s;
  std::vector<Point> pts;
  std::vector<double> ws;

  void keep(const PointMeasure& mu, std::size_t a) {
    pts.push_back(mu.point(a));
    ws.push_back(mu.weight(a));
    s.kept_source.push_back(a);
  }

  void replace(int cube, double mass, const std::vector<Point>& samples) {
    s.cubes.push_back(cube);
    s.cube_begin.push_back(pts.size());
    s.cube_mass.push_back(mass);
    const double w = mass / static_cast<double>(samples.size());
    for (const auto& p : samples) {
      pts.push_back(p);
      ws.push_back(w);
    }
  }

  SurrogateMeasure finish(const PointMeasure& mu) {
    s.kept_atoms = s.kept_source.size();
    s.cube_begin.push_back(pts.size());
    s.measure = PointMeasure(mu.dim(), std::move(pts), std::move(ws), mu.resolution_floor());
    return std::move(s);
  }
};

}  // namespace

SurrogateMeasure build_sigma(const PointMeasure& mu, const Lattice& lat, const Ball& b0, int k, std::size_t samples,
                             bool solid) {
  if (k < 0 || k > lat.depth()) throw Error(ErrorKind::kInvalidArgument, "level outside the lattice");
  if (samples == 0) throw Error(ErrorKind::kInvalidArgument, "sample count must be positive");
  const auto in2 = membership(mu, b0.scaled(2.0));
  SurrogateBuilder bld;
  bld.s.kind = solid ? SurrogateKind::kSigmaTilde : SurrogateKind::kSigma;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    if (!in2[a]) bld.keep(mu, a);
  }
  for (int q : lat.levels[k]) {
    const Cube& Q = lat.cube(q);
    double m = 0.0;
    for (std::size_t a : Q.atoms) {
      if (in2[a]) m += mu.weight(a);
    }
    if (m == 0.0) continue;
    const double rad = Q.radius / 10.0;
    bld.replace(q, m,
                solid ? ball_samples(Q.center, rad, mu.dim(), samples) : sphere_samples(Q.center, rad, mu.dim(), samples));
  }
  return bld.finish(mu);
}

SurrogateMeasure build_mu0(const PointMeasure& mu, const Lattice& lat, const StoppingFamily& fam) {
  std::vector<char> keep(mu.size(), 1);
  for (std::size_t a : fam.r0_atoms) keep[a] = 0;
  for (int q : fam.stop0) {
    for (std::size_t a : inner_region(mu, lat, q, fam.params.kappa0)) keep[a] = 1;
  }
  SurrogateBuilder bld;
  bld.s.kind = SurrogateKind::kMu0;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    if (keep[a]) bld.keep(mu, a);
  }
  return bld.finish(mu);
}

SurrogateMeasure build_eta(const PointMeasure& mu, const Lattice& lat, const StoppingFamily& fam, std::size_t samples) {
  std::vector<char> in_r0(mu.size(), 0);
  for (std::size_t a : fam.r0_atoms) in_r0[a] = 1;
  SurrogateBuilder bld;
  bld.s.kind = SurrogateKind::kEta;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    if (!in_r0[a]) bld.keep(mu, a);
  }
  for (int q : fam.stop0) {
    const Cube& Q = lat.cube(q);
    double m = 0.0;
    for (std::size_t a : inner_region(mu, lat, q, fam.params.kappa0)) m += mu.weight(a);
    if (m == 0.0) continue;
    bld.replace(q, m, ball_samples(Q.center, Q.radius / 4.0, mu.dim(), samples));
  }
  return bld.finish(mu);
}

double surrogate_mass_error(const SurrogateMeasure& s) {
  double worst = 0.0;
  for (std::size_t k = 0; k < s.cubes.size(); ++k) {
    std::vector<double> w(s.measure.weights().begin() + static_cast<long>(s.cube_begin[k]),
                          s.measure.weights().begin() + static_cast<long>(s.cube_begin[k + 1]));
    const double carried = compensated_sum(w);
    worst = std::max(worst, std::fabs(carried - s.cube_mass[k]) / s.cube_mass[k]);
  }
  return worst;
}

std::vector<double> restricted_maximal(const PointMeasure& mu, const Ball& b) {
  const PointMeasure nu = mu.restricted(b);
  std::vector<double> out(nu.size());
  const double h = mu.resolution_floor();
  const double top = std::max(h, 2.0 * b.radius);
  parallel_for(nu.size(), [&](std::size_t i) { out[i] = m_n(nu, nu.point(i), h, top); }, 16);
  return out;
}

GoodBallReport good_ball_report(const PointMeasure& mu, const Ball& b, double c2) {
  const auto ids = mu.query(b);
  if (ids.empty()) throw Error(ErrorKind::kEmptyDomain, "good-ball test on a ball without mass");
  const auto mx = restricted_maximal(mu, b);
  GoodBallReport r;
  double mass = 0.0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    r.integral += mu.weight(ids[k]) * mx[k];
    mass += mu.weight(ids[k]);
  }
  r.bound = c2 * mass / ipow(b.radius, mu.n()) * mass;
  r.good = r.integral <= r.bound;
  return r;
}

bool good_ball(const PointMeasure& mu, const Ball& b, double c2) { return good_ball_report(mu, b, c2).good; }

FrostmanResult frostman_extract(const PointMeasure& mu, const Ball& b, double c2) {
  if (!good_ball(mu, b, c2)) throw Error(ErrorKind::kPreconditionViolated, "ball is not good for this constant");
  const auto ids = mu.query(b);
  const auto mx = restricted_maximal(mu, b);
  FrostmanResult f;
  for (std::size_t i : ids) f.mass_b += mu.weight(i);
  const double th = f.mass_b / ipow(b.radius, mu.n());
  f.scale = 2.0 * c2 * th;
  std::vector<Point> pts;
  std::vector<double> ws;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (mx[k] <= f.scale) {
      f.subset.push_back(ids[k]);
      f.mass_e += mu.weight(ids[k]);
      pts.push_back(mu.point(ids[k]));
      ws.push_back(mu.weight(ids[k]) / f.scale);
    }
  }
  f.content_bound = ipow(b.radius, mu.n()) / (8.0 * c2);
  f.sigma = PointMeasure(mu.dim(), std::move(pts), std::move(ws), mu.resolution_floor());
  return f;
}

double hausdorff_content_upper(const PointMeasure& mu, int n) {
  if (mu.empty()) return 0.0;
  const double h = mu.resolution_floor();
  const double diam = 2.0 * mu.bounding_ball().radius;
  double best = ipow(std::max(diam, h), n);
  for (double s = diam; s >= h; s *= 0.5) {
    std::vector<char> covered(mu.size(), 0);
    std::size_t count = 0;
    for (std::size_t a = 0; a < mu.size(); ++a) {
      if (covered[a]) continue;
      ++count;
      for (std::size_t b : mu.query(Ball{mu.point(a), s})) covered[b] = 1;
    }
    best = std::min(best, static_cast<double>(count) * ipow(s, n));
  }
  return best;
}

}  // namespace gmt
