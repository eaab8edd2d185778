#include "gmt/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "gmt/density.hpp"
#include "gmt/error.hpp"

namespace gmt {

double LatticeParams::Cd(int n) const { return 4.0 * std::pow(A0, n); }

bool Lattice::contains(int outer, int inner) const {
  const int lvl = cube(outer).level;
  int c = inner;
  while (c >= 0 && cube(c).level > lvl) c = cube(c).parent;
  return c == outer;
}

namespace {

struct CellKey {
  std::array<std::int64_t, kMaxDim> c{};
  bool operator==(const CellKey& o) const { return c == o.c; }
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k.c) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Hash grid over selected centers with cell size equal to the search radius,
// so every center within that radius sits in the 3^d neighbouring cells.
class CenterGrid {
 public:
  CenterGrid(const PointMeasure& mu, double cell) : mu_(mu), cell_(cell) {}

  void insert(std::size_t atom) { cells_[key(mu_.point(atom))].push_back(atom); }

  // Nearest center within `radius` (<= cell), ties to the lower atom index.
  // Returns npos when none.
  std::size_t nearest(const Point& p, double radius) const {
    std::size_t best = npos;
    double best_d2 = radius * radius;
    visit(p, [&](std::size_t a) {
      const double d2 = dist2(mu_.point(a), p);
      if (d2 < best_d2 || (d2 == best_d2 && (best == npos || a < best))) {
        best = a;
        best_d2 = d2;
      }
    });
    return best;
  }

  bool any_within(const Point& p, double radius) const {
    bool found = false;
    const double r2 = radius * radius;
    visit(p, [&](std::size_t a) {
      if (!found && dist2(mu_.point(a), p) <= r2) found = true;
    });
    return found;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  CellKey key(const Point& p) const {
    CellKey k;
    for (int a = 0; a < mu_.dim(); ++a) k.c[a] = static_cast<std::int64_t>(std::floor(p[a] / cell_));
    return k;
  }

  template <class F>
  void visit(const Point& p, F&& f) const {
    const CellKey base = key(p);
    const int d = mu_.dim();
    int total = 1;
    for (int a = 0; a < d; ++a) total *= 3;
    for (int m = 0; m < total; ++m) {
      CellKey k = base;
      int t = m;
      for (int a = 0; a < d; ++a) {
        k.c[a] += t % 3 - 1;
        t /= 3;
      }
      auto it = cells_.find(k);
      if (it == cells_.end()) continue;
      for (std::size_t a : it->second) f(a);
    }
  }

  const PointMeasure& mu_;
  double cell_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

double ball_mass(const PointMeasure& mu, const Point& c, double r) { return mass_in_ball(mu, Ball{c, r}); }

}  // namespace

int density_bucket_exp(double value, double A0, int n) {
  const double base = std::pow(A0, n);
  int k = static_cast<int>(std::floor(std::log(value) / std::log(base)));
  while (bucket_value(k, A0, n) > value) --k;
  while (bucket_value(k + 1, A0, n) <= value) ++k;
  return k;
}

double bucket_value(int exp, double A0, int n) { return std::pow(A0, static_cast<double>(exp) * n); }

Lattice build_lattice(const PointMeasure& mu, const LatticeParams& params) {
  if (mu.empty()) throw Error(ErrorKind::kInvalidArgument, "lattice of an empty measure");
  if (!(params.A0 > 2.0)) throw Error(ErrorKind::kInvalidArgument, "A0 must exceed 2");
  if (!(params.C0 > 1.0)) throw Error(ErrorKind::kInvalidArgument, "C0 must exceed 1");
  if (params.max_depth < 0) throw Error(ErrorKind::kInvalidArgument, "max_depth must be >= 0");

  Lattice lat;
  lat.params = params;
  lat.n = mu.n();
  const double bound = mu.bounding_ball().radius;
  // 10 r_0 covers the support diameter with room for rounding, so level 0 is a single cube.
  lat.root_scale = bound > 0.0 ? bound * (1.0 + 1e-9) / 5.0 : 1.0;
  const double h = mu.resolution_floor();
  auto radius_at = [&](int k) { return lat.root_scale * std::pow(params.A0, -k); };

  int depth = params.max_depth;
  lat.resolution_reached = false;
  for (int k = 0; k <= params.max_depth; ++k) {
    if (radius_at(k) <= h) {
      depth = k;
      lat.resolution_reached = true;
      break;
    }
  }

  const std::size_t N = mu.size();
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mu.weight(a) > mu.weight(b); });

  // centers[k]: level-k net in selection order; parent_center[k][c] for k >= 1.
  std::vector<std::vector<std::size_t>> centers(depth + 1);
  std::vector<std::unordered_map<std::size_t, std::size_t>> parent_center(depth + 1);
  std::vector<CenterGrid> grids;
  grids.reserve(depth + 1);
  std::vector<char> is_center(N, 0);
  for (int k = 0; k <= depth; ++k) {
    const double sep = 10.0 * radius_at(k);
    grids.emplace_back(mu, sep);
    CenterGrid& g = grids.back();
    if (k > 0) {
      for (std::size_t c : centers[k - 1]) {
        centers[k].push_back(c);
        g.insert(c);
      }
    }
    for (std::size_t a : order) {
      if (is_center[a]) continue;
      if (g.any_within(mu.point(a), sep)) continue;
      is_center[a] = 1;
      centers[k].push_back(a);
      g.insert(a);
    }
    if (k > 0) {
      const double prev_sep = 10.0 * radius_at(k - 1);
      for (std::size_t c : centers[k]) {
        const std::size_t p = grids[k - 1].nearest(mu.point(c), prev_sep);
        parent_center[k][c] = p;
      }
    }
  }

  lat.levels.assign(depth + 1, {});
  std::vector<std::unordered_map<std::size_t, int>> cube_of_center(depth + 1);
  for (int k = 0; k <= depth; ++k) {
    const double r = radius_at(k);
    for (std::size_t c : centers[k]) {
      Cube q;
      q.id = static_cast<int>(lat.cubes.size());
      q.level = k;
      q.center_atom = c;
      q.center = mu.point(c);
      q.radius = r;
      q.side = 56.0 * params.C0 * r;
      if (k > 0) {
        q.parent = cube_of_center[k - 1].at(parent_center[k].at(c));
        lat.cubes[q.parent].children.push_back(q.id);
      }
      cube_of_center[k][c] = q.id;
      lat.levels[k].push_back(q.id);
      lat.cubes.push_back(std::move(q));
    }
  }

  lat.atom_cube.assign(depth + 1, std::vector<int>(N, -1));
  const double fine_sep = 10.0 * radius_at(depth);
  for (std::size_t a = 0; a < N; ++a) {
    const std::size_t c = grids[depth].nearest(mu.point(a), fine_sep);
    int q = cube_of_center[depth].at(c);
    for (int k = depth; k >= 0; --k) {
      lat.atom_cube[k][a] = q;
      lat.cubes[q].atoms.push_back(a);
      lat.cubes[q].mass += mu.weight(a);
      q = lat.cubes[q].parent;
    }
  }

  if (!lat.resolution_reached) {
    for (int q : lat.levels[depth]) {
      if (lat.cube(q).atoms.size() > 1) {
        throw Error(ErrorKind::kDepthExhausted,
                    "max_depth reached above the resolution floor with unresolved cubes");
      }
    }
  }

  for (auto& q : lat.cubes) q.mass_2b = ball_mass(mu, q.center, 56.0 * q.radius);
  for (auto& q : lat.cubes) {
    const CubeFlags f = cube_flags(lat, q.id, mu);
    q.db = f.db;
    q.p_doubling = f.p_doubling;
    q.bucket = f.bucket;
    q.bucket_exp = f.bucket_exp;
    q.p_mu = f.p_mu;
  }
  return lat;
}

CubeFlags cube_flags(const Lattice& lat, int qi, const PointMeasure& mu) {
  const Cube& q = lat.cube(qi);
  const int n = lat.n;
  CubeFlags f;
  f.db = ball_mass(mu, q.center, 100.0 * q.radius) <= lat.params.C0 * ball_mass(mu, q.center, q.radius);
  for (int r = qi; r >= 0; r = lat.cube(r).parent) {
    const Cube& R = lat.cube(r);
    const double m2b = R.mass_2b > 0.0 ? R.mass_2b : ball_mass(mu, R.center, 56.0 * R.radius);
    f.p_mu += q.side / ipow(R.side, n + 1) * m2b;
  }
  const double m2b = q.mass_2b > 0.0 ? q.mass_2b : ball_mass(mu, q.center, 56.0 * q.radius);
  f.density_2b = m2b / ipow(q.side, n);
  f.p_doubling = f.p_mu <= lat.params.Cd(n) * f.density_2b;
  f.bucket_exp = density_bucket_exp(f.density_2b, lat.params.A0, n);
  f.bucket = bucket_value(f.bucket_exp, lat.params.A0, n);
  return f;
}

std::vector<int> hd_k(const Lattice& lat, int qi, int k) {
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "hd_k requires k >= 1");
  const Cube& q = lat.cube(qi);
  const int threshold = q.bucket_exp + k;
  std::vector<int> out;
  if (q.level + 1 > lat.depth()) return out;
  std::vector<int> stack;
  const auto& lvl = lat.levels[q.level + 1];
  for (auto it = lvl.rbegin(); it != lvl.rend(); ++it) stack.push_back(*it);
  while (!stack.empty()) {
    const int p = stack.back();
    stack.pop_back();
    const Cube& P = lat.cube(p);
    if (P.bucket_exp >= threshold) {
      out.push_back(p);
      continue;
    }
    for (auto it = P.children.rbegin(); it != P.children.rend(); ++it) stack.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Same-generation cubes making up lambda Q in union-of-cubes mode.
std::vector<int> region_generation(const Lattice& lat, const PointMeasure& mu, int qi, double lambda) {
  const Cube& q = lat.cube(qi);
  std::vector<int> gen;
  for (std::size_t a : mu.query(Ball{q.center, lambda * q.side})) gen.push_back(lat.atom_cube[q.level][a]);
  std::sort(gen.begin(), gen.end());
  gen.erase(std::unique(gen.begin(), gen.end()), gen.end());
  return gen;
}

}  // namespace

std::vector<std::size_t> region_atoms(const Lattice& lat, const PointMeasure& mu, int qi, double lambda,
                                      RegionMode mode) {
  const Cube& q = lat.cube(qi);
  if (mode == RegionMode::kMetricBall) return mu.query(Ball{q.center, lambda * 28.0 * q.radius});
  std::vector<std::size_t> atoms;
  for (int p : region_generation(lat, mu, qi, lambda)) {
    const auto& pa = lat.cube(p).atoms;
    atoms.insert(atoms.end(), pa.begin(), pa.end());
  }
  std::sort(atoms.begin(), atoms.end());
  return atoms;
}

std::vector<int> cubes_in_region(const Lattice& lat, const PointMeasure& mu, int qi, double lambda,
                                 RegionMode mode) {
  const Cube& q = lat.cube(qi);
  std::vector<int> out;
  std::vector<int> stack;
  std::vector<char> inside;
  if (mode == RegionMode::kMetricBall) {
    inside.assign(mu.size(), 0);
    for (std::size_t a : region_atoms(lat, mu, qi, lambda, mode)) inside[a] = 1;
    std::vector<int> gen;
    for (std::size_t a = 0; a < mu.size(); ++a) {
      if (inside[a]) gen.push_back(lat.atom_cube[q.level][a]);
    }
    std::sort(gen.begin(), gen.end());
    gen.erase(std::unique(gen.begin(), gen.end()), gen.end());
    stack.assign(gen.rbegin(), gen.rend());
  } else {
    auto gen = region_generation(lat, mu, qi, lambda);
    stack.assign(gen.rbegin(), gen.rend());
  }
  while (!stack.empty()) {
    const int p = stack.back();
    stack.pop_back();
    const Cube& P = lat.cube(p);
    bool all_in = true;
    if (mode == RegionMode::kMetricBall) {
      for (std::size_t a : P.atoms) {
        if (!inside[a]) {
          all_in = false;
          break;
        }
      }
    }
    if (all_in) out.push_back(p);
    for (auto it = P.children.rbegin(); it != P.children.rend(); ++it) stack.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

CubeEnergy energies(const Lattice& lat, const PointMeasure& mu, int qi, double lambda, double M0,
                    RegionMode mode) {
  if (lambda < 1.0) throw Error(ErrorKind::kInvalidArgument, "lambda must be >= 1");
  const Cube& q = lat.cube(qi);
  CubeEnergy e;
  e.truncation_level = lat.depth();

  int max_exp = q.bucket_exp;
  for (const auto& c : lat.cubes) max_exp = std::max(max_exp, c.bucket_exp);

  auto e_inf_over = [&](const std::vector<int>& region) {
    std::vector<char> member(lat.cubes.size(), 0);
    for (int p : region) member[p] = 1;
    double best = 0.0;
    for (int k = 1; k <= max_exp - q.bucket_exp; ++k) {
      double s = 0.0;
      for (int p : hd_k(lat, qi, k)) {
        if (!member[p]) continue;
        const Cube& P = lat.cube(p);
        s += std::sqrt(P.side / q.side) * P.bucket * P.bucket * P.mass;
      }
      best = std::max(best, s);
    }
    return best;
  };

  const auto region = cubes_in_region(lat, mu, qi, lambda, mode);
  for (int p : region) {
    const Cube& P = lat.cube(p);
    e.e_lambda += std::pow(P.side / q.side, 0.75) * P.bucket * P.bucket * P.mass;
  }
  e.e_inf = e_inf_over(region);

  const auto region9 = cubes_in_region(lat, mu, qi, 9.0, mode);
  e.e_inf_9q = e_inf_over(region9);
  for (std::size_t a : region_atoms(lat, mu, qi, 9.0, mode)) e.mass_9q += mu.weight(a);
  e.db_flag = e.e_inf_9q >= M0 * M0 * q.bucket * q.bucket * e.mass_9q;
  return e;
}

namespace {

void weighted_mean(const std::vector<std::size_t>& atoms, const VectorField& f, const PointMeasure& mu,
                   std::vector<double>& mean) {
  mean.assign(f.components, 0.0);
  double m = 0.0;
  for (std::size_t a : atoms) {
    m += mu.weight(a);
    for (int c = 0; c < f.components; ++c) mean[c] += mu.weight(a) * f.at(a, c);
  }
  for (auto& v : mean) v /= m;
}

}  // namespace

VectorField delta_q(const Lattice& lat, int qi, const VectorField& f, const PointMeasure& mu) {
  if (f.atoms() != mu.size()) throw Error(ErrorKind::kInvalidArgument, "field length differs from atom count");
  const Cube& q = lat.cube(qi);
  VectorField out(mu.size(), f.components);
  std::vector<double> mq, ms;
  weighted_mean(q.atoms, f, mu, mq);
  if (q.children.empty()) {
    for (std::size_t a : q.atoms) {
      for (int c = 0; c < f.components; ++c) out.at(a, c) = f.at(a, c) - mq[c];
    }
    return out;
  }
  for (int s : q.children) {
    const auto& sa = lat.cube(s).atoms;
    weighted_mean(sa, f, mu, ms);
    for (std::size_t a : sa) {
      for (int c = 0; c < f.components; ++c) out.at(a, c) = ms[c] - mq[c];
    }
  }
  return out;
}

double centered_norm2(const Cube& q, const VectorField& f, const PointMeasure& mu) {
  std::vector<double> mq;
  weighted_mean(q.atoms, f, mu, mq);
  double s = 0.0;
  for (std::size_t a : q.atoms) {
    for (int c = 0; c < f.components; ++c) {
      const double t = f.at(a, c) - mq[c];
      s += mu.weight(a) * t * t;
    }
  }
  return s;
}

BoundaryMass boundary_mass(const Lattice& lat, const PointMeasure& mu, int qi, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::kInvalidArgument, "boundary width must be positive");
  const Cube& q = lat.cube(qi);
  const auto& owner = lat.atom_cube[q.level];
  const double t = lambda * q.side;
  BoundaryMass out;
  std::vector<std::size_t> near;
  const auto touches = [&](std::size_t a, bool want_inside) {
    mu.query(Ball{mu.point(a), t}, near);
    return std::any_of(near.begin(), near.end(), [&](std::size_t b) { return (owner[b] == qi) == want_inside; });
  };
  for (std::size_t a : mu.query(Ball{q.center, 3.5 * 28.0 * q.radius})) {
    out.ball += mu.weight(a);
    if (owner[a] != qi && touches(a, true)) out.outer += mu.weight(a);
  }
  for (std::size_t a : q.atoms) {
    if (touches(a, false)) out.inner += mu.weight(a);
  }
  return out;
}

}  // namespace gmt
