#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmt/error.hpp"
#include "gmt/parallel.hpp"
#include "gmt/riesz.hpp"

namespace gmt {

namespace {

constexpr std::size_t kLeafSize = 32;
constexpr int kOrder = 12;  // highest moment order in the far-field expansion

// Multi-indices of total degree <= kOrder in D variables, graded.
struct MultiIndexTable {
  int D = 0;
  std::vector<std::array<int, kMaxDim>> k;
  std::vector<int> degree;
  std::vector<std::array<int, kMaxDim>> minus1;  // index of k - e_j or -1
  std::vector<std::array<int, kMaxDim>> minus2;  // index of k - 2 e_j or -1

  explicit MultiIndexTable(int dim) : D(dim) {
    for (int deg = 0; deg <= kOrder; ++deg) emit(deg, 0, std::array<int, kMaxDim>{}, deg);
    const auto find = [&](std::array<int, kMaxDim> q) {
      for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] == q) return static_cast<int>(i);
      }
      return -1;
    };
    minus1.resize(k.size());
    minus2.resize(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      for (int j = 0; j < kMaxDim; ++j) {
        auto q = k[i];
        minus1[i][j] = -1;
        minus2[i][j] = -1;
        if (j >= D) continue;
        if (q[j] >= 1) {
          --q[j];
          minus1[i][j] = find(q);
          if (q[j] >= 1) {
            --q[j];
            minus2[i][j] = find(q);
          }
        }
      }
    }
  }

  void emit(int left, int axis, std::array<int, kMaxDim> cur, int deg) {
    if (axis == D - 1) {
      cur[axis] = left;
      k.push_back(cur);
      degree.push_back(deg);
      return;
    }
    for (int a = left; a >= 0; --a) {
      cur[axis] = a;
      emit(left - a, axis + 1, cur, deg);
    }
  }

  std::size_t size() const { return k.size(); }
};

struct Cell {
  Point lo{}, hi{};
  Point com{};
  double mass = 0.0;
  double extent = 0.0;  // max distance from com to an atom of the cell
  std::size_t begin = 0, end = 0;
  int left = -1, right = -1;
  std::size_t moments = 0;  // offset of (-1)^|k| sum w (y - com)^k
};

class Tree {
 public:
  explicit Tree(const PointMeasure& mu) : mu_(mu), table_(mu.dim()), perm_(mu.size()) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    if (!perm_.empty()) build(0, perm_.size());
  }

  Point evaluate(const Point& x, const KernelConfig& cfg, double theta) const {
    const int n = mu_.n();
    Point s{};
    if (cells_.empty()) return s;
    const double reach = cfg.eps <= 0.0 ? 0.0 : (cfg.smooth ? 2.0 * cfg.eps : cfg.eps);
    std::vector<double> b(table_.size());
    std::vector<int> stack;
    stack.reserve(128);
    stack.push_back(0);
    while (!stack.empty()) {
      const Cell& c = cells_[stack.back()];
      stack.pop_back();
      const Point dc = x - c.com;
      const double r2 = norm2(dc);
      bool far = c.extent * c.extent < theta * theta * r2;
      if (far && reach > 0.0) {
        double gap2 = 0.0;
        for (int a = 0; a < mu_.dim(); ++a) {
          const double g = std::max({c.lo[a] - x[a], 0.0, x[a] - c.hi[a]});
          gap2 += g * g;
        }
        far = cfg.smooth ? gap2 >= reach * reach : gap2 > reach * reach;
      }
      if (far) {
        s += far_field(c, dc, r2, n, b);
        continue;
      }
      if (c.left < 0) {
        for (std::size_t k = c.begin; k < c.end; ++k) {
          const std::size_t j = perm_[k];
          const Point d = x - mu_.point(j);
          const double q2 = norm2(d);
          if (q2 == 0.0) continue;
          double t = 1.0;
          if (cfg.eps > 0.0) {
            t = cfg.smooth ? bump_profile(std::sqrt(q2) / cfg.eps) : (q2 > cfg.eps * cfg.eps ? 1.0 : 0.0);
            if (t == 0.0) continue;
          }
          s += (t * mu_.weight(j)) * riesz_kernel(d, n);
        }
        continue;
      }
      stack.push_back(c.right);
      stack.push_back(c.left);
    }
    return s;
  }

 private:
  // K_i(X - d) = sum_k (X_i b_k + b_{k - e_i}) (-d)^k with b_k the Taylor
  // coefficients of |X|^{-(n+1)}, which obey
  // |k| r^2 b_k = -(2|k| - 2 + m) sum_j X_j b_{k-e_j} - (|k| - 2 + m) sum_j b_{k-2e_j}.
  Point far_field(const Cell& c, const Point& X, double r2, int n, std::vector<double>& b) const {
    const int D = mu_.dim();
    const double m = n + 1;
    const double ir2 = 1.0 / r2;
    const double* M = moments_.data() + c.moments;
    b[0] = std::pow(r2, -0.5 * m);
    for (std::size_t i = 1; i < table_.size(); ++i) {
      const int deg = table_.degree[i];
      double s1 = 0.0, s2 = 0.0;
      for (int j = 0; j < D; ++j) {
        if (table_.minus1[i][j] >= 0) s1 += X[j] * b[table_.minus1[i][j]];
        if (table_.minus2[i][j] >= 0) s2 += b[table_.minus2[i][j]];
      }
      b[i] = -((2 * deg - 2 + m) * s1 + (deg - 2 + m) * s2) * ir2 / deg;
    }
    double sb = 0.0;
    Point f{};
    for (std::size_t i = 0; i < table_.size(); ++i) {
      sb += M[i] * b[i];
      for (int j = 0; j < D; ++j) {
        const int up = table_.minus1[i][j];
        if (up >= 0) f[j] += M[i] * b[up];
      }
    }
    for (int j = 0; j < D; ++j) f[j] += X[j] * sb;
    return f;
  }

  int build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(cells_.size());
    cells_.push_back(Cell{});
    Cell c;
    c.begin = begin;
    c.end = end;
    c.lo = c.hi = mu_.point(perm_[begin]);
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t j = perm_[k];
      const Point& p = mu_.point(j);
      for (int a = 0; a < mu_.dim(); ++a) {
        c.lo[a] = std::min(c.lo[a], p[a]);
        c.hi[a] = std::max(c.hi[a], p[a]);
      }
      c.mass += mu_.weight(j);
      c.com += mu_.weight(j) * p;
    }
    c.com = (1.0 / c.mass) * c.com;
    double e2 = 0.0;
    for (std::size_t k = begin; k < end; ++k) e2 = std::max(e2, dist2(mu_.point(perm_[k]), c.com));
    c.extent = std::sqrt(e2);
    c.moments = moments_.size();
    moments_.resize(moments_.size() + table_.size(), 0.0);
    std::vector<double> pw(static_cast<std::size_t>(kMaxDim) * (kOrder + 1));
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t j = perm_[k];
      const Point d = c.com - mu_.point(j);  // -(y - com)
      for (int a = 0; a < mu_.dim(); ++a) {
        pw[a * (kOrder + 1)] = 1.0;
        for (int e = 1; e <= kOrder; ++e) pw[a * (kOrder + 1) + e] = pw[a * (kOrder + 1) + e - 1] * d[a];
      }
      for (std::size_t i = 0; i < table_.size(); ++i) {
        double t = mu_.weight(j);
        for (int a = 0; a < mu_.dim(); ++a) t *= pw[a * (kOrder + 1) + table_.k[i][a]];
        moments_[c.moments + i] += t;
      }
    }
    if (end - begin > kLeafSize && e2 > 0.0) {
      int axis = 0;
      for (int a = 1; a < mu_.dim(); ++a) {
        if (c.hi[a] - c.lo[a] > c.hi[axis] - c.lo[axis]) axis = a;
      }
      const double split = 0.5 * (c.lo[axis] + c.hi[axis]);
      auto mid_it = std::stable_partition(perm_.begin() + begin, perm_.begin() + end,
                                          [&](std::size_t j) { return mu_.point(j)[axis] < split; });
      std::size_t mid = static_cast<std::size_t>(mid_it - perm_.begin());
      if (mid == begin || mid == end) mid = begin + (end - begin) / 2;
      c.left = build(begin, mid);
      c.right = build(mid, end);
    }
    cells_[id] = c;
    return id;
  }

  const PointMeasure& mu_;
  MultiIndexTable table_;
  std::vector<std::size_t> perm_;
  std::vector<Cell> cells_;
  std::vector<double> moments_;
};

}  // namespace

std::vector<Point> treecode_riesz(const PointMeasure& mu, const std::vector<Point>& targets, const KernelConfig& cfg,
                                  double opening_angle) {
  if (!(opening_angle >= 0.0 && opening_angle < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "opening angle must lie in [0, 1)");
  }
  const Tree tree(mu);
  std::vector<Point> out(targets.size());
  parallel_for(targets.size(), [&](std::size_t t) { out[t] = tree.evaluate(targets[t], cfg, opening_angle); }, 64);
  return out;
}

}  // namespace gmt
