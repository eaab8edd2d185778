#include "gmt/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmt/density.hpp"
#include "gmt/error.hpp"
#include "gmt/parallel.hpp"
#include "gmt/riesz.hpp"

namespace gmt {

namespace {

constexpr double kMaxMultiplier = 4.0;

class Problem {
 public:
  Problem(const PointMeasure& mu, const std::vector<std::size_t>& r0, const Ball& b1, const VariationalOptions& opt)
      : mu_(mu), r0_(r0), opt_(opt), n_(mu.n()) {
    if (!(opt.p > 1.0 && opt.p <= 2.0)) throw Error(ErrorKind::kInvalidArgument, "p must lie in (1, 2]");
    if (!(opt.lambda > 0.0 && opt.lambda < 1.0)) throw Error(ErrorKind::kInvalidArgument, "lambda must lie in (0, 1)");
    if (opt.N < 1) throw Error(ErrorKind::kInvalidArgument, "N must be positive");
    if (r0.empty()) throw Error(ErrorKind::kEmptyDomain, "R0 holds no atoms");
    in_r0_.assign(mu.size(), 0);
    for (std::size_t a : r0) {
      if (a >= mu.size()) throw Error(ErrorKind::kInvalidArgument, "R0 atom out of range");
      in_r0_[a] = 1;
    }
    for (int k = 0; k <= opt.N; ++k) {
      const Ball b = b1.scaled(std::ldexp(1.0, k));
      balls_.push_back(mu.query(b));
      double m = 0.0;
      for (std::size_t i : balls_.back()) m += mu.weight(i);
      mu_ball_.push_back(m);
      std::vector<char> in(mu.size(), 0);
      for (std::size_t i : balls_.back()) in[i] = 1;
      in_ball_.push_back(std::move(in));
    }
    if (!(mu_ball_[0] > 0.0)) throw Error(ErrorKind::kEmptyDomain, "B1 holds no mass");
    theta_b1_ = mu_ball_[0] / ipow(b1.radius, n_);
    sigma_p_ = std::pow(theta_b1_, opt.p) * mu_ball_[0];
    lam_sig_ = opt.lambda * sigma_p_;

    const VectorField field = kernel_sum(mu);
    double mass = 0.0;
    for (std::size_t a : r0) {
      mass += mu.weight(a);
      for (int c = 0; c < mu.dim(); ++c) c_[c] += mu.weight(a) * field.at(a, c);
    }
    for (int c = 0; c < mu.dim(); ++c) c_[c] /= mass;
  }

  std::size_t size() const { return r0_.size(); }
  std::size_t atom(std::size_t m) const { return r0_[m]; }
  const Point& c() const { return c_; }
  double sigma_p() const { return sigma_p_; }
  double theta_b1() const { return theta_b1_; }
  double mu_b1() const { return mu_ball_[0]; }

  std::vector<double> nu_weights(const std::vector<double>& a) const {
    std::vector<double> v = mu_.weights();
    for (std::size_t m = 0; m < r0_.size(); ++m) v[r0_[m]] *= a[m];
    return v;
  }

  double phi(const Point& u) const { return std::pow(norm(u), opt_.p); }
  Point dphi(const Point& u) const {
    const double r = norm(u);
    if (r == 0.0) return Point{};
    return (opt_.p * std::pow(r, opt_.p - 2.0)) * u;
  }

  std::vector<double> nu_balls(const std::vector<double>& v) const {
    std::vector<double> out;
    for (const auto& ids : balls_) {
      out.push_back(blocked_sum(ids.size(), [&](std::size_t k) { return v[ids[k]]; }));
    }
    return out;
  }

  double barrier(const std::vector<double>& nu_b) const {
    double s = 0.0;
    for (int k = 1; k <= opt_.N; ++k) {
      if (!(nu_b[k] > 0.0)) return std::numeric_limits<double>::infinity();
      s += mu_ball_[k] / nu_b[k];
    }
    if (!(nu_b[0] > 0.0)) return std::numeric_limits<double>::infinity();
    return mu_ball_[0] / nu_b[0] + s / opt_.N;
  }

  // u_m = R nu_a (x_m) - c at each R0 atom.
  std::vector<Point> residuals(const std::vector<double>& v) const {
    const VectorField f = kernel_sum(mu_, &v);
    std::vector<Point> u(r0_.size());
    for (std::size_t m = 0; m < r0_.size(); ++m) {
      for (int c = 0; c < mu_.dim(); ++c) u[m][c] = f.at(r0_[m], c) - c_[c];
    }
    return u;
  }

  double value(const std::vector<double>& a, const std::vector<double>& v, const std::vector<Point>& u,
               const std::vector<double>& nu_b) const {
    const double data = blocked_sum(r0_.size(), [&](std::size_t m) { return v[r0_[m]] * phi(u[m]); });
    const double amax = *std::max_element(a.begin(), a.end());
    return data + lam_sig_ * (std::pow(amax, opt_.p) + barrier(nu_b));
  }

  double value(const std::vector<double>& a) const {
    const auto v = nu_weights(a);
    return value(a, v, residuals(v), nu_balls(v));
  }

  // d/da_m of the data term divided by w_m: phi(u_m) + R*_nu(chi_R0 dphi(u))(x_m).
  std::vector<double> data_gradient(const std::vector<double>& v, const std::vector<Point>& u) const {
    VectorField g(mu_.size(), mu_.dim());
    for (std::size_t m = 0; m < r0_.size(); ++m) {
      const Point d = dphi(u[m]);
      for (int c = 0; c < mu_.dim(); ++c) g.at(r0_[m], c) = d[c];
    }
    const auto adj = riesz_adjoint_apply(mu_, g, &in_r0_, &v);
    std::vector<double> out(r0_.size());
    for (std::size_t m = 0; m < r0_.size(); ++m) out[m] = phi(u[m]) + adj[r0_[m]];
    return out;
  }

  std::vector<double> gradient(const std::vector<double>& a, const std::vector<double>& v,
                               const std::vector<Point>& u, const std::vector<double>& nu_b,
                               double temperature) const {
    auto g = data_gradient(v, u);
    const double amax = *std::max_element(a.begin(), a.end());
    std::vector<double> soft(a.size());
    double z = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) z += soft[m] = std::exp((a[m] - amax) / temperature);
    const double smax = amax + temperature * std::log(z);
    const double dmax = opt_.p * std::pow(smax, opt_.p - 1.0);
    for (std::size_t m = 0; m < a.size(); ++m) {
      const std::size_t i = r0_[m];
      double bar = 0.0;
      for (int k = 0; k <= opt_.N; ++k) {
        if (in_ball_[k][i]) bar += (k == 0 ? 1.0 : 1.0 / opt_.N) * mu_ball_[k] / (nu_b[k] * nu_b[k]);
      }
      g[m] = mu_.weight(i) * (g[m] - lam_sig_ * bar) + lam_sig_ * dmax * soft[m] / z;
    }
    return g;
  }

  // Coordinate moves with incremental field updates.
  struct Incremental {
    const Problem* pb;
    std::vector<double> a;
    std::vector<double> v;
    std::vector<Point> u;
    std::vector<double> nu_b;
    double f;

    double trial(const std::vector<std::pair<std::size_t, double>>& moves, bool commit) {
      std::vector<Point> u2 = u;
      std::vector<double> nb = nu_b;
      std::vector<double> a2 = a;
      std::vector<double> v2 = v;
      const PointMeasure& mu = pb->mu_;
      for (const auto& [m, target] : moves) {
        const std::size_t i = pb->r0_[m];
        const double dv = (target - a2[m]) * mu.weight(i);
        if (dv == 0.0) continue;
        a2[m] = target;
        v2[i] += dv;
        for (std::size_t t = 0; t < u2.size(); ++t) {
          if (t != m) u2[t] += dv * riesz_kernel(mu.point(pb->r0_[t]) - mu.point(i), mu.n());
        }
        for (std::size_t k = 0; k < nb.size(); ++k) {
          if (pb->in_ball_[k][i]) nb[k] += dv;
        }
      }
      const double f2 = pb->value(a2, v2, u2, nb);
      if (commit && f2 < f) {
        a = std::move(a2);
        v = std::move(v2);
        u = std::move(u2);
        nu_b = std::move(nb);
        f = f2;
      }
      return f2;
    }
  };

  const PointMeasure& mu_;
  const std::vector<std::size_t>& r0_;
  VariationalOptions opt_;
  int n_;
  std::vector<char> in_r0_;
  std::vector<std::vector<std::size_t>> balls_;
  std::vector<std::vector<char>> in_ball_;
  std::vector<double> mu_ball_;
  double theta_b1_ = 0.0;
  double sigma_p_ = 0.0;
  double lam_sig_ = 0.0;
  Point c_{};
};

std::vector<double> project(std::vector<double> a) {
  for (double& x : a) x = std::clamp(x, 0.0, kMaxMultiplier);
  return a;
}

}  // namespace

double variational_value(const PointMeasure& mu, const std::vector<std::size_t>& r0_atoms, const Ball& b1,
                         const std::vector<double>& a, const VariationalOptions& opt) {
  Problem pb(mu, r0_atoms, b1, opt);
  if (a.size() != r0_atoms.size()) throw Error(ErrorKind::kInvalidArgument, "one multiplier per R0 atom");
  return pb.value(a);
}

VariationalState variational_minimize(const PointMeasure& mu, const std::vector<std::size_t>& r0_atoms,
                                      const Ball& b1, const VariationalOptions& opt) {
  Problem pb(mu, r0_atoms, b1, opt);
  VariationalState st;
  st.r0_atoms = r0_atoms;
  st.p = opt.p;
  st.lambda = opt.lambda;
  st.N = opt.N;
  st.c_r0 = pb.c();
  st.sigma_p = pb.sigma_p();
  st.mu_b1 = pb.mu_b1();

  std::vector<double> a(pb.size(), 1.0);
  auto v = pb.nu_weights(a);
  auto u = pb.residuals(v);
  auto nu_b = pb.nu_balls(v);
  double f = pb.value(a, v, u, nu_b);
  st.value_at_one = f;
  st.history.push_back(f);

  double step = 0.0;
  double temperature = opt.initial_temperature;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const auto g = pb.gradient(a, v, u, nu_b, std::max(temperature, 1e-6));
    temperature *= opt.temperature_decay;
    double gmax = 0.0;
    for (double x : g) gmax = std::max(gmax, std::fabs(x));
    if (gmax == 0.0) break;
    if (step == 0.0) step = 0.25 / gmax;
    step *= 2.0;
    bool accepted = false;
    for (int tries = 0; tries < 50; ++tries, step *= 0.5) {
      std::vector<double> trial(a.size());
      for (std::size_t m = 0; m < a.size(); ++m) trial[m] = a[m] - step * g[m];
      trial = project(std::move(trial));
      const auto v2 = pb.nu_weights(trial);
      const auto u2 = pb.residuals(v2);
      const auto nb2 = pb.nu_balls(v2);
      const double f2 = pb.value(trial, v2, u2, nb2);
      if (f2 < f) {
        const double decrease = f - f2;
        a = std::move(trial);
        v = v2;
        u = u2;
        nu_b = nb2;
        f = f2;
        accepted = true;
        st.history.push_back(f);
        ++st.iterations;
        if (decrease <= opt.tolerance * std::fabs(f)) it = opt.max_iterations;
        break;
      }
    }
    if (!accepted) {
      st.line_search_failed = true;
      break;
    }
  }

  if (opt.polish) {
    Problem::Incremental inc{&pb, a, v, u, nu_b, f};
    // Each sweep ends with an exact recomputation, so the recorded history is
    // monotone in the exact functional despite incremental drift.
    for (double delta = 0.5; delta >= 1e-5; delta *= 0.5) {
      for (int sweep = 0; sweep < 50; ++sweep) {
        const Problem::Incremental saved = inc;
        const double before = inc.f;
        for (std::size_t m = 0; m < inc.a.size(); ++m) {
          for (double s : {delta, -delta}) {
            const double target = std::clamp(inc.a[m] + s, 0.0, kMaxMultiplier);
            if (target != inc.a[m]) inc.trial({{m, target}}, true);
          }
        }
        // Lower every multiplier within delta of the max together.
        const double amax = *std::max_element(inc.a.begin(), inc.a.end());
        const double cap = std::max(0.0, amax - delta);
        std::vector<std::pair<std::size_t, double>> moves;
        for (std::size_t m = 0; m < inc.a.size(); ++m) {
          if (inc.a[m] > cap) moves.emplace_back(m, cap);
        }
        if (!moves.empty()) inc.trial(moves, true);
        if (!(inc.f < before)) break;
        inc.v = pb.nu_weights(inc.a);
        inc.u = pb.residuals(inc.v);
        inc.nu_b = pb.nu_balls(inc.v);
        inc.f = pb.value(inc.a, inc.v, inc.u, inc.nu_b);
        if (!(inc.f < before)) {
          inc = saved;
          break;
        }
        st.history.push_back(inc.f);
      }
    }
    a = inc.a;
  }

  v = pb.nu_weights(a);
  u = pb.residuals(v);
  nu_b = pb.nu_balls(v);
  f = pb.value(a, v, u, nu_b);
  if (f > st.value_at_one) {
    a.assign(a.size(), 1.0);
    v = pb.nu_weights(a);
    u = pb.residuals(v);
    nu_b = pb.nu_balls(v);
    f = st.value_at_one;
  }
  st.a = a;
  st.value = f;
  if (st.history.back() != f) st.history.push_back(f);
  st.nu_b1 = nu_b[0];

  // Stationarity: phi(u) + R*_nu(chi_R0 dphi(u)) at atoms of supp nu in 5/4 B0.
  const auto lhs = pb.data_gradient(v, u);
  st.stationarity_bound = 16.0 * opt.lambda * std::pow(pb.theta_b1(), opt.p);
  st.stationarity_max = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < pb.size(); ++m) {
    const std::size_t i = pb.atom(m);
    if (!(v[i] > 0.0)) continue;
    if (opt.has_b0 && !opt.b0.scaled(1.25).contains(mu.point(i))) continue;
    st.stationarity_max = std::max(st.stationarity_max, lhs[m]);
    ++st.stationarity_atoms;
  }
  if (st.stationarity_atoms == 0) st.stationarity_max = 0.0;
  return st;
}

}  // namespace gmt
