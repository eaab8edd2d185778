#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "gmt/variational.hpp"

namespace oracle {

// Direct evaluation of the functional in long double.
struct Functional {
  const gmt::PointMeasure& mu;
  std::vector<std::size_t> r0;
  gmt::Ball b1;
  gmt::VariationalOptions opt;
  std::array<long double, gmt::kMaxDim> c{};

  Functional(const gmt::PointMeasure& m, std::vector<std::size_t> r, const gmt::Ball& b, const gmt::VariationalOptions& o)
      : mu(m), r0(std::move(r)), b1(b), opt(o) {
    const std::vector<double> ones(r0.size(), 1.0);
    long double mass = 0.0L;
    for (std::size_t a : r0) {
      const auto f = field(ones, a);
      for (int k = 0; k < mu.dim(); ++k) c[k] += mu.weight(a) * f[k];
      mass += mu.weight(a);
    }
    for (int k = 0; k < mu.dim(); ++k) c[k] /= mass;
  }

  long double weight(const std::vector<double>& a, std::size_t i) const {
    for (std::size_t m = 0; m < r0.size(); ++m) {
      if (r0[m] == i) return static_cast<long double>(a[m]) * mu.weight(i);
    }
    return mu.weight(i);
  }

  std::array<long double, gmt::kMaxDim> field(const std::vector<double>& a, std::size_t i) const {
    std::array<long double, gmt::kMaxDim> f{};
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (j == i) continue;
      long double d2 = 0.0L;
      for (int k = 0; k < mu.dim(); ++k) {
        const long double d = static_cast<long double>(mu.point(i)[k]) - mu.point(j)[k];
        d2 += d * d;
      }
      const long double s = weight(a, j) / std::pow(d2, (mu.dim()) / 2.0L);
      for (int k = 0; k < mu.dim(); ++k) f[k] += s * (static_cast<long double>(mu.point(i)[k]) - mu.point(j)[k]);
    }
    return f;
  }

  long double ball_mass(const std::vector<double>* a, double radius) const {
    long double m = 0.0L;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (gmt::dist(mu.point(i), b1.center) <= radius) m += a ? weight(*a, i) : mu.weight(i);
    }
    return m;
  }

  long double sigma_p() const {
    const long double m = ball_mass(nullptr, b1.radius);
    return std::pow(m / std::pow(static_cast<long double>(b1.radius), mu.n()), static_cast<long double>(opt.p)) * m;
  }

  long double operator()(const std::vector<double>& a) const {
    long double data = 0.0L;
    for (std::size_t i : r0) {
      const auto f = field(a, i);
      long double u2 = 0.0L;
      for (int k = 0; k < mu.dim(); ++k) u2 += (f[k] - c[k]) * (f[k] - c[k]);
      data += weight(a, i) * std::pow(u2, static_cast<long double>(opt.p) / 2.0L);
    }
    long double bar = 0.0L;
    for (int k = 1; k <= opt.N; ++k) {
      const double r = std::ldexp(b1.radius, k);
      bar += ball_mass(nullptr, r) / ball_mass(&a, r);
    }
    bar = ball_mass(nullptr, b1.radius) / ball_mass(&a, b1.radius) + bar / opt.N;
    const long double amax = *std::max_element(a.begin(), a.end());
    return data + opt.lambda * sigma_p() * (std::pow(amax, static_cast<long double>(opt.p)) + bar);
  }
};

}  // namespace oracle
