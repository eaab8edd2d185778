#pragma once

#include <functional>
#include <vector>

#include "gmt/point_measure.hpp"

namespace gmt {

// Codimension-one plane {y : <y - base, normal> = 0} with its beta value.
struct PlaneFit {
  Point base{};
  Point normal{};
  double beta = 0.0;
  double p = 2.0;
  bool empty = false;
  bool converged = true;
};

// (r^-n sum_{y in b} w (dist(y, L) / r)^p)^{1/p}.
double plane_beta(const PointMeasure& mu, const Ball& b, const Point& base, const Point& normal, double p);

PlaneFit beta2(const PointMeasure& mu, const Ball& b);
PlaneFit beta_p(const PointMeasure& mu, const Ball& b, double p);

struct JonesWolffConfig {
  double step_log2 = 0.5;  // grid ratio 2^-step
  bool exact = false;      // integrate the piecewise power law between atom distances
};

// Midpoint rule in log r on the grid r_max 2^{-j step}, last cell clipped at r_min.
double log_midpoint_integral(const std::function<double(double)>& f, double r_min, double r_max, double step_log2);

// J^2 = int beta_2(x, r)^2 theta(x, r) dr / r over [r_min, r_max].
double jones_wolff_sq(const PointMeasure& mu, const Point& x, double r_min, double r_max,
                      const JonesWolffConfig& cfg = {});
double jones_wolff(const PointMeasure& mu, const Point& x, double r_min, double r_max,
                   const JonesWolffConfig& cfg = {});

// sum over atoms in b0 of w J^2(x; h, 2 rad b0).
double square_function_lhs(const PointMeasure& mu, const Ball& b0, const JonesWolffConfig& cfg = {});

// Smallest eigenvalue of a symmetric d x d matrix stored row-major.
double min_eigenvalue(const double* m, int d, double* eigenvector = nullptr);

}  // namespace gmt
