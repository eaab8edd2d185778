#pragma once

#include <vector>

#include "gmt/point_measure.hpp"

namespace gmt {

struct DensityStats {
  double theta = 0.0;
  double p_mu = 0.0;
  bool is_p_doubling = false;
  double constant_used = 0.0;
};

inline constexpr double kThetaStarWindow = 8.0;

double mass_in_ball(const PointMeasure& mu, const Ball& b);

// mu(B) / r^n.
double theta(const PointMeasure& mu, const Ball& b);

// sum_j 2^-j theta(2^j B), summed explicitly until 2^j B covers the bounding
// ball of the support, then closed via the geometric tail.
double p_mu(const PointMeasure& mu, const Ball& b);

bool is_p_doubling(const PointMeasure& mu, const Ball& b, double c);
DensityStats density_stats(const PointMeasure& mu, const Ball& b, double c);

// sup of mu(B(x, r)) / r^n over r in [r_min, r_max]; only r_min and the atom
// distances inside the range are candidates.
double m_n(const PointMeasure& mu, const Point& x, double r_min, double r_max);

// Windowed stand-in for the upper density: sup over r in [h, window * h].
double theta_star_upper(const PointMeasure& mu, const Point& x, double window = kThetaStarWindow);

// Indices j in [1, N] with 2^j B1 (P, 4)-doubling, N = floor(log2(rad B0 / rad B1)).
struct DoublingScales {
  int N = 0;
  std::vector<int> doubling;
};
DoublingScales doubling_scales(const PointMeasure& mu, const Ball& b0, const Ball& b1);

// Lower bound on the number of (P, 4)-doubling balls 2^j B1 implied by the
// growth chain when B0 is (P, c0)-doubling and theta(B1) >= alpha theta(B0).
double doubling_scale_lower_bound(int N, int n, double c0, double alpha);

// Sorted distances from x to the atoms within max_radius, paired with the
// running mass up to and including each distance. Ties keep index order.
struct RadialProfile {
  std::vector<double> radius;
  std::vector<double> cumulative_mass;
};
RadialProfile radial_profile(const PointMeasure& mu, const Point& x, double max_radius);

}  // namespace gmt
