#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gmt/point_measure.hpp"

namespace gmt {

// c_n = 1 / ((n - 1) sigma_n), sigma_n the area of the unit sphere in R^{n+1}.
double newtonian_constant(int n);
double unit_sphere_area(int dim);

struct EnergyReport {
  double energy = 0.0;
  double cross = 0.0;        // off-diagonal pairs
  double self = 0.0;         // smeared atoms
  std::string kernel;        // "newtonian" or "logarithmic"
  double c_n = 0.0;          // kernel constant; 1/(2 pi) for the logarithmic kernel
  double smear = 0.0;
};

// Self-energy of a unit mass spread uniformly on a ball of radius s.
double smeared_self_energy(int n, double s, double c_n);

// Off-diagonal pair sum plus each atom smeared to a uniform ball of radius `smear`.
// Coincident distinct atoms are treated as one smeared ball. c_n <= 0 selects
// the standard constant.
EnergyReport riesz_energy(const PointMeasure& mu, double smear, double c_n = 0.0);

struct CapacityBound {
  double value = 0.0;        // 1/I (newtonian) or exp(-2 pi I) (logarithmic)
  double inverse_energy = 0.0;
  bool scale_warning = false;  // logarithmic energy <= 0, so 1/I carries no bound
  EnergyReport energy;
};

// Capacity lower bound from the candidate normalized to a probability measure.
CapacityBound capacity_lower_bound(const PointMeasure& candidate, double smear, double c_n = 0.0);

struct DimScanParams {
  int m = 3;
  double alpha = 0.0;   // <= 0 selects 2^{-(n+3)}
  int max_steps = 400;
};

struct DimScanStep {
  double radius = 0.0;
  double p_mu = 0.0;
  double mass = 0.0;
  int option = 0;        // 1: halve, 2: long jump
  double ratio = 0.0;    // P(B_{k+1}) / P(B_k)
  bool lemma_check = true;  // option 1 only: P(2B) > 1.5 P(B)
};

struct DimScanTrajectory {
  Point start{};
  std::vector<DimScanStep> steps;  // steps[k] describes B_{k+1}; the last has no successor
  std::string stop_reason;         // "resolution", "good-ball" or "max-steps"
  Ball witness{};                  // dense sub-ball when stop_reason is good-ball
  double measured_exponent = 0.0;  // least-squares slope of log mu(B_k) in log rad(B_k)
  bool sandwich_ok = true;
  double max_ratio = 0.0;
};

struct DimScanResult {
  int m = 3;
  double alpha = 0.0;
  double delta1 = 0.0;
  double beta = 0.0;
  double scan_exponent = 0.0;      // n + 1/beta, certified only when no trajectory met a good ball
  bool certified = false;
  std::vector<DimScanTrajectory> trajectories;
};

// First-step balls have radius start.radius centered at each start point.
DimScanResult dimension_scan(const PointMeasure& mu, const Ball& start, const std::vector<Point>& start_points,
                             const DimScanParams& params = {});

// Largest density over concentric balls with radius in [lo, hi] clipped at h.
bool dense_sub_ball(const PointMeasure& mu, const Ball& b, double lo, double hi, double threshold, Ball* witness);

}  // namespace gmt
