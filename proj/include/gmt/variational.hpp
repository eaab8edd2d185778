#pragma once

#include <cstddef>
#include <vector>

#include "gmt/point_measure.hpp"

namespace gmt {

struct VariationalOptions {
  double p = 2.0;
  double lambda = 0.5;
  int N = 4;
  int max_iterations = 200;
  double tolerance = 1e-10;          // relative decrease that ends the descent
  double initial_temperature = 0.5;  // softmax temperature for the max term
  double temperature_decay = 0.9;
  bool polish = true;                // coordinate pattern search after descent
  Ball b0{};                         // stationarity is measured on atoms of 5/4 b0
  bool has_b0 = false;
};

// Per-atom multipliers a on R0; nu_a = mu off R0 plus a mu on R0.
struct VariationalState {
  std::vector<double> a;             // parallel to r0_atoms
  std::vector<std::size_t> r0_atoms;
  double p = 2.0;
  double lambda = 0.5;
  int N = 0;
  Point c_r0{};
  double sigma_p = 0.0;              // theta(B1)^p mu(B1)
  double value = 0.0;                // F(a)
  double value_at_one = 0.0;         // F(1)
  double nu_b1 = 0.0;
  double mu_b1 = 0.0;
  std::vector<double> history;       // F after each accepted step
  int iterations = 0;
  bool line_search_failed = false;
  double stationarity_max = 0.0;     // largest left side of the stationarity inequality
  double stationarity_bound = 0.0;   // 16 lambda theta(B1)^p
  std::size_t stationarity_atoms = 0;
};

// Value of the functional for multipliers a (parallel to r0_atoms).
double variational_value(const PointMeasure& mu, const std::vector<std::size_t>& r0_atoms, const Ball& b1,
                         const std::vector<double>& a, const VariationalOptions& opt);

VariationalState variational_minimize(const PointMeasure& mu, const std::vector<std::size_t>& r0_atoms,
                                      const Ball& b1, const VariationalOptions& opt = {});

}  // namespace gmt
