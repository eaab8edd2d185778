#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmt/point_measure.hpp"

namespace gmt {

// Kinds: segment, lipschitz_graph, circle, corner_cantor, cantor_density,
// plane_patch_3d, grid_square, atom_cloud.
struct GeneratorSpec {
  std::string kind = "segment";
  std::size_t count = 256;      // atoms (segment, graph, circle, cloud) or per side (patch, square)
  int generation = 3;           // Cantor generations
  double amplitude = 0.05;      // graph height
  double frequency = 1.0;       // graph oscillations over the unit interval
  double radius = 1.0;          // circle radius
  double half_length = 0.5;     // segment half length about its center
  Point center{0.5, 0.0, 0.0, 0.0};  // segment center
  double mass = 1.0;            // total mass
  std::vector<double> side_ratios;   // cantor_density: child side / parent side per generation, in (0, 1/2)
  int dim = 2;                  // atom_cloud ambient dimension
  std::uint64_t seed = 1;       // atom_cloud only
};

PointMeasure generate(const GeneratorSpec& spec);

}  // namespace gmt
