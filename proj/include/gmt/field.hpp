#pragma once

#include <cstddef>
#include <vector>

namespace gmt {

// Per-atom values with a fixed number of components, row-major.
struct VectorField {
  int components = 1;
  std::vector<double> values;

  VectorField() = default;
  VectorField(std::size_t atoms, int comps) : components(comps), values(atoms * comps, 0.0) {}

  std::size_t atoms() const { return components ? values.size() / components : 0; }
  double& at(std::size_t i, int c) { return values[i * components + c]; }
  double at(std::size_t i, int c) const { return values[i * components + c]; }
};

}  // namespace gmt
