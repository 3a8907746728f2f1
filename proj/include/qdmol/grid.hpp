#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "qdmol/model.hpp"

namespace qdmol {

// Interior nodes of a Dirichlet box. Node i along an axis sits at
// lo + (i + 1) * spacing with spacing = extent / (points + 1); the box faces
// themselves carry psi = 0 and are not stored.
struct Grid3D {
  Vec3 center;
  std::array<double, 3> extents{};      // nm
  std::array<std::size_t, 3> points{};  // interior node counts

  double spacing(int axis) const { return extents[axis] / static_cast<double>(points[axis] + 1); }
  double lo(int axis) const;
  double coord(int axis, std::size_t i) const { return lo(axis) + static_cast<double>(i + 1) * spacing(axis); }
  Vec3 node(std::size_t i, std::size_t j, std::size_t k) const {
    return {coord(0, i), coord(1, j), coord(2, k)};
  }
  std::size_t size() const { return points[0] * points[1] * points[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (k * points[1] + j) * points[0] + i;
  }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }

  bool operator==(const Grid3D& o) const;
};

inline constexpr std::size_t kMinGridPoints = 16;
inline constexpr double kMinPadding = 8.0;  // nm

// Box centred on the molecule axis, `padding` nm clear of both dots on every side.
Grid3D grid_for(const MoleculeGeometry& geom, std::array<std::size_t, 3> points = {48, 48, 64},
                double padding = kMinPadding);

// Throws kGridTooSmall if the grid has fewer than 16 nodes on an axis or does
// not clear the molecule by kMinPadding.
void check_grid_contains(const MoleculeGeometry& geom, const Grid3D& grid);

// Real scalar field sampled on a grid; eigenstates and charge densities.
struct Wavefunction {
  Grid3D grid;
  std::vector<double> values;

  double norm() const;  // sqrt(sum |psi|^2 dV)
  void normalize();
};

double inner_product(const Wavefunction& a, const Wavefunction& b);

}  // namespace qdmol
