#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qdmol/basis.hpp"
#include "qdmol/grid.hpp"
#include "qdmol/model.hpp"

namespace qdmol {

// Charge per nm^3 on a grid (unit total for an electron).
struct ChargeDensity {
  Grid3D grid;
  std::vector<double> values;

  static ChargeDensity of(const Wavefunction& psi);
  double total() const;
};

// Weighted sum of densities on a common grid; throws kGridMismatch otherwise.
ChargeDensity mix(const ChargeDensity& a, double wa, const ChargeDensity& b, double wb);

enum class PlaneOrientation { kXZ, kYZ, kXY };

const char* to_string(PlaneOrientation p);
PlaneOrientation plane_orientation_from_string(const std::string& s);

// Axis-aligned rectangle: (u, v) = (x, z), (y, z) or (x, y); `offset` is the
// fixed remaining coordinate.
struct PlaneSpec {
  PlaneOrientation orientation = PlaneOrientation::kXZ;
  double offset = 0.0;
  double u_min = 0.0, u_max = 0.0;
  double v_min = 0.0, v_max = 0.0;
  std::size_t u_points = 61, v_points = 61;

  double u(std::size_t i) const;
  double v(std::size_t j) const;
  Vec3 point(std::size_t i, std::size_t j) const;
  void validate() const;
};

inline constexpr double kReadoutMargin = 10.0;  // nm

// x-z plane through the molecule axis around the upper dot with `margin` nm
// clearance; throws kInvalidArgument for margin < 10 nm.
PlaneSpec default_readout_plane(const MoleculeGeometry& geom, std::size_t points = 61,
                                double margin = kReadoutMargin);
// On the axis, `height` nm above the upper dot's top face.
Vec3 default_probe(const MoleculeGeometry& geom, double height = 10.0);

// V(r) = (e^2 / 4 pi eps0 eps_r) sum_cells rho dV / |r - r_cell| in mV; cells
// within three spacings of r use the 1/r kernel averaged over the cell.
double electrostatic_potential(const ChargeDensity& rho, double eps_r, const Vec3& r);

struct PotentialMap {
  PlaneSpec plane;
  std::vector<double> values;  // mV, row-major: v outer, u inner
  Vec3 probe_point;
  double probe_value = 0.0;    // mV

  double at(std::size_t i, std::size_t j) const { return values[j * plane.u_points + i]; }
};

PotentialMap potential_map(const ChargeDensity& rho, double eps_r, const PlaneSpec& plane,
                           const Vec3& probe);
PotentialMap potential_map(const Wavefunction& psi, double eps_r, const PlaneSpec& plane,
                           const Vec3& probe);

// V_|1>(probe) - V_|0>(probe) in mV. Throws kInvalidArgument if the probe lies
// inside either dot.
double readout_contrast(const QubitBasis& basis, const MoleculeGeometry& geom, double eps_r,
                        const Vec3& probe);

}  // namespace qdmol
