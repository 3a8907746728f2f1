#include "qdmol/basis.hpp"

#include <cmath>
#include <string>

#include "qdmol/error.hpp"
#include "qdmol/units.hpp"

namespace qdmol {

double QubitParams::resonance_thz() const { return units::energy_to_thz(splitting); }

double resonance_frequency(double e0, double e1) {
  if (!(e1 > e0)) {
    throw Error(ErrorCode::kInvalidArgument, "resonance_frequency: need e1 > e0");
  }
  return units::energy_to_thz(e1 - e0);
}

double dipole_element(const Wavefunction& a, const Wavefunction& b, double origin_z) {
  if (!(a.grid == b.grid)) throw Error(ErrorCode::kGridMismatch, "dipole_element: grid mismatch");
  const auto& g = a.grid;
  const std::size_t plane = g.points[0] * g.points[1];
  double s = 0.0;
  for (std::size_t k = 0; k < g.points[2]; ++k) {
    const double z = g.coord(2, k) - origin_z;
    double layer = 0.0;
    for (std::size_t p = k * plane; p < (k + 1) * plane; ++p) layer += a.values[p] * b.values[p];
    s += z * layer;
  }
  return s * g.cell_volume();
}

QubitBasis basis_from_states(const MoleculeGeometry& geom, const EigenResult& states) {
  if (states.energies.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "basis needs at least two eigenstates");
  }
  QubitBasis b;
  b.e0 = states.energies[0];
  b.e1 = states.energies[1];
  if (b.e1 - b.e0 < kMinSplitting) {
    throw Error(ErrorCode::kDegenerateSplitting,
                "qubit levels are degenerate (e1 - e0 = " + std::to_string(b.e1 - b.e0) +
                    " meV < 0.1 meV), states not addressable");
  }
  b.psi0 = states.states[0];
  b.psi1 = states.states[1];
  b.dipole_origin_z = geom.barrier_mid_z();
  b.z01 = dipole_element(b.psi0, b.psi1, b.dipole_origin_z);
  if (b.z01 < 0) {
    for (double& v : b.psi1.values) v = -v;
    b.z01 = -b.z01;
  }
  b.z00 = dipole_element(b.psi0, b.psi0, b.dipole_origin_z);
  b.z11 = dipole_element(b.psi1, b.psi1, b.dipole_origin_z);
  b.resonance_thz = resonance_frequency(b.e0, b.e1);
  return b;
}

QubitBasis build_basis(const MoleculeGeometry& geom, const Grid3D& grid,
                       const SolverOptions& options, double tolerance) {
  const auto op = discretize(geom, grid);
  return basis_from_states(geom, solve_lowest(op, 2, tolerance, options));
}

}  // namespace qdmol
