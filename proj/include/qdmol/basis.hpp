#pragma once

#include "qdmol/eigensolver.hpp"
#include "qdmol/grid.hpp"
#include "qdmol/model.hpp"

namespace qdmol {

// Two-level parameters of one qubit as seen by the drive: splitting e1 - e0
// and the dipole matrix <i|z|j> about the barrier midpoint.
struct QubitParams {
  double splitting = 0.0;  // meV
  double z00 = 0.0;        // nm
  double z01 = 0.0;
  double z11 = 0.0;

  double resonance_thz() const;
  QubitParams with_splitting(double mev) const {
    QubitParams p = *this;
    p.splitting = mev;
    return p;
  }
};

// |0> = ground state (lower dot), |1> = first excited state (upper dot).
// psi1's sign is fixed so that z01 > 0.
struct QubitBasis {
  double e0 = 0.0;  // meV
  double e1 = 0.0;
  Wavefunction psi0;
  Wavefunction psi1;
  double z00 = 0.0;  // nm, about the barrier midpoint
  double z01 = 0.0;
  double z11 = 0.0;
  double resonance_thz = 0.0;
  double dipole_origin_z = 0.0;  // nm, absolute

  QubitParams params() const { return {e1 - e0, z00, z01, z11}; }
};

inline constexpr double kMinSplitting = 0.1;  // meV

// (e1 - e0) / h in THz; throws kInvalidArgument unless e1 > e0.
double resonance_frequency(double e0, double e1);

// <a| (z - origin) |b> by grid quadrature.
double dipole_element(const Wavefunction& a, const Wavefunction& b, double origin_z);

// Solves for the two lowest states and extracts the dipole matrix. Throws
// kDegenerateSplitting if e1 - e0 < 0.1 meV.
QubitBasis build_basis(const MoleculeGeometry& geom, const Grid3D& grid,
                       const SolverOptions& options = {}, double tolerance = 1e-6);
QubitBasis basis_from_states(const MoleculeGeometry& geom, const EigenResult& states);

}  // namespace qdmol
