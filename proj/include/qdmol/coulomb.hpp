#pragma once

#include <cstddef>
#include <vector>

#include "qdmol/grid.hpp"
#include "qdmol/model.hpp"

namespace qdmol {

struct QubitBasis;
struct QubitParams;

// Inter-qubit Coulomb energies in meV. u[c][t] is the interaction of the
// control electron in state c (dot c+1) with the target electron in state t
// (dot t+3).
struct CoulombTable {
  double u[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  // (u11 - u10) - (u01 - u00): how much the target transition moves when the
  // control flips.
  double effective_shift() const { return (u[1][1] - u[1][0]) - (u[0][1] - u[0][0]); }

  // Only |11> is shifted, by `shift`; the level scheme used in the CN gate
  // figures.
  static CoulombTable conditional(double shift);
};

struct PointCharge {
  Vec3 r;
  double q = 0.0;
};

// Discrete charge distribution, charges in units of e.
struct ChargeCloud {
  std::vector<PointCharge> points;

  double total() const;
  Vec3 centroid() const;
};

// |psi|^2 dV per cell, translated by `offset`. `coarsen` > 1 lumps blocks of
// coarsen^3 cells into one charge at the block's charge centroid; cells below
// `relative_cutoff` times the largest cell charge are dropped.
ChargeCloud charge_cloud(const Wavefunction& psi, const Vec3& offset = {},
                         std::size_t coarsen = 1, double relative_cutoff = 0.0);

// (1439.96 / eps_r) sum_ab q_a q_b / |r_a - r_b| by direct double sum with
// compensated accumulation. Both clouds must carry unit total charge.
// Throws kOverlappingSupport if two charges coincide.
double coulomb_integral(const ChargeCloud& a, const ChargeCloud& b, double eps_r);

// Both clouds collapsed onto their centroids.
double coulomb_point_estimate(const ChargeCloud& a, const ChargeCloud& b, double eps_r);

// Densities of each qubit's |0>, |1> on its own grid; the target molecule is
// expected to be solved in its own frame (axis at target.axis_x()) and is
// translated by `target_offset` before the integrals.
CoulombTable build_coulomb_table(const QubitBasis& control, const QubitBasis& target,
                                 double eps_r, std::size_t coarsen = 2,
                                 const Vec3& target_offset = {});

// exp(-pi s / g): leading mode of a charge screened by two grounded planes a
// gap g apart, seen at lateral distance s.
double plate_screening_factor(double lateral_distance, double plane_gap);

// Smallest s/g for which exp(-pi s/g) * u drops below `threshold` meV.
double required_separation_ratio(double u_mev, double threshold_mev = 1e-7);

// Identity when the electrodes float; every entry times the plate screening
// factor when they are grounded.
CoulombTable screened_interaction(const GateGeometry& gate, const CoulombTable& table);

// THz. target_plus/minus: target transition with the control in |1>/|0>;
// control_plus/minus: control transition with the target in |1>/|0>.
struct ConditionalResonances {
  double target_plus = 0.0;
  double target_minus = 0.0;
  double control_plus = 0.0;
  double control_minus = 0.0;
};

ConditionalResonances conditional_resonances(const QubitParams& control, const QubitParams& target,
                                             const CoulombTable& table);

}  // namespace qdmol
