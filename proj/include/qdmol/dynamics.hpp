#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qdmol/basis.hpp"
#include "qdmol/coulomb.hpp"
#include "qdmol/model.hpp"

namespace qdmol {

using StateVector = Eigen::VectorXcd;

// Amplitudes over |0>,|1> or |00>,|01>,|10>,|11> (control (x) target).
struct QuantumState {
  StateVector amplitudes;

  static QuantumState basis(std::size_t dim, std::size_t index);
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }
  std::vector<double> populations() const;
  double norm() const { return amplitudes.norm(); }
};

enum class DriveTarget { kSingle, kControl, kTarget };

struct PulseSegment {
  DriveField drive;
  double duration = 0.0;  // ps
  DriveTarget target = DriveTarget::kSingle;
  // Two-qubit runs only: floating electrodes switch the Coulomb coupling on.
  ElectrodeState electrodes = ElectrodeState::kFloating;
};

struct PulseSchedule {
  std::vector<PulseSegment> segments;

  double total_duration() const;
  void append(const PulseSchedule& other);
  void validate() const;
};

// Same physical drive played backwards: reversed segment order with carrier
// phases chosen so cos(w s + phi') = cos(w (T - s) + phi).
PulseSchedule time_reversed(const PulseSchedule& schedule);

// Lab-frame H for one qubit, energies measured from e0, no rotating-wave
// approximation: diag(0, D) + Q E cos(w t + phi) [[z00, z01], [z01, z11]].
Eigen::Matrix2cd hamiltonian_1q(const QubitParams& q, const DriveField& drive, double t);

// Diagonal E(c,t) = e_c + e_t + u[c][t] (from E(0,0)); the drive couples only
// the addressed qubit's two levels, with that qubit's dipole matrix.
Eigen::Matrix4cd hamiltonian_2q(const QubitParams& control, const QubitParams& target,
                                const CoulombTable& table, const DriveField& drive,
                                DriveTarget addressed, double t);

using HamiltonianFn = std::function<Eigen::MatrixXcd(double t, const PulseSegment& segment)>;

HamiltonianFn one_qubit_system(const QubitParams& q);
HamiltonianFn two_qubit_system(const QubitParams& control, const QubitParams& target,
                               const CoulombTable& table);
// Picks `coupled` for segments with floating electrodes, `uncoupled` otherwise.
HamiltonianFn two_qubit_system(const QubitParams& control, const QubitParams& target,
                               const CoulombTable& coupled, const CoulombTable& uncoupled);

struct EvolveOptions {
  double dt = 0.002;            // ps, upper bound; segments are split evenly
  std::size_t sample_every = 0;  // steps between samples; 0 = endpoints only
  double min_steps_per_period = 40.0;
};

struct Trajectory {
  std::vector<double> times;  // strictly increasing, starts at 0
  std::vector<QuantumState> states;

  const QuantumState& final_state() const { return states.back(); }
};

// Fourth-order Magnus stepping: H is sampled at the two Gauss points of each
// step and psi(t+h) = exp(-i H_eff h / hbar) psi(t) with
// H_eff = (H1 + H2)/2 + i sqrt(3) h / (12 hbar) [H1, H2], which is Hermitian,
// so every step is exactly unitary. Throws kStepTooLarge if a driven
// segment's period is shorter than min_steps_per_period * dt.
Trajectory evolve(const HamiltonianFn& hamiltonian, const QuantumState& psi0,
                  const PulseSchedule& schedule, const EvolveOptions& options = {});

// exp(-i H h / hbar) for a Hermitian H (meV) over h (ps).
Eigen::MatrixXcd step_propagator(const Eigen::MatrixXcd& h_mev, double h_ps);

// H_eff of one Magnus step of length h_ps starting at t.
Eigen::MatrixXcd magnus_hamiltonian(const HamiltonianFn& hamiltonian, const PulseSegment& segment,
                                    double t, double h_ps);

}  // namespace qdmol
