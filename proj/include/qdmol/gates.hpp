#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qdmol/basis.hpp"
#include "qdmol/coulomb.hpp"
#include "qdmol/dynamics.hpp"

namespace qdmol {

enum class GateKind { kX, kH, kCNOT };

const char* to_string(GateKind kind);

struct GateSpec {
  GateKind kind = GateKind::kX;
  DriveTarget qubit = DriveTarget::kSingle;  // ignored for CNOT
};

struct CalibratedGate {
  GateSpec spec;
  PulseSchedule schedule;
  double residual = 1.0;  // distance from the calibration target, < 1e-2 when valid
  // Relative phase arg(a1 / a0) of the output from |0> (driven frame phases are
  // recorded, not corrected).
  double output_phase = 0.0;
};

inline constexpr double kMaxCalibrationResidual = 1e-2;
inline constexpr double kSelectivityRatio = 5.0;

// Rotating-wave pi time, pi hbar / (Q z01 E_z). Throws kZeroCoupling.
double pi_pulse_seed(double z01, double e_z);

// Resonant pi time under the full lab-frame drive: starts from the seed and
// locates the first population maximum of |1> by simulation.
double pi_pulse_duration(const QubitParams& q, double e_z, const EvolveOptions& options = {});

CalibratedGate make_x(const QubitParams& q, double e_z, const EvolveOptions& options = {});

// pi/2 pulse calibrated to an equal split from |0>.
CalibratedGate make_hadamard(const QubitParams& q, double e_z, const EvolveOptions& options = {});

// One target-addressed segment at the conditional frequency w_{T+U}, pi area
// on the target transition with the control in |1>. Throws
// kInsufficientSplitting when the conditional splitting is below 5 hbar
// Omega_R.
CalibratedGate make_cnot(const QubitParams& control, const QubitParams& target,
                         const CoulombTable& table, double e_z, const EvolveOptions& options = {});

// Everything the compiler needs to calibrate gates for a two-qubit register.
struct GateContext {
  QubitParams control;
  QubitParams target;
  CoulombTable coupled;    // electrodes floating
  CoulombTable uncoupled;  // electrodes grounded
  double e_z = 1.5;        // mV/nm
  EvolveOptions evolve;
};

// Calibrates and concatenates. Single-qubit gates run with the electrodes
// grounded at the bare resonance; CNOT segments float them. Throws
// kAddressingCollision when the two resonances are closer than 5 hbar Omega_R.
PulseSchedule compile(const std::vector<GateSpec>& circuit, const GateContext& context);

// Minimum over basis inputs of the output population on perm[input].
double truth_table_fidelity(const HamiltonianFn& system, const PulseSchedule& schedule,
                            const std::vector<std::size_t>& perm,
                            const EvolveOptions& options = {});

}  // namespace qdmol
