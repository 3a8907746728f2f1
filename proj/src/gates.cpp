#include "qdmol/gates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "qdmol/error.hpp"
#include "qdmol/units.hpp"

namespace qdmol {

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::kX: return "X";
    case GateKind::kH: return "H";
    case GateKind::kCNOT: return "CNOT";
  }
  return "?";
}

double pi_pulse_seed(double z01, double e_z) {
  const double coupling = units::kElectronCharge * z01 * e_z;  // meV
  if (!(std::abs(coupling) > 0)) {
    throw Error(ErrorCode::kZeroCoupling, "pi pulse undefined: z01 * E_z is zero");
  }
  return units::kPi * units::kHbar / std::abs(coupling);
}

namespace {

// The z00/z11 part of the drive modulates the splitting at the carrier
// frequency; to leading order the resonant coupling is scaled by
// J0(a) + J2(a) = 2 J1(a) / a, a = (z11 - z00) E / (hbar w).
double dressing_factor(const QubitParams& q, double e_z, double carrier_mev) {
  const double a = std::abs(q.z11 - q.z00) * e_z / carrier_mev;
  if (a < 1e-8) return 1.0;
  return 2.0 * std::cyl_bessel_j(1.0, a) / a;
}

// Window long enough to contain the first population lobe.
double search_window(double seed, double dressing) {
  const double d = std::abs(dressing);
  return d > 0.05 ? 2.5 * seed / d : 4.0 * seed;
}

struct Scan {
  std::vector<double> times;
  std::vector<std::vector<double>> score_inputs;  // per input, per sample
};

// Evolves every input once under a single segment of length `window`, keeping
// the score of each sample. Sample k is exactly the state after a pulse of
// length times[k] with the same step.
Scan scan_pulse(const HamiltonianFn& system, const PulseSegment& segment, double window,
                const std::vector<std::size_t>& inputs, std::size_t dim,
                const std::function<double(std::size_t input, const QuantumState&)>& score,
                const EvolveOptions& options) {
  PulseSchedule sched;
  PulseSegment seg = segment;
  seg.duration = window;
  sched.segments.push_back(seg);
  EvolveOptions opt = options;
  opt.sample_every = 1;
  Scan scan;
  for (std::size_t in : inputs) {
    const auto traj = evolve(system, QuantumState::basis(dim, in), sched, opt);
    if (scan.times.empty()) scan.times = traj.times;
    std::vector<double> s(traj.states.size());
    for (std::size_t k = 0; k < traj.states.size(); ++k) s[k] = score(in, traj.states[k]);
    scan.score_inputs.push_back(std::move(s));
  }
  return scan;
}

// Index of the best worst-case score inside the first lobe of input 0's
// curve: from the first time the curve exceeds `enter` until it falls below
// enter / 2. The hysteresis keeps the fast counter-rotating ripple near the
// threshold from closing the lobe early.
std::size_t best_in_first_lobe(const Scan& scan, double enter,
                               const std::function<double(const std::vector<double>&)>& combine) {
  const auto& lead = scan.score_inputs.front();
  std::size_t begin = lead.size(), end = lead.size();
  for (std::size_t k = 0; k < lead.size(); ++k) {
    if (begin == lead.size()) {
      if (lead[k] > enter) begin = k;
    } else if (lead[k] < 0.5 * enter) {
      end = k;
      break;
    }
  }
  if (begin == lead.size()) {
    // never entered: fall back to the global best
    begin = 0;
  }
  std::size_t best = begin;
  double best_value = -1e300;
  std::vector<double> vals(scan.score_inputs.size());
  for (std::size_t k = begin; k < end; ++k) {
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = scan.score_inputs[i][k];
    const double v = combine(vals);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  return best;
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

void check_calibrated(const CalibratedGate& g) {
  if (!(g.residual < kMaxCalibrationResidual)) {
    throw Error(ErrorCode::kNoConvergence,
                std::string("calibration of ") + to_string(g.spec.kind) +
                    " failed: residual " + std::to_string(g.residual) + " >= 1e-2");
  }
}

double output_phase_from_ground(const HamiltonianFn& system, const PulseSchedule& sched,
                                std::size_t dim, std::size_t in, std::size_t a, std::size_t b,
                                const EvolveOptions& options) {
  const auto out = evolve(system, QuantumState::basis(dim, in), sched, options).final_state();
  return std::arg(out.amplitudes[static_cast<Eigen::Index>(b)] /
                  out.amplitudes[static_cast<Eigen::Index>(a)]);
}

}  // namespace

double pi_pulse_duration(const QubitParams& q, double e_z, const EvolveOptions& options) {
  return make_x(q, e_z, options).schedule.total_duration();
}

CalibratedGate make_x(const QubitParams& q, double e_z, const EvolveOptions& options) {
  const double seed = pi_pulse_seed(q.z01, e_z);
  const PulseSegment seg{{e_z, q.resonance_thz(), 0.0}, seed, DriveTarget::kSingle};
  const auto system = one_qubit_system(q);
  const double window = search_window(seed, dressing_factor(q, e_z, q.splitting));
  // |0> -> |1> and |1> -> |0>
  const auto scan = scan_pulse(system, seg, window, {0, 1}, 2,
                               [](std::size_t in, const QuantumState& s) {
                                 return s.populations()[1 - in];
                               },
                               options);
  const std::size_t k = best_in_first_lobe(scan, 0.5, min_of);
  CalibratedGate g;
  g.spec = {GateKind::kX, DriveTarget::kSingle};
  PulseSegment out = seg;
  out.duration = scan.times[k];
  g.schedule.segments.push_back(out);
  g.residual = 1.0 - std::min(scan.score_inputs[0][k], scan.score_inputs[1][k]);
  check_calibrated(g);
  return g;
}

CalibratedGate make_hadamard(const QubitParams& q, double e_z, const EvolveOptions& options) {
  const double seed = pi_pulse_seed(q.z01, e_z);
  const PulseSegment seg{{e_z, q.resonance_thz(), 0.0}, 0.5 * seed, DriveTarget::kSingle};
  const auto system = one_qubit_system(q);
  const double window = 0.5 * search_window(seed, dressing_factor(q, e_z, q.splitting));
  // Score: closeness of the transferred population to 1/2; entering the lobe
  // means the transfer has passed 1/4.
  const auto scan = scan_pulse(system, seg, window, {0, 1}, 2,
                               [](std::size_t in, const QuantumState& s) {
                                 return s.populations()[1 - in];
                               },
                               options);
  std::size_t best = 0;
  double best_dev = 1e300;
  const auto& lead = scan.score_inputs[0];
  for (std::size_t k = 0; k < lead.size(); ++k) {
    if (lead[k] > 0.75) break;
    const double dev = std::max(std::abs(lead[k] - 0.5), std::abs(scan.score_inputs[1][k] - 0.5));
    if (dev < best_dev) {
      best_dev = dev;
      best = k;
    }
  }
  CalibratedGate g;
  g.spec = {GateKind::kH, DriveTarget::kSingle};
  PulseSegment out = seg;
  out.duration = scan.times[best];
  g.schedule.segments.push_back(out);
  g.residual = best_dev;
  check_calibrated(g);
  g.output_phase = output_phase_from_ground(system, g.schedule, 2, 0, 0, 1, options);
  return g;
}

CalibratedGate make_cnot(const QubitParams& control, const QubitParams& target,
                         const CoulombTable& table, double e_z, const EvolveOptions& options) {
  const auto res = conditional_resonances(control, target, table);
  const double splitting = units::thz_to_energy(std::abs(res.target_plus - res.target_minus));
  const double rabi = units::kElectronCharge * std::abs(target.z01) * e_z;  // hbar Omega_R, meV
  if (splitting < kSelectivityRatio * rabi) {
    throw Error(ErrorCode::kInsufficientSplitting,
                "conditional splitting " + std::to_string(splitting) + " meV is only " +
                    std::to_string(rabi > 0 ? splitting / rabi : 0.0) +
                    " x hbar Omega_R (need >= 5)");
  }
  const double seed = pi_pulse_seed(target.z01, e_z);
  const double carrier = units::thz_to_energy(res.target_plus);
  const PulseSegment seg{{e_z, res.target_plus, 0.0}, seed, DriveTarget::kTarget,
                         ElectrodeState::kFloating};
  const auto system = two_qubit_system(control, target, table);
  const double window = search_window(seed, dressing_factor(target, e_z, carrier));
  // Inputs in the order |10>, |11>, |00>, |01>; ideal outputs 11, 10, 00, 01.
  static constexpr std::size_t kIdeal[4] = {0, 1, 3, 2};
  const auto scan = scan_pulse(system, seg, window, {2, 3, 0, 1}, 4,
                               [](std::size_t in, const QuantumState& s) {
                                 return s.populations()[kIdeal[in]];
                               },
                               options);
  const std::size_t k = best_in_first_lobe(scan, 0.5, min_of);
  CalibratedGate g;
  g.spec = {GateKind::kCNOT, DriveTarget::kTarget};
  PulseSegment out = seg;
  out.duration = scan.times[k];
  g.schedule.segments.push_back(out);
  std::vector<double> v;
  for (const auto& s : scan.score_inputs) v.push_back(s[k]);
  g.residual = 1.0 - min_of(v);
  check_calibrated(g);
  g.output_phase = output_phase_from_ground(system, g.schedule, 4, 2, 2, 3, options);
  return g;
}

PulseSchedule compile(const std::vector<GateSpec>& circuit, const GateContext& ctx) {
  PulseSchedule out;
  if (circuit.empty()) return out;
  const double rabi = units::kElectronCharge * std::max(std::abs(ctx.control.z01), std::abs(ctx.target.z01)) * ctx.e_z;
  if (std::abs(ctx.control.splitting - ctx.target.splitting) < kSelectivityRatio * rabi) {
    throw Error(ErrorCode::kAddressingCollision,
                "control and target resonances differ by less than 5 hbar Omega_R");
  }
  for (const auto& spec : circuit) {
    CalibratedGate g;
    if (spec.kind == GateKind::kCNOT) {
      g = make_cnot(ctx.control, ctx.target, ctx.coupled, ctx.e_z, ctx.evolve);
    } else {
      if (spec.qubit != DriveTarget::kControl && spec.qubit != DriveTarget::kTarget) {
        throw Error(ErrorCode::kInvalidArgument, "single-qubit gate must name control or target");
      }
      const QubitParams& q = spec.qubit == DriveTarget::kControl ? ctx.control : ctx.target;
      g = spec.kind == GateKind::kX ? make_x(q, ctx.e_z, ctx.evolve) : make_hadamard(q, ctx.e_z, ctx.evolve);
      for (auto& seg : g.schedule.segments) {
        seg.target = spec.qubit;
        seg.electrodes = ElectrodeState::kGrounded;
      }
    }
    out.append(g.schedule);
  }
  return out;
}

double truth_table_fidelity(const HamiltonianFn& system, const PulseSchedule& schedule,
                            const std::vector<std::size_t>& perm, const EvolveOptions& options) {
  const std::size_t dim = perm.size();
  double worst = 1.0;
  for (std::size_t in = 0; in < dim; ++in) {
    const auto out = evolve(system, QuantumState::basis(dim, in), schedule, options).final_state();
    worst = std::min(worst, out.populations()[perm[in]]);
  }
  return worst;
}

}  // namespace qdmol
