#include "qdmol/dynamics.hpp"

#include <cmath>
#include <string>

#include "qdmol/error.hpp"
#include "qdmol/units.hpp"

namespace qdmol {

using cd = std::complex<double>;

QuantumState QuantumState::basis(std::size_t dim, std::size_t index) {
  if (dim != 2 && dim != 4) throw Error(ErrorCode::kInvalidArgument, "state dimension must be 2 or 4");
  if (index >= dim) throw Error(ErrorCode::kInvalidArgument, "basis index out of range");
  QuantumState s{StateVector::Zero(static_cast<Eigen::Index>(dim))};
  s.amplitudes[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

std::vector<double> QuantumState::populations() const {
  std::vector<double> p(dim());
  for (std::size_t i = 0; i < dim(); ++i) p[i] = std::norm(amplitudes[static_cast<Eigen::Index>(i)]);
  return p;
}

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

void PulseSchedule::append(const PulseSchedule& other) {
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
}

void PulseSchedule::validate() const {
  for (const auto& s : segments) {
    if (!(s.duration > 0) || !std::isfinite(s.duration)) {
      throw Error(ErrorCode::kInvalidArgument, "pulse segment duration must be > 0 and finite");
    }
    s.drive.validate();
  }
}

PulseSchedule time_reversed(const PulseSchedule& schedule) {
  const double total = schedule.total_duration();
  PulseSchedule out;
  for (auto it = schedule.segments.rbegin(); it != schedule.segments.rend(); ++it) {
    PulseSegment s = *it;
    const double w = units::thz_to_angular(s.drive.frequency);
    s.drive.phase = -w * total - it->drive.phase;
    out.segments.push_back(s);
  }
  return out;
}

namespace {
double drive_energy(const DriveField& d, double t) {
  return units::kElectronCharge * d.amplitude *
         std::cos(units::thz_to_angular(d.frequency) * t + d.phase);
}
}  // namespace

Eigen::Matrix2cd hamiltonian_1q(const QubitParams& q, const DriveField& drive, double t) {
  const double f = drive_energy(drive, t);
  Eigen::Matrix2cd h;
  h << f * q.z00, f * q.z01, f * q.z01, q.splitting + f * q.z11;
  return h;
}

Eigen::Matrix4cd hamiltonian_2q(const QubitParams& control, const QubitParams& target,
                                const CoulombTable& table, const DriveField& drive,
                                DriveTarget addressed, double t) {
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  const auto& u = table.u;
  // index = 2 c + t
  for (int c = 0; c < 2; ++c)
    for (int tq = 0; tq < 2; ++tq)
      h(2 * c + tq, 2 * c + tq) = c * control.splitting + tq * target.splitting + u[c][tq] - u[0][0];
  if (addressed == DriveTarget::kSingle) {
    throw Error(ErrorCode::kInvalidArgument, "two-qubit drive must address control or target");
  }
  const double f = drive_energy(drive, t);
  if (f == 0.0) return h;
  if (addressed == DriveTarget::kTarget) {
    for (int c = 0; c < 2; ++c) {
      const int a = 2 * c, b = 2 * c + 1;
      h(a, a) += f * target.z00;
      h(b, b) += f * target.z11;
      h(a, b) += f * target.z01;
      h(b, a) += f * target.z01;
    }
  } else {
    for (int tq = 0; tq < 2; ++tq) {
      const int a = tq, b = 2 + tq;
      h(a, a) += f * control.z00;
      h(b, b) += f * control.z11;
      h(a, b) += f * control.z01;
      h(b, a) += f * control.z01;
    }
  }
  return h;
}

HamiltonianFn one_qubit_system(const QubitParams& q) {
  return [q](double t, const PulseSegment& seg) -> Eigen::MatrixXcd {
    return hamiltonian_1q(q, seg.drive, t);
  };
}

HamiltonianFn two_qubit_system(const QubitParams& control, const QubitParams& target,
                               const CoulombTable& table) {
  return [control, target, table](double t, const PulseSegment& seg) -> Eigen::MatrixXcd {
    return hamiltonian_2q(control, target, table, seg.drive, seg.target, t);
  };
}

HamiltonianFn two_qubit_system(const QubitParams& control, const QubitParams& target,
                               const CoulombTable& coupled, const CoulombTable& uncoupled) {
  return [control, target, coupled, uncoupled](double t, const PulseSegment& seg) -> Eigen::MatrixXcd {
    const auto& table = seg.electrodes == ElectrodeState::kFloating ? coupled : uncoupled;
    return hamiltonian_2q(control, target, table, seg.drive, seg.target, t);
  };
}

Eigen::MatrixXcd step_propagator(const Eigen::MatrixXcd& h_mev, double h_ps) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_mev);
  const Eigen::Index n = h_mev.rows();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phases[i] = std::polar(1.0, -es.eigenvalues()[i] * h_ps / units::kHbar);
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd magnus_hamiltonian(const HamiltonianFn& hamiltonian, const PulseSegment& segment,
                                    double t, double h_ps) {
  const double offset = std::sqrt(3.0) / 6.0 * h_ps;
  const double mid = t + 0.5 * h_ps;
  const Eigen::MatrixXcd h1 = hamiltonian(mid - offset, segment);
  const Eigen::MatrixXcd h2 = hamiltonian(mid + offset, segment);
  const cd k(0.0, std::sqrt(3.0) * h_ps / (12.0 * units::kHbar));
  return 0.5 * (h1 + h2) + k * (h1 * h2 - h2 * h1);
}

Trajectory evolve(const HamiltonianFn& hamiltonian, const QuantumState& psi0,
                  const PulseSchedule& schedule, const EvolveOptions& options) {
  schedule.validate();
  if (!(options.dt > 0)) throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  if (psi0.dim() != 2 && psi0.dim() != 4) {
    throw Error(ErrorCode::kInvalidArgument, "initial state must have dimension 2 or 4");
  }
  if (!(std::abs(psi0.norm() - 1.0) < 1e-9)) {
    throw Error(ErrorCode::kInvalidArgument, "initial state must be normalized");
  }
  for (const auto& s : schedule.segments) {
    if (s.drive.amplitude > 0 && s.drive.frequency > 0 &&
        1.0 / s.drive.frequency < options.min_steps_per_period * options.dt) {
      throw Error(ErrorCode::kStepTooLarge,
                  "time step does not resolve the drive: period " +
                      std::to_string(1.0 / s.drive.frequency) + " ps < " +
                      std::to_string(options.min_steps_per_period) + " * dt");
    }
  }
  Trajectory traj;
  StateVector psi = psi0.amplitudes;
  double t = 0.0;
  traj.times.push_back(0.0);
  traj.states.push_back({psi});
  std::size_t step = 0;
  double seg_start = 0.0;
  for (std::size_t si = 0; si < schedule.segments.size(); ++si) {
    const auto& seg = schedule.segments[si];
    const auto n = static_cast<std::size_t>(std::ceil(seg.duration / options.dt - 1e-9));
    const double h = seg.duration / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double start = seg_start + static_cast<double>(i) * h;
      psi = step_propagator(magnus_hamiltonian(hamiltonian, seg, start, h), h) * psi;
      ++step;
      t = seg_start + static_cast<double>(i + 1) * h;
      const bool last = si + 1 == schedule.segments.size() && i + 1 == n;
      if (last || (options.sample_every > 0 && step % options.sample_every == 0)) {
        traj.times.push_back(t);
        traj.states.push_back({psi});
      }
    }
    seg_start += seg.duration;
  }
  return traj;
}

}  // namespace qdmol
