#include <doctest.h>

#include <cmath>

#include "../oracles/oracles.hpp"
#include "fixtures.hpp"
#include "qdmol/dynamics.hpp"
#include "qdmol/units.hpp"

using namespace qdmol;

namespace {

PulseSchedule resonant(const QubitParams& q, double e_z, double duration, double phase = 0.0) {
  PulseSchedule s;
  s.segments.push_back({{e_z, q.resonance_thz(), phase}, duration, DriveTarget::kSingle});
  return s;
}

double rabi(const QubitParams& q, double e_z) { return q.z01 * e_z / units::kHbar; }

}  // namespace

TEST_CASE("one-qubit Hamiltonian") {
  const QubitParams q{24.81, -13.0, 0.15, 11.0};
  const auto h0 = hamiltonian_1q(q, {0.0, 6.0, 0.0}, 1.234);
  CHECK(h0(0, 1) == std::complex<double>(0.0, 0.0));
  CHECK(h0(1, 1).real() == 24.81);
  // cos(w t) = 0 at a quarter period.
  const auto hq = hamiltonian_1q(q, {1.5, 6.0, 0.0}, 0.25 / 6.0);
  CHECK(std::abs(hq(0, 1)) < 1e-12);
  const auto h = hamiltonian_1q(q, {1.5, 6.0, 0.3}, 0.77);
  CHECK((h - h.adjoint()).norm() == 0.0);
  const double f = 1.5 * std::cos(2 * M_PI * 6.0 * 0.77 + 0.3);
  CHECK(h(0, 0).real() == doctest::Approx(f * -13.0));
  CHECK(h(0, 1).real() == doctest::Approx(f * 0.15));
}

TEST_CASE("two-qubit Hamiltonian") {
  const QubitParams c{26, -13, 0.15, 11}, t{18, -12, 0.16, 10};
  const auto h0 = hamiltonian_2q(c, t, CoulombTable{}, {0, 0, 0}, DriveTarget::kTarget, 0);
  CHECK(h0(0, 0).real() == 0.0);
  CHECK(h0(1, 1).real() == 18.0);
  CHECK(h0(2, 2).real() == 26.0);
  CHECK(h0(3, 3).real() == 44.0);
  const auto tab = CoulombTable::conditional(10);
  const auto h1 = hamiltonian_2q(c, t, tab, {0, 0, 0}, DriveTarget::kTarget, 0);
  CHECK((h1(3, 3) - h1(2, 2)).real() - (h1(1, 1) - h1(0, 0)).real() == doctest::Approx(10.0));
  const auto ht = hamiltonian_2q(c, t, tab, {1.5, 6, 0}, DriveTarget::kTarget, 0.01);
  CHECK(ht(0, 2) == std::complex<double>(0, 0));
  CHECK(ht(1, 3) == std::complex<double>(0, 0));
  CHECK(std::abs(ht(0, 1)) > 0);
  CHECK(std::abs(ht(2, 3)) > 0);
  const auto hc = hamiltonian_2q(c, t, tab, {1.5, 6, 0}, DriveTarget::kControl, 0.01);
  CHECK(hc(0, 1) == std::complex<double>(0, 0));
  CHECK(std::abs(hc(0, 2)) > 0);
  CHECK((hc - hc.adjoint()).norm() == 0.0);
  CHECK_QDMOL_ERROR(hamiltonian_2q(c, t, tab, {1.5, 6, 0}, DriveTarget::kSingle, 0), ErrorCode::kInvalidArgument);
}

TEST_CASE("transverse-only qubit follows the rotating-wave oracle") {
  // Without diagonal dipoles the only correction to the RWA is Bloch-Siegert,
  // of order Omega / omega.
  const QubitParams q{24.81, 0.0, 0.15, 0.0};
  const double e_z = 1.5;
  const double t_pi = M_PI / rabi(q, e_z);
  EvolveOptions o;
  o.sample_every = 50;
  const auto traj = evolve(one_qubit_system(q), QuantumState::basis(2, 0), resonant(q, e_z, 2 * t_pi), o);
  double worst = 0.0;
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double ref = oracle::rwa_population(rabi(q, e_z), 0.0, traj.times[n]);
    worst = std::max(worst, std::abs(traj.states[n].populations()[1] - ref));
  }
  CHECK(worst < 0.02);
}

TEST_CASE("diagonal dipoles renormalize the Rabi frequency by 2 J1(a)/a") {
  const QubitParams q = fixture::operating_point();
  const double e_z = 1.5;
  const double w = units::thz_to_angular(q.resonance_thz());
  const double dressed = oracle::dressed_rabi_frequency(rabi(q, e_z), q.z00, q.z11, e_z, w);
  EvolveOptions o;
  o.sample_every = 50;
  const auto traj = evolve(one_qubit_system(q), QuantumState::basis(2, 0), resonant(q, e_z, 2 * M_PI / dressed), o);
  double worst_dressed = 0.0, worst_bare = 0.0;
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double p = traj.states[n].populations()[1];
    worst_dressed = std::max(worst_dressed, std::abs(p - oracle::rwa_population(dressed, 0.0, traj.times[n])));
    worst_bare = std::max(worst_bare, std::abs(p - oracle::rwa_population(rabi(q, e_z), 0.0, traj.times[n])));
  }
  CHECK(worst_dressed < 0.02);
  CHECK(worst_bare > 0.1);
}

TEST_CASE("norm, dt convergence and sampling contract") {
  const QubitParams q = fixture::operating_point();
  const auto sched = resonant(q, 1.5, 12.6);
  EvolveOptions fine;
  fine.sample_every = 7;
  const auto a = evolve(one_qubit_system(q), QuantumState::basis(2, 0), sched, fine);
  for (const auto& s : a.states) CHECK(std::abs(1.0 - s.norm() * s.norm()) < 1e-9);
  CHECK(a.times.front() == 0.0);
  CHECK(a.times.back() == doctest::Approx(12.6).epsilon(1e-12));
  for (std::size_t n = 1; n < a.times.size(); ++n) CHECK(a.times[n] > a.times[n - 1]);
  EvolveOptions half = fine;
  half.dt = fine.dt / 2;
  const auto b = evolve(one_qubit_system(q), QuantumState::basis(2, 0), sched, half);
  const auto pa = a.final_state().populations(), pb = b.final_state().populations();
  CHECK(std::abs(pa[1] - pb[1]) < 1e-6);
  // Endpoints only.
  const auto ends = evolve(one_qubit_system(q), QuantumState::basis(2, 0), sched);
  CHECK(ends.times.size() == 2);
}

TEST_CASE("zero drive keeps a basis state stationary") {
  const QubitParams q = fixture::operating_point();
  PulseSchedule idle;
  idle.segments.push_back({{0.0, 0.0, 0.0}, 5.0, DriveTarget::kSingle});
  EvolveOptions o;
  o.sample_every = 100;
  const auto traj = evolve(one_qubit_system(q), QuantumState::basis(2, 1), idle, o);
  for (const auto& s : traj.states) CHECK(s.populations()[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("time reversal undoes a schedule") {
  const QubitParams q = fixture::operating_point();
  PulseSchedule sched = resonant(q, 1.5, 5.3, 0.4);
  sched.segments.push_back({{0.8, q.resonance_thz() * 1.01, 1.1}, 2.7, DriveTarget::kSingle});
  QuantumState psi0{StateVector(2)};
  psi0.amplitudes << std::complex<double>(0.6, 0.0), std::complex<double>(0.0, 0.8);
  const auto fwd = evolve(one_qubit_system(q), psi0, sched).final_state();
  // H is real, so complex conjugation maps the reversed run onto the inverse.
  QuantumState back{fwd.amplitudes.conjugate()};
  const auto rev = evolve(one_qubit_system(q), back, time_reversed(sched)).final_state();
  const double fidelity = std::norm(rev.amplitudes.dot(psi0.amplitudes.conjugate()));
  CHECK(fidelity > 1 - 1e-8);
  CHECK(time_reversed(sched).total_duration() == doctest::Approx(sched.total_duration()));
}

TEST_CASE("off-resonant drive stays within the Lorentzian bound") {
  const QubitParams q{24.81, 0.0, 0.15, 0.0};
  const double e_z = 1.5;
  const double omega = rabi(q, e_z);
  const double delta = 8.0 * omega;
  PulseSchedule s;
  s.segments.push_back({{e_z, q.resonance_thz() + delta / (2 * M_PI), 0.0}, 40.0, DriveTarget::kSingle});
  EvolveOptions o;
  o.sample_every = 5;
  const auto traj = evolve(one_qubit_system(q), QuantumState::basis(2, 0), s, o);
  double peak = 0.0;
  for (const auto& st : traj.states) peak = std::max(peak, st.populations()[1]);
  CHECK(peak <= 1.1 * omega * omega / (omega * omega + delta * delta));
}

TEST_CASE("evolve input errors") {
  const QubitParams q = fixture::operating_point();
  const auto sys = one_qubit_system(q);
  const auto ok = resonant(q, 1.5, 1.0);
  EvolveOptions bad;
  bad.dt = 0;
  CHECK_QDMOL_ERROR(evolve(sys, QuantumState::basis(2, 0), ok, bad), ErrorCode::kInvalidArgument);
  EvolveOptions coarse;
  coarse.dt = 0.01;
  CHECK_QDMOL_ERROR(evolve(sys, QuantumState::basis(2, 0), ok, coarse), ErrorCode::kStepTooLarge);
  PulseSchedule neg = ok;
  neg.segments[0].duration = -1;
  CHECK_QDMOL_ERROR(evolve(sys, QuantumState::basis(2, 0), neg), ErrorCode::kInvalidArgument);
  QuantumState unnormalized{StateVector::Constant(2, 1.0)};
  CHECK_QDMOL_ERROR(evolve(sys, unnormalized, ok), ErrorCode::kInvalidArgument);
  CHECK_QDMOL_ERROR(QuantumState::basis(3, 0), ErrorCode::kInvalidArgument);
  CHECK_QDMOL_ERROR(QuantumState::basis(2, 2), ErrorCode::kInvalidArgument);
}

TEST_CASE("step propagator is unitary") {
  Eigen::MatrixXcd h(2, 2);
  h << 1.0, std::complex<double>(0.3, 0.2), std::complex<double>(0.3, -0.2), 5.0;
  const auto u = step_propagator(h, 0.37);
  CHECK((u * u.adjoint() - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("Magnus stepping converges at fourth order") {
  const QubitParams q = fixture::operating_point();
  const auto sched = resonant(q, 1.5, 9.0);
  auto p1 = [&](double dt) {
    EvolveOptions o;
    o.dt = dt;
    return evolve(one_qubit_system(q), QuantumState::basis(2, 0), sched, o).final_state().populations()[1];
  };
  const double a = p1(0.004), b = p1(0.002), c = p1(0.001);
  const double ratio = std::abs(a - b) / std::abs(b - c);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
  CHECK(std::abs(b - c) < 1e-6);
}
