#include <doctest.h>

#include <cmath>
#include <string>

#include "fixtures.hpp"
#include "qdmol/gates.hpp"
#include "qdmol/units.hpp"

using namespace qdmol;

namespace {

QubitParams control_params() { return fixture::operating_point().with_splitting(26.0); }
QubitParams target_params() { return fixture::operating_point().with_splitting(18.0); }

double p1_after(const QubitParams& q, const PulseSchedule& s, std::size_t input) {
  return evolve(one_qubit_system(q), QuantumState::basis(2, input), s).final_state().populations()[1];
}

}  // namespace

TEST_CASE("pi pulse seed") {
  CHECK(pi_pulse_seed(0.145, 1.5) == doctest::Approx(M_PI * units::kHbar / (0.145 * 1.5)));
  CHECK(pi_pulse_seed(-0.145, 1.5) == doctest::Approx(pi_pulse_seed(0.145, 1.5)));
  CHECK_QDMOL_ERROR(pi_pulse_seed(0.0, 1.5), ErrorCode::kZeroCoupling);
  CHECK_QDMOL_ERROR(pi_pulse_seed(0.1, 0.0), ErrorCode::kZeroCoupling);
}

TEST_CASE("gate names") {
  CHECK(std::string(to_string(GateKind::kX)) == "X");
  CHECK(std::string(to_string(GateKind::kH)) == "H");
  CHECK(std::string(to_string(GateKind::kCNOT)) == "CNOT");
}

TEST_CASE("X gate without diagonal dipoles sits at the seed") {
  const QubitParams q{24.81, 0.0, 0.145, 0.0};
  const auto x = make_x(q, 1.5);
  CHECK(x.residual < 1e-3);
  CHECK(x.schedule.total_duration() == doctest::Approx(pi_pulse_seed(q.z01, 1.5)).epsilon(0.01));
}

TEST_CASE("X gate at the operating point") {
  const QubitParams q = fixture::operating_point();
  const auto x = make_x(q, 1.5);
  CHECK(x.residual < kMaxCalibrationResidual);
  CHECK(p1_after(q, x.schedule, 0) >= 0.99);
  CHECK(p1_after(q, x.schedule, 1) <= 0.01);
  CHECK(pi_pulse_duration(q, 1.5) == doctest::Approx(x.schedule.total_duration()));
  // Longer than the seed because the diagonal dipoles slow the rotation.
  CHECK(x.schedule.total_duration() > 1.2 * pi_pulse_seed(q.z01, 1.5));
  CHECK(truth_table_fidelity(one_qubit_system(q), x.schedule, {1, 0}) >= 0.99);
}

TEST_CASE("Hadamard at the operating point") {
  const QubitParams q = fixture::operating_point();
  const auto h = make_hadamard(q, 1.5);
  CHECK(h.residual < kMaxCalibrationResidual);
  CHECK(p1_after(q, h.schedule, 0) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(p1_after(q, h.schedule, 1) == doctest::Approx(0.5).epsilon(0.02));
  PulseSchedule hh = h.schedule;
  hh.append(h.schedule);
  CHECK(p1_after(q, hh, 0) >= 0.98);
  CHECK(std::isfinite(h.output_phase));
}

TEST_CASE("CNOT truth table") {
  const auto c = control_params(), t = target_params();
  const auto table = CoulombTable::conditional(10.0);
  const auto g = make_cnot(c, t, table, 1.5);
  CHECK(g.residual < kMaxCalibrationResidual);
  REQUIRE(g.schedule.segments.size() == 1);
  CHECK(g.schedule.segments[0].target == DriveTarget::kTarget);
  CHECK(g.schedule.segments[0].drive.frequency == doctest::Approx(28.0 / units::kPlanck));
  CHECK(truth_table_fidelity(two_qubit_system(c, t, table), g.schedule, {0, 1, 3, 2}) >= 0.95);
  // With the coupling screened away the same pulse is far off resonance.
  CoulombTable off;
  for (std::size_t in = 0; in < 4; ++in) {
    const auto p = evolve(two_qubit_system(c, t, off), QuantumState::basis(4, in), g.schedule).final_state().populations();
    CHECK(p[in] > 1 - 1e-3);
  }
}

TEST_CASE("CNOT needs a resolvable conditional splitting") {
  CHECK_QDMOL_ERROR(make_cnot(control_params(), target_params(), CoulombTable::conditional(0.5), 1.5),
                    ErrorCode::kInsufficientSplitting);
}

TEST_CASE("circuit compilation") {
  GateContext ctx;
  ctx.control = control_params();
  ctx.target = target_params();
  ctx.coupled = CoulombTable::conditional(10.0);
  ctx.e_z = 1.5;
  CHECK(compile({}, ctx).segments.empty());

  const auto sched = compile({{GateKind::kX, DriveTarget::kControl}, {GateKind::kCNOT, DriveTarget::kTarget}}, ctx);
  REQUIRE(sched.segments.size() == 2);
  CHECK(sched.segments[0].target == DriveTarget::kControl);
  CHECK(sched.segments[0].electrodes == ElectrodeState::kGrounded);
  CHECK(sched.segments[1].electrodes == ElectrodeState::kFloating);
  // X on the control then CNOT: |00> -> |10> -> |11>.
  const auto sys = two_qubit_system(ctx.control, ctx.target, ctx.coupled, ctx.uncoupled);
  const auto out = evolve(sys, QuantumState::basis(4, 0), sched).final_state().populations();
  CHECK(out[3] >= 0.95);

  CHECK_QDMOL_ERROR(compile({{GateKind::kX, DriveTarget::kSingle}}, ctx), ErrorCode::kInvalidArgument);
  GateContext same = ctx;
  same.target = ctx.control;
  CHECK_QDMOL_ERROR(compile({{GateKind::kX, DriveTarget::kControl}}, same), ErrorCode::kAddressingCollision);
}

TEST_CASE("calibration reports failure instead of a bad pulse") {
  // Longitudinal dipoles this large put the carrier near the first zero of J1.
  const QubitParams q = fixture::operating_point().with_splitting(9.6);
  CHECK_QDMOL_ERROR(make_x(q, 1.5), ErrorCode::kNoConvergence);
}
