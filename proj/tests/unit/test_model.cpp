#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "qdmol/grid.hpp"
#include "qdmol/model.hpp"
#include "qdmol/units.hpp"

using namespace qdmol;

TEST_CASE("default qubit has the documented layout") {
  const auto g = default_qubit();
  CHECK(g.dot_lower.width == 24.0);
  CHECK(g.dot_lower.height == 20.0);
  CHECK(g.dot_upper.width == 22.0);
  CHECK(g.dot_upper.height == 15.0);
  CHECK(g.dot_upper.z_min() - g.dot_lower.z_max() == doctest::Approx(7.0));
  CHECK(g.barrier_mid_z() == doctest::Approx(0.0));
  CHECK(g.material.effective_mass_ratio == 0.067);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("box potential precedence") {
  const auto g = default_qubit();
  const double zl = g.dot_lower.center.z;
  const double zu = g.dot_upper.center.z;
  SUBCASE("dot interiors are zero") {
    CHECK(potential_at(g, {0, 0, zl}) == 0.0);
    CHECK(potential_at(g, {11.9, -11.9, zl}) == 0.0);
    CHECK(potential_at(g, {0, 0, zu}) == 0.0);
  }
  SUBCASE("beside a dot inside its z-range is V0") {
    CHECK(potential_at(g, {12.5, 0, zl}) == 1000.0);
    CHECK(potential_at(g, {11.5, 0, zu}) == 1000.0);
  }
  SUBCASE("barrier and outside are V1") {
    CHECK(potential_at(g, {0, 0, 0}) == 240.0);
    CHECK(potential_at(g, {0, 0, g.z_top() + 1}) == 240.0);
    CHECK(potential_at(g, {40, 40, g.z_bottom() - 1}) == 240.0);
  }
  SUBCASE("faces belong to the barrier") {
    CHECK(potential_at(g, {0, 0, g.dot_lower.z_max()}) == 240.0);
    CHECK(potential_at(g, {12.0, 0, zl}) == 1000.0);
  }
  SUBCASE("upper dot shadow inside the lower dot z-range does not matter") {
    // 11.5 is inside the lower dot laterally, outside the upper one.
    CHECK(potential_at(g, {11.5, 0, zl}) == 0.0);
  }
}

TEST_CASE("cell averaged potential") {
  const auto g = default_qubit();
  const double zl = g.dot_lower.center.z;
  CHECK(cell_average_potential(g, {-1, -1, zl - 1}, {1, 1, zl + 1}) == 0.0);
  // Half inside the lower dot laterally.
  CHECK(cell_average_potential(g, {11, -1, zl - 1}, {13, 1, zl + 1}) == doctest::Approx(500.0));
  // Half in the barrier, half in the lower dot along z.
  const double top = g.dot_lower.z_max();
  CHECK(cell_average_potential(g, {-1, -1, top - 1}, {1, 1, top + 1}) == doctest::Approx(120.0));
  // Consistent with point sampling for a cell entirely in one region.
  CHECK(cell_average_potential(g, {30, 30, 30}, {31, 31, 31}) == doctest::Approx(240.0));
}

TEST_CASE("geometry validation names the offending field") {
  auto g = default_qubit();
  SUBCASE("negative width") {
    g.dot_lower.width = -1;
    try {
      g.validate();
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidArgument);
      CHECK(e.field() == "geometry.dot_lower.width");
    }
  }
  SUBCASE("upper wider than lower") {
    g.dot_upper.width = 30;
    CHECK_QDMOL_ERROR(g.validate(), ErrorCode::kInvalidArgument);
  }
  SUBCASE("V0 must exceed V1") {
    g.v_lateral = 100;
    CHECK_QDMOL_ERROR(g.validate(), ErrorCode::kInvalidArgument);
  }
  SUBCASE("barrier mismatch") {
    g.barrier_gap = 3;
    CHECK_QDMOL_ERROR(g.validate(), ErrorCode::kInvalidArgument);
  }
  SUBCASE("negative mass") {
    g.material.effective_mass_ratio = -1;
    try {
      g.validate();
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.field() == "material.effective_mass_ratio");
    }
  }
  SUBCASE("prefix is applied") {
    g.dot_upper.height = 0;
    try {
      g.validate("geometry.target");
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.field() == "geometry.target.dot_upper.height");
    }
  }
}

TEST_CASE("gate geometry") {
  auto gate = default_cn_gate();
  CHECK_NOTHROW(gate.validate());
  CHECK(gate.target.axis_x() == 30.0);
  SUBCASE("separation must exceed widest dot") {
    gate.lateral_separation = 20;
    CHECK_QDMOL_ERROR(gate.validate(), ErrorCode::kInvalidArgument);
  }
  SUBCASE("electrode gap must be positive") {
    gate.electrode_plane_gap = 0;
    CHECK_QDMOL_ERROR(gate.validate(), ErrorCode::kInvalidArgument);
  }
  SUBCASE("electrode state strings") {
    CHECK(electrode_state_from_string("grounded") == ElectrodeState::kGrounded);
    CHECK(std::string(to_string(ElectrodeState::kFloating)) == "floating");
    CHECK_QDMOL_ERROR(electrode_state_from_string("open"), ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("drive validation") {
  DriveField d{1.5, 6.0, 0.0};
  CHECK_NOTHROW(d.validate());
  d.amplitude = -1;
  CHECK_QDMOL_ERROR(d.validate(), ErrorCode::kInvalidArgument);
  d.amplitude = 1;
  d.phase = NAN;
  CHECK_QDMOL_ERROR(d.validate(), ErrorCode::kInvalidArgument);
}

TEST_CASE("grid construction and padding checks") {
  const auto g = default_qubit();
  const Grid3D grid = grid_for(g, {48, 48, 64}, 8.0);
  CHECK(grid.extents[0] == doctest::Approx(24.0 + 16.0));
  CHECK(grid.extents[2] == doctest::Approx(20.0 + 7.0 + 15.0 + 16.0));
  CHECK(grid.size() == 48u * 48u * 64u);
  CHECK(grid.coord(0, 0) == doctest::Approx(grid.lo(0) + grid.spacing(0)));
  CHECK(grid.index(1, 2, 3) == (3u * 48u + 2u) * 48u + 1u);
  CHECK_NOTHROW(check_grid_contains(g, grid));
  CHECK_QDMOL_ERROR(check_grid_contains(g, grid_for(g, {8, 48, 64})), ErrorCode::kGridTooSmall);
  CHECK_QDMOL_ERROR(check_grid_contains(g, grid_for(g, {48, 48, 64}, 4.0)), ErrorCode::kGridTooSmall);
}

TEST_CASE("wavefunction norm and inner product") {
  const auto g = default_qubit();
  const Grid3D grid = grid_for(g, {16, 16, 16});
  Wavefunction a{grid, std::vector<double>(grid.size(), 1.0)};
  a.normalize();
  CHECK(a.norm() == doctest::Approx(1.0));
  CHECK(inner_product(a, a) == doctest::Approx(1.0));
  Wavefunction zero{grid, std::vector<double>(grid.size(), 0.0)};
  CHECK_QDMOL_ERROR(zero.normalize(), ErrorCode::kInvalidArgument);
  const Grid3D other = grid_for(g, {16, 16, 18});
  Wavefunction b{other, std::vector<double>(other.size(), 1.0)};
  CHECK_QDMOL_ERROR(inner_product(a, b), ErrorCode::kGridMismatch);
}

TEST_CASE("unit helpers") {
  CHECK(units::energy_to_thz(units::kPlanck) == doctest::Approx(1.0));
  CHECK(units::kinetic_prefactor(0.067) == doctest::Approx(38.0998 / 0.067));
  CHECK(units::ps_to_s(1.0) == 1e-12);
  CHECK(units::per_ps_to_per_s(1.0) == doctest::Approx(1e12));
}
