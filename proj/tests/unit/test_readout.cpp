#include <doctest.h>

#include <cmath>
#include <limits>

#include "../oracles/oracles.hpp"
#include "fixtures.hpp"
#include "qdmol/readout.hpp"

using namespace qdmol;

namespace {

ChargeDensity gaussian_density(double sigma) {
  Grid3D g;
  g.extents = {16, 16, 16};
  g.points = {48, 48, 48};
  ChargeDensity rho{g, std::vector<double>(g.size())};
  const double norm = std::pow(2 * M_PI * sigma * sigma, -1.5);
  for (std::size_t k = 0; k < 48; ++k)
    for (std::size_t j = 0; j < 48; ++j)
      for (std::size_t i = 0; i < 48; ++i) {
        const Vec3 r = g.node(i, j, k);
        rho.values[g.index(i, j, k)] = norm * std::exp(-(r.x * r.x + r.y * r.y + r.z * r.z) / (2 * sigma * sigma));
      }
  return rho;
}

}  // namespace

TEST_CASE("charge density") {
  const auto& b = fixture::coarse_basis();
  const auto r0 = ChargeDensity::of(b.psi0);
  const auto r1 = ChargeDensity::of(b.psi1);
  CHECK(r0.total() == doctest::Approx(1.0).epsilon(1e-10));
  const auto half = mix(r0, 0.5, r1, 0.5);
  CHECK(half.total() == doctest::Approx(1.0).epsilon(1e-10));
  const auto other = gaussian_density(1.0);
  CHECK_QDMOL_ERROR(mix(r0, 1, other, 1), ErrorCode::kGridMismatch);
}

TEST_CASE("plane specification") {
  for (auto o : {PlaneOrientation::kXZ, PlaneOrientation::kYZ, PlaneOrientation::kXY})
    CHECK(plane_orientation_from_string(to_string(o)) == o);
  CHECK_QDMOL_ERROR(plane_orientation_from_string("zx"), ErrorCode::kConfig);

  PlaneSpec p;
  p.orientation = PlaneOrientation::kYZ;
  p.offset = 3;
  p.u_min = -1;
  p.u_max = 1;
  p.v_min = 0;
  p.v_max = 4;
  p.u_points = 3;
  p.v_points = 5;
  const Vec3 corner = p.point(2, 4);
  CHECK(corner.x == 3.0);
  CHECK(corner.y == 1.0);
  CHECK(corner.z == 4.0);
  CHECK(p.v(1) == 1.0);
  p.u_points = 1;
  CHECK(p.u(0) == -1.0);
  p.u_points = 0;
  CHECK_QDMOL_ERROR(p.validate(), ErrorCode::kInvalidArgument);
  p.u_points = 3;
  p.v_max = -1;
  CHECK_QDMOL_ERROR(p.validate(), ErrorCode::kInvalidArgument);
}

TEST_CASE("default plane and probe") {
  const auto geom = default_qubit();
  const auto p = default_readout_plane(geom);
  const auto& top = geom.dot_upper;
  CHECK(p.orientation == PlaneOrientation::kXZ);
  CHECK(p.u_max - p.u_min == doctest::Approx(top.width + 2 * kReadoutMargin));
  CHECK(p.v_min == doctest::Approx(top.z_min() - kReadoutMargin));
  CHECK(p.u_points == 61);
  CHECK_QDMOL_ERROR(default_readout_plane(geom, 61, 5.0), ErrorCode::kInvalidArgument);
  const Vec3 probe = default_probe(geom);
  CHECK(probe.z == doctest::Approx(top.z_max() + 10));
  CHECK(!top.contains(probe));
}

TEST_CASE("Gaussian charge at 20 nm looks like a point charge") {
  const auto rho = gaussian_density(1.0);
  const double eps = 10.0;
  const double v = electrostatic_potential(rho, eps, {0, 0, 20});
  const auto rep = oracle::compare("V(20 nm)", oracle::point_charge_potential(1, eps, 20), v, 1e-3);
  CHECK_MESSAGE(rep.pass, oracle::format(rep));
  CHECK(v == doctest::Approx(7.1998).epsilon(1e-3));
  // Inside the cloud the cell-averaged kernel keeps the potential finite and
  // below the point-charge value at the same distance.
  const double inner = electrostatic_potential(rho, eps, {0, 0, 0.5});
  CHECK(std::isfinite(inner));
  CHECK(inner < oracle::point_charge_potential(1, eps, 0.5));
  CHECK(electrostatic_potential(rho, std::numeric_limits<double>::infinity(), {0, 0, 20}) == 0.0);
  CHECK_QDMOL_ERROR(electrostatic_potential(rho, 0.0, {0, 0, 20}), ErrorCode::kInvalidArgument);
}

TEST_CASE("potential map layout") {
  const auto rho = gaussian_density(1.0);
  PlaneSpec p;
  p.u_min = -10;
  p.u_max = 10;
  p.v_min = 12;
  p.v_max = 20;
  p.u_points = 5;
  p.v_points = 3;
  const auto m = potential_map(rho, 10.0, p, {0, 0, 20});
  REQUIRE(m.values.size() == 15);
  CHECK(m.at(2, 2) == doctest::Approx(m.probe_value));
  CHECK(m.at(0, 1) == doctest::Approx(m.at(4, 1)).epsilon(1e-10));
  CHECK(m.at(2, 0) > m.at(2, 2));
}

TEST_CASE("readout contrast of the default qubit") {
  const auto& b = fixture::coarse_basis();
  const auto geom = default_qubit();
  const Vec3 probe = default_probe(geom);
  const double c = readout_contrast(b, geom, 10.0, probe);
  // The excited state sits in the upper dot, nearer the probe.
  CHECK(c > 1.0);
  CHECK(c < 10.0);
  const Vec3 below{probe.x, probe.y, geom.dot_lower.z_min() - 10};
  CHECK(readout_contrast(b, geom, 10.0, below) < 0);
  CHECK_QDMOL_ERROR(readout_contrast(b, geom, 10.0, geom.dot_upper.center), ErrorCode::kInvalidArgument);
}
