#include "qdmol/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <gsl/gsl_integration.h>

#include "qdmol/error.hpp"
#include "qdmol/parallel.hpp"
#include "qdmol/units.hpp"

namespace qdmol {

ChargeDensity ChargeDensity::of(const Wavefunction& psi) {
  ChargeDensity out{psi.grid, std::vector<double>(psi.values.size())};
  for (std::size_t i = 0; i < psi.values.size(); ++i) out.values[i] = psi.values[i] * psi.values[i];
  return out;
}

double ChargeDensity::total() const {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value() * grid.cell_volume();
}

ChargeDensity mix(const ChargeDensity& a, double wa, const ChargeDensity& b, double wb) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
    throw Error(ErrorCode::kGridMismatch, "densities are on different grids");
  }
  ChargeDensity out{a.grid, std::vector<double>(a.values.size())};
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = wa * a.values[i] + wb * b.values[i];
  return out;
}

const char* to_string(PlaneOrientation p) {
  switch (p) {
    case PlaneOrientation::kXZ: return "xz";
    case PlaneOrientation::kYZ: return "yz";
    case PlaneOrientation::kXY: return "xy";
  }
  return "?";
}

PlaneOrientation plane_orientation_from_string(const std::string& s) {
  if (s == "xz") return PlaneOrientation::kXZ;
  if (s == "yz") return PlaneOrientation::kYZ;
  if (s == "xy") return PlaneOrientation::kXY;
  throw Error(ErrorCode::kConfig, "unknown plane orientation '" + s + "' (expected xz, yz or xy)",
              "orientation");
}

double PlaneSpec::u(std::size_t i) const {
  return u_points == 1 ? u_min : u_min + (u_max - u_min) * static_cast<double>(i) / static_cast<double>(u_points - 1);
}

double PlaneSpec::v(std::size_t j) const {
  return v_points == 1 ? v_min : v_min + (v_max - v_min) * static_cast<double>(j) / static_cast<double>(v_points - 1);
}

Vec3 PlaneSpec::point(std::size_t i, std::size_t j) const {
  switch (orientation) {
    case PlaneOrientation::kXZ: return {u(i), offset, v(j)};
    case PlaneOrientation::kYZ: return {offset, u(i), v(j)};
    case PlaneOrientation::kXY: return {u(i), v(j), offset};
  }
  return {};
}

void PlaneSpec::validate() const {
  if (u_points < 1 || v_points < 1) {
    throw Error(ErrorCode::kInvalidArgument, "plane needs at least one point per axis", "points");
  }
  if (!(u_max >= u_min) || !(v_max >= v_min)) {
    throw Error(ErrorCode::kInvalidArgument, "plane ranges must satisfy min <= max", "plane");
  }
}

PlaneSpec default_readout_plane(const MoleculeGeometry& geom, std::size_t points, double margin) {
  if (!(margin >= kReadoutMargin)) {
    throw Error(ErrorCode::kInvalidArgument, "readout map margin must be >= 10 nm", "margin");
  }
  const DotGeometry& top = geom.dot_upper;
  PlaneSpec p;
  p.orientation = PlaneOrientation::kXZ;
  p.offset = top.center.y;
  p.u_min = top.center.x - 0.5 * top.width - margin;
  p.u_max = top.center.x + 0.5 * top.width + margin;
  p.v_min = top.z_min() - margin;
  p.v_max = top.z_max() + margin;
  p.u_points = points;
  p.v_points = points;
  return p;
}

Vec3 default_probe(const MoleculeGeometry& geom, double height) {
  return {geom.axis_x(), geom.axis_y(), geom.dot_upper.z_max() + height};
}

namespace {

struct GaussRule {
  std::vector<double> x, w;  // on [-1/2, 1/2], weights sum to 1
};

const GaussRule& cell_rule() {
  static const GaussRule rule = [] {
    constexpr std::size_t n = 4;
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
        t(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
    GaussRule r;
    for (std::size_t i = 0; i < n; ++i) {
      double xi = 0, wi = 0;
      gsl_integration_glfixed_point(-0.5, 0.5, i, &xi, &wi, t.get());
      r.x.push_back(xi);
      r.w.push_back(wi);
    }
    return r;
  }();
  return rule;
}

// Average of 1/|r - x| over the cell centred on c with sides h.
double cell_average_kernel(const Vec3& r, const Vec3& c, const double h[3]) {
  const auto& g = cell_rule();
  double acc = 0.0;
  for (std::size_t a = 0; a < g.x.size(); ++a)
    for (std::size_t b = 0; b < g.x.size(); ++b)
      for (std::size_t d = 0; d < g.x.size(); ++d) {
        const double dx = c.x + g.x[a] * h[0] - r.x;
        const double dy = c.y + g.x[b] * h[1] - r.y;
        const double dz = c.z + g.x[d] * h[2] - r.z;
        acc += g.w[a] * g.w[b] * g.w[d] / std::sqrt(dx * dx + dy * dy + dz * dz);
      }
  return acc;
}

constexpr double kNearCells = 3.0;

}  // namespace

double electrostatic_potential(const ChargeDensity& rho, double eps_r, const Vec3& r) {
  if (!(eps_r > 0)) throw Error(ErrorCode::kInvalidArgument, "eps_r must be > 0", "dielectric_constant");
  if (std::isinf(eps_r)) return 0.0;
  const Grid3D& g = rho.grid;
  const double h[3] = {g.spacing(0), g.spacing(1), g.spacing(2)};
  const double near = kNearCells * std::max({h[0], h[1], h[2]});
  const double dv = g.cell_volume();
  double total = 0.0;
  for (std::size_t k = 0; k < g.points[2]; ++k) {
    const double dz = g.coord(2, k) - r.z;
    double plane = 0.0;
    for (std::size_t j = 0; j < g.points[1]; ++j) {
      const double dy = g.coord(1, j) - r.y;
      const double* row = &rho.values[g.index(0, j, k)];
      double line = 0.0;
      for (std::size_t i = 0; i < g.points[0]; ++i) {
        if (row[i] == 0.0) continue;
        const double dx = g.coord(0, i) - r.x;
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        const double kernel = d < near ? cell_average_kernel(r, g.node(i, j, k), h) : 1.0 / d;
        line += row[i] * kernel;
      }
      plane += line;
    }
    total += plane;
  }
  return units::kCoulomb / eps_r * total * dv;
}

PotentialMap potential_map(const ChargeDensity& rho, double eps_r, const PlaneSpec& plane,
                           const Vec3& probe) {
  plane.validate();
  PotentialMap out;
  out.plane = plane;
  out.probe_point = probe;
  out.values.assign(plane.u_points * plane.v_points, 0.0);
  parallel_for(out.values.size(), [&](std::size_t n) {
    out.values[n] = electrostatic_potential(rho, eps_r, plane.point(n % plane.u_points, n / plane.u_points));
  });
  out.probe_value = electrostatic_potential(rho, eps_r, probe);
  return out;
}

PotentialMap potential_map(const Wavefunction& psi, double eps_r, const PlaneSpec& plane,
                           const Vec3& probe) {
  return potential_map(ChargeDensity::of(psi), eps_r, plane, probe);
}

double readout_contrast(const QubitBasis& basis, const MoleculeGeometry& geom, double eps_r,
                        const Vec3& probe) {
  if (geom.dot_lower.contains(probe) || geom.dot_upper.contains(probe)) {
    throw Error(ErrorCode::kInvalidArgument, "readout probe must lie outside both dots", "probe");
  }
  return electrostatic_potential(ChargeDensity::of(basis.psi1), eps_r, probe) -
         electrostatic_potential(ChargeDensity::of(basis.psi0), eps_r, probe);
}

}  // namespace qdmol
