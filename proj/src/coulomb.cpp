#include "qdmol/coulomb.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qdmol/basis.hpp"
#include "qdmol/error.hpp"
#include "qdmol/parallel.hpp"
#include "qdmol/units.hpp"

namespace qdmol {

namespace {

void check_unit_charge(const ChargeCloud& cloud, const char* which) {
  const double q = cloud.total();
  if (!(std::abs(q - 1.0) < 1e-6)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("coulomb_integral: density ") + which +
                    " must carry unit charge, got " + std::to_string(q));
  }
}

}  // namespace

CoulombTable CoulombTable::conditional(double shift) {
  CoulombTable t;
  t.u[1][1] = shift;
  return t;
}

double ChargeCloud::total() const {
  CompensatedSum s;
  for (const auto& p : points) s.add(p.q);
  return s.value();
}

Vec3 ChargeCloud::centroid() const {
  double q = 0.0, x = 0.0, y = 0.0, z = 0.0;
  for (const auto& p : points) {
    q += p.q;
    x += p.q * p.r.x;
    y += p.q * p.r.y;
    z += p.q * p.r.z;
  }
  return {x / q, y / q, z / q};
}

ChargeCloud charge_cloud(const Wavefunction& psi, const Vec3& offset, std::size_t coarsen,
                         double relative_cutoff) {
  if (coarsen == 0) throw Error(ErrorCode::kInvalidArgument, "charge_cloud: coarsen must be >= 1");
  const auto& g = psi.grid;
  const double dv = g.cell_volume();
  const std::size_t bx = (g.points[0] + coarsen - 1) / coarsen;
  const std::size_t by = (g.points[1] + coarsen - 1) / coarsen;
  const std::size_t bz = (g.points[2] + coarsen - 1) / coarsen;
  std::vector<PointCharge> blocks(bx * by * bz);
  for (std::size_t k = 0; k < g.points[2]; ++k)
    for (std::size_t j = 0; j < g.points[1]; ++j)
      for (std::size_t i = 0; i < g.points[0]; ++i) {
        const double v = psi.values[g.index(i, j, k)];
        const double q = v * v * dv;
        auto& b = blocks[((k / coarsen) * by + j / coarsen) * bx + i / coarsen];
        const Vec3 r = g.node(i, j, k);
        b.q += q;
        b.r.x += q * r.x;
        b.r.y += q * r.y;
        b.r.z += q * r.z;
      }
  double qmax = 0.0;
  for (const auto& b : blocks) qmax = std::max(qmax, b.q);
  ChargeCloud cloud;
  cloud.points.reserve(blocks.size());
  for (const auto& b : blocks) {
    if (b.q <= 0.0 || b.q < relative_cutoff * qmax) continue;
    cloud.points.push_back({{b.r.x / b.q + offset.x, b.r.y / b.q + offset.y, b.r.z / b.q + offset.z}, b.q});
  }
  return cloud;
}

double coulomb_integral(const ChargeCloud& a, const ChargeCloud& b, double eps_r) {
  if (!(eps_r > 0)) throw Error(ErrorCode::kInvalidArgument, "coulomb_integral: eps_r must be > 0");
  check_unit_charge(a, "a");
  check_unit_charge(b, "b");
  if (std::isinf(eps_r)) return 0.0;
  constexpr double kCoincident = 1e-6;  // nm
  CompensatedSum outer;
  for (const auto& pa : a.points) {
    CompensatedSum inner;
    for (const auto& pb : b.points) {
      const double dx = pa.r.x - pb.r.x, dy = pa.r.y - pb.r.y, dz = pa.r.z - pb.r.z;
      const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (r < kCoincident) {
        throw Error(ErrorCode::kOverlappingSupport,
                    "coulomb_integral: charge supports overlap (coincident cells)");
      }
      inner.add(pb.q / r);
    }
    outer.add(pa.q * inner.value());
  }
  return units::kCoulomb / eps_r * outer.value();
}

double coulomb_point_estimate(const ChargeCloud& a, const ChargeCloud& b, double eps_r) {
  const Vec3 ca = a.centroid(), cb = b.centroid();
  const double r = std::sqrt((ca.x - cb.x) * (ca.x - cb.x) + (ca.y - cb.y) * (ca.y - cb.y) +
                             (ca.z - cb.z) * (ca.z - cb.z));
  if (r < 1e-6) throw Error(ErrorCode::kOverlappingSupport, "coincident charge centroids");
  return units::kCoulomb / eps_r * a.total() * b.total() / r;
}

CoulombTable build_coulomb_table(const QubitBasis& control, const QubitBasis& target,
                                 double eps_r, std::size_t coarsen, const Vec3& target_offset) {
  constexpr double kCutoff = 1e-12;
  const ChargeCloud c[2] = {charge_cloud(control.psi0, {}, coarsen, kCutoff),
                            charge_cloud(control.psi1, {}, coarsen, kCutoff)};
  const ChargeCloud t[2] = {charge_cloud(target.psi0, target_offset, coarsen, kCutoff),
                            charge_cloud(target.psi1, target_offset, coarsen, kCutoff)};
  // Truncation leaves the total a hair below one; renormalize each cloud.
  auto unit = [](ChargeCloud cl) {
    const double q = cl.total();
    for (auto& p : cl.points) p.q /= q;
    return cl;
  };
  CoulombTable table;
  for (int ci = 0; ci < 2; ++ci)
    for (int ti = 0; ti < 2; ++ti) table.u[ci][ti] = coulomb_integral(unit(c[ci]), unit(t[ti]), eps_r);
  return table;
}

double plate_screening_factor(double lateral_distance, double plane_gap) {
  if (!(plane_gap > 0)) throw Error(ErrorCode::kInvalidArgument, "plane gap must be > 0");
  return std::exp(-units::kPi * lateral_distance / plane_gap);
}

double required_separation_ratio(double u_mev, double threshold_mev) {
  if (!(u_mev > 0) || !(threshold_mev > 0)) return 0.0;
  return std::max(0.0, std::log(u_mev / threshold_mev) / units::kPi);
}

CoulombTable screened_interaction(const GateGeometry& gate, const CoulombTable& table) {
  if (gate.electrode_state == ElectrodeState::kFloating) return table;
  const double f = plate_screening_factor(gate.lateral_separation, gate.electrode_plane_gap);
  CoulombTable out;
  for (int c = 0; c < 2; ++c)
    for (int t = 0; t < 2; ++t) out.u[c][t] = table.u[c][t] * f;
  return out;
}

ConditionalResonances conditional_resonances(const QubitParams& control, const QubitParams& target,
                                             const CoulombTable& table) {
  const auto& u = table.u;
  ConditionalResonances r;
  r.target_plus = units::energy_to_thz(target.splitting + u[1][1] - u[1][0]);
  r.target_minus = units::energy_to_thz(target.splitting + u[0][1] - u[0][0]);
  r.control_plus = units::energy_to_thz(control.splitting + u[1][1] - u[0][1]);
  r.control_minus = units::energy_to_thz(control.splitting + u[1][0] - u[0][0]);
  return r;
}

}  // namespace qdmol
