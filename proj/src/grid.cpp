#include "qdmol/grid.hpp"

#include <cmath>
#include <string>

#include "qdmol/error.hpp"

namespace qdmol {

namespace {
double center_of(const Vec3& c, int axis) { return axis == 0 ? c.x : axis == 1 ? c.y : c.z; }
}  // namespace

double Grid3D::lo(int axis) const { return center_of(center, axis) - 0.5 * extents[axis]; }

bool Grid3D::operator==(const Grid3D& o) const {
  return center.x == o.center.x && center.y == o.center.y && center.z == o.center.z &&
         extents == o.extents && points == o.points;
}

Grid3D grid_for(const MoleculeGeometry& geom, std::array<std::size_t, 3> points, double padding) {
  Grid3D g;
  g.center = {geom.axis_x(), geom.axis_y(), 0.5 * (geom.z_bottom() + geom.z_top())};
  const double lateral = geom.max_width() + 2.0 * padding;
  g.extents = {lateral, lateral, geom.z_top() - geom.z_bottom() + 2.0 * padding};
  g.points = points;
  return g;
}

void check_grid_contains(const MoleculeGeometry& geom, const Grid3D& grid) {
  for (int a = 0; a < 3; ++a) {
    if (grid.points[a] < kMinGridPoints) {
      throw Error(ErrorCode::kGridTooSmall,
                  "grid.points: need at least 16 nodes per axis, axis " + std::to_string(a) +
                      " has " + std::to_string(grid.points[a]),
                  "grid.points");
    }
  }
  const double tol = 1e-9;
  const double half_w = 0.5 * geom.max_width();
  const bool ok = grid.lo(0) <= geom.axis_x() - half_w - kMinPadding + tol &&
                  grid.lo(0) + grid.extents[0] >= geom.axis_x() + half_w + kMinPadding - tol &&
                  grid.lo(1) <= geom.axis_y() - half_w - kMinPadding + tol &&
                  grid.lo(1) + grid.extents[1] >= geom.axis_y() + half_w + kMinPadding - tol &&
                  grid.lo(2) <= geom.z_bottom() - kMinPadding + tol &&
                  grid.lo(2) + grid.extents[2] >= geom.z_top() + kMinPadding - tol;
  if (!ok) {
    throw Error(ErrorCode::kGridTooSmall,
                "grid.extents: simulation box must clear both dots by at least 8 nm",
                "grid.extents");
  }
}

double Wavefunction::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s * grid.cell_volume());
}

void Wavefunction::normalize() {
  const double n = norm();
  if (n == 0.0) throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero wavefunction");
  for (double& v : values) v /= n;
}

double inner_product(const Wavefunction& a, const Wavefunction& b) {
  if (!(a.grid == b.grid)) throw Error(ErrorCode::kGridMismatch, "wavefunctions live on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s * a.grid.cell_volume();
}

}  // namespace qdmol
