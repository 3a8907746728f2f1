#include "qdmol/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdmol/error.hpp"

namespace qdmol {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, field + ": " + what, field);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void Material::validate() const {
  require(finite(effective_mass_ratio) && effective_mass_ratio > 0,
          "material.effective_mass_ratio", "must be > 0");
  require(finite(dielectric_constant) && dielectric_constant > 0,
          "material.dielectric_constant", "must be > 0");
  require(finite(deformation_potential_ev), "material.deformation_potential_ev",
          "must be finite");
  require(finite(mass_density) && mass_density > 0, "material.mass_density", "must be > 0");
  require(finite(sound_velocity) && sound_velocity > 0, "material.sound_velocity",
          "must be > 0");
}

Material gaas() { return Material{}; }

bool DotGeometry::contains(const Vec3& r) const {
  const double hw = 0.5 * width;
  return std::abs(r.x - center.x) < hw && std::abs(r.y - center.y) < hw && in_z_range(r.z);
}

void DotGeometry::validate(const char* name) const {
  const std::string n(name);
  require(finite(width) && width > 0, n + ".width", "must be > 0");
  require(finite(height) && height > 0, n + ".height", "must be > 0");
  require(finite(center.x) && finite(center.y) && finite(center.z), n + ".center",
          "must be finite");
}

double MoleculeGeometry::max_width() const { return std::max(dot_lower.width, dot_upper.width); }

void MoleculeGeometry::validate(const std::string& prefix) const {
  dot_lower.validate((prefix + ".dot_lower").c_str());
  dot_upper.validate((prefix + ".dot_upper").c_str());
  material.validate();
  require(dot_lower.center.x == dot_upper.center.x && dot_lower.center.y == dot_upper.center.y,
          prefix + ".dot_upper.center", "dots must share a common z axis");
  require(dot_lower.width > dot_upper.width, prefix + ".dot_upper.width",
          "lower dot must be wider than the upper dot");
  require(finite(barrier_gap) && barrier_gap > 0, prefix + ".barrier_gap", "must be > 0");
  require(std::abs(dot_upper.z_min() - dot_lower.z_max() - barrier_gap) < 1e-9,
          prefix + ".barrier_gap", "dot z-extents must be separated by barrier_gap");
  require(finite(v_vertical) && v_vertical > 0, prefix + ".v_vertical", "must be > 0");
  require(finite(v_lateral) && v_lateral > v_vertical, prefix + ".v_lateral",
          "must exceed v_vertical");
}

MoleculeGeometry make_molecule(double lower_width, double lower_height, double upper_width,
                               double upper_height, double barrier_gap, double v_lateral,
                               double v_vertical, const Material& material, double x0, double y0,
                               double z_mid) {
  MoleculeGeometry g;
  g.dot_lower.width = lower_width;
  g.dot_lower.height = lower_height;
  g.dot_lower.center = {x0, y0, z_mid - 0.5 * barrier_gap - 0.5 * lower_height};
  g.dot_upper.width = upper_width;
  g.dot_upper.height = upper_height;
  g.dot_upper.center = {x0, y0, z_mid + 0.5 * barrier_gap + 0.5 * upper_height};
  g.barrier_gap = barrier_gap;
  g.v_lateral = v_lateral;
  g.v_vertical = v_vertical;
  g.material = material;
  return g;
}

const char* to_string(ElectrodeState s) {
  return s == ElectrodeState::kFloating ? "floating" : "grounded";
}

ElectrodeState electrode_state_from_string(const std::string& s) {
  if (s == "floating") return ElectrodeState::kFloating;
  if (s == "grounded") return ElectrodeState::kGrounded;
  throw Error(ErrorCode::kInvalidArgument,
              "geometry.electrode_state: expected \"floating\" or \"grounded\", got \"" + s + "\"",
              "geometry.electrode_state");
}

void GateGeometry::validate() const {
  control.validate("geometry");
  target.validate("geometry.target");
  const double widest = std::max(control.max_width(), target.max_width());
  require(finite(lateral_separation) && lateral_separation > widest,
          "geometry.lateral_separation", "must exceed the widest dot");
  require(std::abs(target.axis_x() - control.axis_x() - lateral_separation) < 1e-9 &&
              target.axis_y() == control.axis_y(),
          "geometry.lateral_separation", "target axis must sit lateral_separation along +x");
  require(finite(electrode_plane_gap) && electrode_plane_gap > 0,
          "geometry.electrode_plane_gap", "must be > 0");
}

void DriveField::validate() const {
  require(finite(amplitude) && amplitude >= 0, "drive.amplitude", "must be >= 0");
  require(finite(frequency) && frequency >= 0, "drive.frequency", "must be >= 0");
  require(finite(phase), "drive.phase", "must be finite");
}

double potential_at(const MoleculeGeometry& geom, const Vec3& r) {
  if (geom.dot_lower.contains(r) || geom.dot_upper.contains(r)) return 0.0;
  if (geom.dot_lower.in_z_range(r.z) || geom.dot_upper.in_z_range(r.z)) return geom.v_lateral;
  return geom.v_vertical;
}

namespace {
// Fraction of [a, b] covered by [c, d].
double overlap_fraction(double a, double b, double c, double d) {
  const double len = std::max(0.0, std::min(b, d) - std::max(a, c));
  return len / (b - a);
}
}  // namespace

double cell_average_potential(const MoleculeGeometry& geom, const Vec3& lo, const Vec3& hi) {
  double slab = 0.0;  // z-range of some dot, any lateral position
  double dots = 0.0;  // inside a dot box
  for (const DotGeometry* d : {&geom.dot_lower, &geom.dot_upper}) {
    const double fz = overlap_fraction(lo.z, hi.z, d->z_min(), d->z_max());
    const double hw = 0.5 * d->width;
    slab += fz;
    dots += fz * overlap_fraction(lo.x, hi.x, d->center.x - hw, d->center.x + hw) *
            overlap_fraction(lo.y, hi.y, d->center.y - hw, d->center.y + hw);
  }
  return geom.v_vertical * (1.0 - slab) + geom.v_lateral * (slab - dots);
}

MoleculeGeometry default_qubit() {
  return make_molecule(24.0, 20.0, 22.0, 15.0, 7.0, 1000.0, 240.0, gaas());
}

GateGeometry default_cn_gate() {
  GateGeometry g;
  g.control = default_qubit();
  g.target = make_molecule(29.0, 20.0, 27.0, 15.0, 7.0, 1000.0, 240.0, gaas(),
                           kDefaultLateralSeparation);
  g.lateral_separation = kDefaultLateralSeparation;
  g.electrode_state = ElectrodeState::kFloating;
  g.electrode_plane_gap = kDefaultElectrodePlaneGap;
  return g;
}

}  // namespace qdmol
