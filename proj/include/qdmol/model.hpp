#pragma once

#include <array>
#include <string>

namespace qdmol {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Bulk constants of the host semiconductor. Energies of the deformation
// potential are in eV, the rest SI, because they only enter the phonon rate.
struct Material {
  double effective_mass_ratio = 0.067;  // m*/m0
  double dielectric_constant = 10.0;
  double deformation_potential_ev = -6.8;
  double mass_density = 5.4e3;          // kg/m^3
  double sound_velocity = 3.4e3;        // m/s

  void validate() const;
};

// GaAs-like defaults. The printed 0.67 m0 is available through
// `Material::effective_mass_ratio`; see README for why 0.067 is the default.
Material gaas();

// Square cross-section box dot. All lengths in nm.
struct DotGeometry {
  double width = 0.0;   // side of the x-y square
  double height = 0.0;  // extent along z
  Vec3 center;

  double z_min() const { return center.z - 0.5 * height; }
  double z_max() const { return center.z + 0.5 * height; }
  // Open box: the faces themselves belong to the barrier.
  bool contains(const Vec3& r) const;
  bool in_z_range(double z) const { return z > z_min() && z < z_max(); }

  void validate(const char* name) const;
};

// Two vertically stacked dots sharing the axis (x0, y0). The lower dot is the
// larger one and hosts |0>. The barrier midpoint is the dipole origin.
struct MoleculeGeometry {
  DotGeometry dot_lower;
  DotGeometry dot_upper;
  double barrier_gap = 0.0;  // nm between the lower top face and the upper bottom face
  double v_lateral = 0.0;    // meV (V0)
  double v_vertical = 0.0;   // meV (V1)
  Material material;

  double axis_x() const { return dot_lower.center.x; }
  double axis_y() const { return dot_lower.center.y; }
  double barrier_mid_z() const { return 0.5 * (dot_lower.z_max() + dot_upper.z_min()); }
  double z_bottom() const { return dot_lower.z_min(); }
  double z_top() const { return dot_upper.z_max(); }
  double max_width() const;

  // Throws Error(kInvalidArgument) naming the violated field under `prefix`.
  void validate(const std::string& prefix = "geometry") const;
};

// Builds a molecule on the axis (x0, y0) with the barrier midpoint at z = z_mid.
MoleculeGeometry make_molecule(double lower_width, double lower_height, double upper_width,
                               double upper_height, double barrier_gap, double v_lateral,
                               double v_vertical, const Material& material, double x0 = 0.0,
                               double y0 = 0.0, double z_mid = 0.0);

enum class ElectrodeState { kFloating, kGrounded };

const char* to_string(ElectrodeState s);
ElectrodeState electrode_state_from_string(const std::string& s);

// Control and target molecules side by side along x. The control axis sits at
// x = 0, the target axis at x = lateral_separation.
struct GateGeometry {
  MoleculeGeometry control;
  MoleculeGeometry target;
  double lateral_separation = 0.0;   // nm, axis to axis
  ElectrodeState electrode_state = ElectrodeState::kFloating;
  double electrode_plane_gap = 0.0;  // nm, spacing of the grounded screening planes

  void validate() const;
};

struct DriveField {
  double amplitude = 0.0;  // mV/nm, polarized along z
  double frequency = 0.0;  // THz (omega / 2 pi)
  double phase = 0.0;      // rad, relative to t = 0

  void validate() const;
};

// Piecewise box confinement. Dot interiors are 0; a point whose z lies in a
// dot's z-range but outside its box sees V0; everything else sees V1.
double potential_at(const MoleculeGeometry& geom, const Vec3& r);

// Exact mean of potential_at over the axis-aligned box [lo, hi].
double cell_average_potential(const MoleculeGeometry& geom, const Vec3& lo, const Vec3& hi);

// Lower dot 24 x 24 x 20 nm, upper dot 22 x 22 x 15 nm, 7 nm barrier,
// V0 = 1000 meV, V1 = 240 meV.
MoleculeGeometry default_qubit();

// Control = default_qubit(); target dots 29 x 20 and 27 x 15 with a 7 nm barrier.
GateGeometry default_cn_gate();

inline constexpr double kDefaultLateralSeparation = 30.0;  // nm
inline constexpr double kDefaultElectrodePlaneGap = 5.0;   // nm

}  // namespace qdmol
