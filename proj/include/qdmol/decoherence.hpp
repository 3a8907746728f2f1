#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qdmol/basis.hpp"
#include "qdmol/dynamics.hpp"
#include "qdmol/grid.hpp"
#include "qdmol/model.hpp"

namespace qdmol {

// GaAs LO phonon energy; transitions must stay below it for the acoustic-only
// model to apply.
inline constexpr double kOpticalPhononEnergy = 36.0;  // meV

struct PhononEnvironment {
  Material material = gaas();
  double temperature = 0.0;        // K
  double transition_energy = 0.0;  // meV

  // q0 = dE / (hbar U_s), 1/nm (linear dispersion w_q = q U_s)
  double wavenumber() const;
  void validate() const;
};

// F(q) = <f| exp(i q.r) |i> for the trilinear interpolant of psi_f psi_i on
// the grid: the node sum times prod_a sinc^2(q_a h_a / 2). Reduces to plain
// grid quadrature for q h << 1 and suppresses aliasing near and above the
// grid's Nyquist wavenumber.
class FormFactor {
 public:
  // Throws kGridMismatch if the states live on different grids.
  FormFactor(const Wavefunction& psi_i, const Wavefunction& psi_f);
  std::complex<double> operator()(const Vec3& q) const;
  // Largest q.h product along any axis for |q| = q0; > pi means the grid
  // cannot resolve the plane wave.
  double resolution(double q0) const;

 private:
  std::array<std::vector<double>, 3> coords_;
  std::array<double, 3> spacing_{};
  std::vector<double> product_;  // psi_f psi_i dV over the cropped support
};

std::complex<double> form_factor(const Wavefunction& psi_i, const Wavefunction& psi_f, const Vec3& q);

struct PhononRateOptions {
  std::size_t polar_nodes = 12;      // Gauss-Legendre in cos(theta)
  std::size_t azimuthal_nodes = 24;  // uniform in phi
  std::size_t max_polar_nodes = 384;
  double tolerance = 0.05;  // relative change on doubling the node count
};

struct PhononRate {
  double rate = 0.0;                   // 1/s, including the thermal factor
  double zero_temperature_rate = 0.0;  // 1/s
  double angular_integral = 0.0;       // int dOmega |F(q0 qhat)|^2
  double prefactor = 0.0;              // 1/s per unit angular integral
  double wavenumber = 0.0;             // q0, 1/nm
  double thermal_factor = 1.0;
  std::size_t nodes = 0;               // angular nodes of the accepted estimate
  double last_change = 0.0;            // relative change at acceptance
  double resolution = 0.0;             // FormFactor::resolution(q0)
};

// D^2 q0^3 / (8 pi^2 rho hbar U_s^2) in 1/s.
double golden_rule_prefactor(const PhononEnvironment& env);

// Product rule: Gauss-Legendre in cos(theta) times the periodic trapezoid in phi.
double angular_integral(const std::function<double(const Vec3& unit)>& integrand,
                        std::size_t polar_nodes, std::size_t azimuthal_nodes);

// Golden-rule LA-phonon emission rate from psi_i to psi_f (deformation
// potential, linear dispersion), times the thermal factor. Doubles the angular
// nodes until the relative change is within tolerance; throws
// kQuadratureUnconverged otherwise.
PhononRate phonon_rate(const PhononEnvironment& env, const Wavefunction& psi_i,
                       const Wavefunction& psi_f, const PhononRateOptions& options = {});

// 1 + n_q with n_q = 1 / (exp(dE / kT) - 1); exactly 1 at T = 0.
double thermal_factor(const PhononEnvironment& env);
double bose_occupation(double energy_mev, double temperature_k);

using DensityMatrix = Eigen::Matrix2cd;

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

struct DissipativeOptions {
  EvolveOptions evolve;
  double thermal_occupation = 0.0;  // n_q; absorption runs at gamma * n_q
};

// Lindblad evolution with emission |0><1| at gamma (1+n) and absorption
// |1><0| at gamma n, by Strang splitting: half-step exact damping, exponential
// midpoint drive step, half-step damping. gamma in 1/s.
DensityTrajectory dissipative_evolve(const QubitParams& q, const DensityMatrix& rho0,
                                     const PulseSchedule& schedule, double gamma,
                                     const DissipativeOptions& options = {});

DensityMatrix pure_density(const QuantumState& psi);

// arccos sqrt(F) with F = Tr(rho sigma) for a pure sigma.
double bures_angle_to_pure(const DensityMatrix& rho, const DensityMatrix& pure);

}  // namespace qdmol
