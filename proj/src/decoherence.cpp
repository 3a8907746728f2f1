#include "qdmol/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include <gsl/gsl_integration.h>

#include "qdmol/error.hpp"
#include "qdmol/parallel.hpp"
#include "qdmol/units.hpp"

namespace qdmol {

double PhononEnvironment::wavenumber() const {
  const double velocity = material.sound_velocity * 1e9 / 1e12;  // nm/ps
  return transition_energy / (units::kHbar * velocity);
}

void PhononEnvironment::validate() const {
  material.validate();
  if (!(temperature >= 0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0", "temperature");
  }
  if (!(transition_energy > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "transition energy must be > 0 (emission)",
                "transition_energy");
  }
  if (!(transition_energy < kOpticalPhononEnergy)) {
    throw Error(ErrorCode::kInvalidArgument,
                "transition energy must lie below the optical phonon energy (36 meV)",
                "transition_energy");
  }
}

namespace {

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

constexpr double kSupportCutoff = 1e-14;  // relative to max |psi_f psi_i|

}  // namespace

FormFactor::FormFactor(const Wavefunction& psi_i, const Wavefunction& psi_f) {
  if (!(psi_i.grid == psi_f.grid) || psi_i.values.size() != psi_f.values.size()) {
    throw Error(ErrorCode::kGridMismatch, "form factor: states are on different grids");
  }
  const Grid3D& g = psi_i.grid;
  const double dv = g.cell_volume();
  double peak = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    peak = std::max(peak, std::abs(psi_i.values[n] * psi_f.values[n]));
  }
  std::array<std::size_t, 3> lo{g.points[0], g.points[1], g.points[2]}, hi{0, 0, 0};
  for (std::size_t k = 0; k < g.points[2]; ++k)
    for (std::size_t j = 0; j < g.points[1]; ++j)
      for (std::size_t i = 0; i < g.points[0]; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (std::abs(psi_i.values[n] * psi_f.values[n]) > kSupportCutoff * peak) {
          const std::size_t idx[3] = {i, j, k};
          for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], idx[a]);
            hi[a] = std::max(hi[a], idx[a] + 1);
          }
        }
      }
  if (peak == 0.0) {
    lo = {0, 0, 0};
    hi = {1, 1, 1};
  }
  for (int a = 0; a < 3; ++a) {
    spacing_[a] = g.spacing(a);
    for (std::size_t i = lo[a]; i < hi[a]; ++i) coords_[a].push_back(g.coord(a, i));
  }
  product_.reserve(coords_[0].size() * coords_[1].size() * coords_[2].size());
  for (std::size_t k = lo[2]; k < hi[2]; ++k)
    for (std::size_t j = lo[1]; j < hi[1]; ++j)
      for (std::size_t i = lo[0]; i < hi[0]; ++i) {
        const std::size_t n = g.index(i, j, k);
        product_.push_back(peak == 0.0 ? 0.0 : psi_i.values[n] * psi_f.values[n] * dv);
      }
}

std::complex<double> FormFactor::operator()(const Vec3& q) const {
  const double qv[3] = {q.x, q.y, q.z};
  const std::size_t nx = coords_[0].size(), ny = coords_[1].size(), nz = coords_[2].size();
  std::vector<double> cx(nx), sx(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    cx[i] = std::cos(qv[0] * coords_[0][i]);
    sx[i] = std::sin(qv[0] * coords_[0][i]);
  }
  std::vector<std::complex<double>> ey(ny), ez(nz);
  for (std::size_t j = 0; j < ny; ++j) ey[j] = std::polar(1.0, qv[1] * coords_[1][j]);
  for (std::size_t k = 0; k < nz; ++k) ez[k] = std::polar(1.0, qv[2] * coords_[2][k]);
  std::complex<double> total = 0.0;
  const double* p = product_.data();
  for (std::size_t k = 0; k < nz; ++k) {
    std::complex<double> plane = 0.0;
    for (std::size_t j = 0; j < ny; ++j, p += nx) {
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < nx; ++i) {
        re += p[i] * cx[i];
        im += p[i] * sx[i];
      }
      plane += std::complex<double>(re, im) * ey[j];
    }
    total += plane * ez[k];
  }
  double tent = 1.0;
  for (int a = 0; a < 3; ++a) {
    const double s = sinc(0.5 * qv[a] * spacing_[a]);
    tent *= s * s;
  }
  return total * tent;
}

double FormFactor::resolution(double q0) const {
  return q0 * std::max({spacing_[0], spacing_[1], spacing_[2]});
}

std::complex<double> form_factor(const Wavefunction& psi_i, const Wavefunction& psi_f, const Vec3& q) {
  return FormFactor(psi_i, psi_f)(q);
}

double golden_rule_prefactor(const PhononEnvironment& env) {
  const double d = env.material.deformation_potential_ev * units::si::kJoulePerEV;
  const double q0 = env.wavenumber() / units::si::kMeterPerNm;  // 1/m
  const double u = env.material.sound_velocity;
  return d * d * q0 * q0 * q0 /
         (8.0 * units::kPi * units::kPi * env.material.mass_density * units::si::kHbar * u * u);
}

namespace {

// Product rule over cos(theta) in [c_lo, 1].
double polar_cap_integral(const std::function<double(const Vec3& unit)>& integrand,
                          std::size_t polar_nodes, std::size_t azimuthal_nodes, double c_lo) {
  if (polar_nodes < 1 || azimuthal_nodes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "angular quadrature needs at least one node per axis");
  }
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(polar_nodes), &gsl_integration_glfixed_table_free);
  const std::size_t total = polar_nodes * azimuthal_nodes;
  std::vector<double> values(total);
  const double dphi = 2.0 * units::kPi / static_cast<double>(azimuthal_nodes);
  parallel_for(total, [&](std::size_t n) {
    const std::size_t it = n / azimuthal_nodes, ip = n % azimuthal_nodes;
    double c = 0.0, w = 0.0;
    gsl_integration_glfixed_point(c_lo, 1.0, it, &c, &w, table.get());
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double phi = (static_cast<double>(ip) + 0.5) * dphi;
    values[n] = w * dphi * integrand({s * std::cos(phi), s * std::sin(phi), c});
  });
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  return sum.value();
}

}  // namespace

double angular_integral(const std::function<double(const Vec3& unit)>& integrand,
                        std::size_t polar_nodes, std::size_t azimuthal_nodes) {
  return polar_cap_integral(integrand, polar_nodes, azimuthal_nodes, -1.0);
}

double bose_occupation(double energy_mev, double temperature_k) {
  if (!(temperature_k >= 0.0) || !std::isfinite(temperature_k)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0", "temperature");
  }
  if (!(energy_mev > 0.0)) throw Error(ErrorCode::kInvalidArgument, "phonon energy must be > 0", "energy");
  if (temperature_k == 0.0) return 0.0;
  return 1.0 / std::expm1(energy_mev / (units::kBoltzmann * temperature_k));
}

double thermal_factor(const PhononEnvironment& env) {
  if (!(env.temperature >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0", "temperature");
  }
  return 1.0 + bose_occupation(env.transition_energy, env.temperature);
}

PhononRate phonon_rate(const PhononEnvironment& env, const Wavefunction& psi_i,
                       const Wavefunction& psi_f, const PhononRateOptions& options) {
  env.validate();
  if (options.polar_nodes * options.azimuthal_nodes < 26) {
    throw Error(ErrorCode::kInvalidArgument, "angular quadrature needs at least 26 nodes");
  }
  PhononRate out;
  out.wavenumber = env.wavenumber();
  out.prefactor = golden_rule_prefactor(env);
  out.thermal_factor = thermal_factor(env);
  const FormFactor ff(psi_i, psi_f);
  out.resolution = ff.resolution(out.wavenumber);
  if (out.prefactor == 0.0) {
    out.nodes = options.polar_nodes * options.azimuthal_nodes;
    return out;
  }
  const double q0 = out.wavenumber;
  const auto integrand = [&](const Vec3& u) { return std::norm(ff({q0 * u.x, q0 * u.y, q0 * u.z})); };
  // |F(-q)| = |F(q)| for real states: integrate the upper hemisphere twice.
  const auto integrate = [&](std::size_t np, std::size_t na) {
    return 2.0 * polar_cap_integral(integrand, np, na, 0.0);
  };
  std::size_t np = options.polar_nodes, na = options.azimuthal_nodes;
  double previous = integrate(np, na);
  for (;;) {
    if (2 * np > options.max_polar_nodes) {
      throw Error(ErrorCode::kQuadratureUnconverged,
                  "phonon rate: angular quadrature did not settle within " +
                      std::to_string(options.tolerance) + " (last change " +
                      std::to_string(out.last_change) + ")");
    }
    np *= 2;
    na *= 2;
    const double current = integrate(np, na);
    out.last_change = std::abs(current - previous) / std::max(std::abs(current), 1e-300);
    previous = current;
    if (out.last_change <= options.tolerance) break;
  }
  out.angular_integral = previous;
  out.nodes = np * na;
  out.zero_temperature_rate = out.prefactor * previous;
  out.rate = out.zero_temperature_rate * out.thermal_factor;
  return out;
}

namespace {

// Exact solution of the damping generator over tau (ps): populations relax to
// the detailed-balance value at down + up, coherences at half that rate.
void damp(DensityMatrix& rho, double down, double up, double tau) {
  const double total = down + up;
  if (total == 0.0) return;
  const double decay = std::exp(-total * tau);
  const double p1_eq = up / total;
  const double p1 = rho(1, 1).real();
  const double trace = rho(0, 0).real() + p1;
  const double p1_new = p1_eq * trace + (p1 - p1_eq * trace) * decay;
  rho(1, 1) = p1_new;
  rho(0, 0) = trace - p1_new;
  const double coherence = std::exp(-0.5 * total * tau);
  rho(0, 1) *= coherence;
  rho(1, 0) *= coherence;
}

// exp(-i H h / hbar) for real symmetric 2x2 H, up to a global phase.
Eigen::Matrix2cd unitary_step(const Eigen::Matrix2cd& h, double dt) {
  // h = b0 + bx sx + by sy + bz sz; b0 only adds a global phase.
  const double bz = 0.5 * (h(0, 0).real() - h(1, 1).real());
  const double bx = h(0, 1).real();
  const double by = -h(0, 1).imag();
  const double b = std::sqrt(bx * bx + by * by + bz * bz);
  const double angle = b * dt / units::kHbar;
  const double c = std::cos(angle);
  const double s = b > 0 ? std::sin(angle) / b : 0.0;
  const std::complex<double> i1(0.0, 1.0);
  Eigen::Matrix2cd u;
  u << c - i1 * s * bz, -i1 * s * bx - s * by, -i1 * s * bx + s * by, c + i1 * s * bz;
  return u;
}

}  // namespace

DensityTrajectory dissipative_evolve(const QubitParams& q, const DensityMatrix& rho0,
                                     const PulseSchedule& schedule, double gamma,
                                     const DissipativeOptions& options) {
  if (!(gamma >= 0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be >= 0", "gamma");
  }
  if (!(options.thermal_occupation >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "thermal occupation must be >= 0");
  }
  schedule.validate();
  const auto& ev = options.evolve;
  if (!(ev.dt > 0)) throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  for (const auto& s : schedule.segments) {
    if (s.drive.amplitude > 0 && s.drive.frequency > 0 &&
        1.0 / s.drive.frequency < ev.min_steps_per_period * ev.dt) {
      throw Error(ErrorCode::kStepTooLarge, "time step does not resolve the drive period");
    }
  }
  const HamiltonianFn system = one_qubit_system(q);
  const double gamma_ps = gamma * units::si::kSecondPerPs;
  const double down = gamma_ps * (1.0 + options.thermal_occupation);
  const double up = gamma_ps * options.thermal_occupation;

  DensityTrajectory traj;
  DensityMatrix rho = rho0;
  traj.times.push_back(0.0);
  traj.states.push_back(rho);
  std::size_t step = 0;
  double seg_start = 0.0;
  for (std::size_t si = 0; si < schedule.segments.size(); ++si) {
    const auto& seg = schedule.segments[si];
    const auto n = static_cast<std::size_t>(std::ceil(seg.duration / ev.dt - 1e-9));
    const double h = seg.duration / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double start = seg_start + static_cast<double>(i) * h;
      damp(rho, down, up, 0.5 * h);
      const Eigen::Matrix2cd u = unitary_step(magnus_hamiltonian(system, seg, start, h), h);
      rho = u * rho * u.adjoint();
      damp(rho, down, up, 0.5 * h);
      ++step;
      const bool last = si + 1 == schedule.segments.size() && i + 1 == n;
      if (last || (ev.sample_every > 0 && step % ev.sample_every == 0)) {
        traj.times.push_back(seg_start + static_cast<double>(i + 1) * h);
        traj.states.push_back(rho);
      }
    }
    seg_start += seg.duration;
  }
  return traj;
}

DensityMatrix pure_density(const QuantumState& psi) {
  if (psi.dim() != 2) throw Error(ErrorCode::kInvalidArgument, "pure_density expects a qubit state");
  return psi.amplitudes * psi.amplitudes.adjoint();
}

double bures_angle_to_pure(const DensityMatrix& rho, const DensityMatrix& pure) {
  const double f = std::clamp((rho * pure).trace().real(), 0.0, 1.0);
  return std::acos(std::sqrt(f));
}

}  // namespace qdmol
