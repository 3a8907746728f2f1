#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "qdmol/grid.hpp"
#include "qdmol/model.hpp"

namespace qdmol {

// Matrix-free single-particle Hamiltonian -hbar^2/(2m*) lap + V on a Dirichlet
// grid, 7-point stencil. Symmetric by construction.
class HamiltonianOperator {
 public:
  HamiltonianOperator(Grid3D grid, std::vector<double> potential, double mass_ratio);

  const Grid3D& grid() const { return grid_; }
  std::size_t size() const { return potential_.size(); }
  double mass_ratio() const { return mass_ratio_; }
  const std::vector<double>& potential() const { return potential_; }
  // hbar^2 / (2 m* h_axis^2), meV
  double hopping(int axis) const { return hop_[axis]; }
  double diagonal(std::size_t idx) const { return kinetic_diagonal_ + potential_[idx]; }
  double kinetic_diagonal() const { return kinetic_diagonal_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  Eigen::SparseMatrix<double> to_sparse() const;

 private:
  Grid3D grid_;
  std::vector<double> potential_;
  double mass_ratio_;
  double hop_[3];
  double kinetic_diagonal_;
};

HamiltonianOperator discretize(const MoleculeGeometry& geom, const Grid3D& grid);
// Arbitrary potential (meV) sampled at the grid nodes; no padding checks.
HamiltonianOperator discretize(const std::function<double(const Vec3&)>& potential,
                               double mass_ratio, const Grid3D& grid);

struct EigenResult {
  std::vector<double> energies;  // meV, ascending
  std::vector<Wavefunction> states;
  std::vector<double> residuals;  // |H psi - E psi| / |H psi|
  int iterations = 0;
};

struct SolverOptions {
  std::uint64_t seed = 1;
  int max_iterations = 600;
  std::size_t max_subspace = 0;  // 0: chosen from k
};

// k lowest eigenpairs by preconditioned block Davidson. The preconditioner is
// the exact inverse of the shifted Dirichlet Laplacian (DST-I), rescaled by
// the local potential. Throws kNoConvergence with the best residual reached.
EigenResult solve_lowest(const HamiltonianOperator& op, std::size_t k, double tol = 1e-6,
                         const SolverOptions& options = {});

struct Modes1D {
  std::vector<double> energies;             // meV, ascending
  std::vector<std::vector<double>> modes;   // sum psi^2 h = 1
  double spacing = 0.0;
};

// Tridiagonal solve of -hbar^2/(2m*) d^2/dz^2 + V(z) with psi = 0 one spacing
// beyond either end of `profile`.
Modes1D solve_1d(std::span<const double> profile, double spacing, double mass_ratio,
                 std::size_t count);

// Potential along the molecule axis at `n` nodes spanning the box of `grid`'s z axis.
std::vector<double> axial_profile(const MoleculeGeometry& geom, double z_lo, double z_hi,
                                  std::size_t n);

// Probability of psi inside the (open) dot box.
double localization(const Wavefunction& psi, const DotGeometry& dot);

}  // namespace qdmol
