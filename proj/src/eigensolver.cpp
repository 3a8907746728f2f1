#include "qdmol/eigensolver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "qdmol/error.hpp"
#include "qdmol/units.hpp"

namespace qdmol {

HamiltonianOperator::HamiltonianOperator(Grid3D grid, std::vector<double> potential,
                                         double mass_ratio)
    : grid_(grid), potential_(std::move(potential)), mass_ratio_(mass_ratio) {
  if (potential_.size() != grid_.size()) {
    throw Error(ErrorCode::kGridMismatch, "potential does not match grid size");
  }
  if (!(mass_ratio > 0)) throw Error(ErrorCode::kInvalidArgument, "mass ratio must be > 0");
  const double t = units::kinetic_prefactor(mass_ratio);
  kinetic_diagonal_ = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double h = grid_.spacing(a);
    hop_[a] = t / (h * h);
    kinetic_diagonal_ += 2.0 * hop_[a];
  }
}

void HamiltonianOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t nx = grid_.points[0], ny = grid_.points[1], nz = grid_.points[2];
  const std::size_t sx = 1, sy = nx, sz = nx * ny;
  const double tx = hop_[0], ty = hop_[1], tz = hop_[2];
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t row = (k * ny + j) * nx;
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t p = row + i;
        double acc = (kinetic_diagonal_ + potential_[p]) * x[p];
        if (i > 0) acc -= tx * x[p - sx];
        if (i + 1 < nx) acc -= tx * x[p + sx];
        if (j > 0) acc -= ty * x[p - sy];
        if (j + 1 < ny) acc -= ty * x[p + sy];
        if (k > 0) acc -= tz * x[p - sz];
        if (k + 1 < nz) acc -= tz * x[p + sz];
        y[p] = acc;
      }
    }
  }
}

Eigen::SparseMatrix<double> HamiltonianOperator::to_sparse() const {
  const std::size_t nx = grid_.points[0], ny = grid_.points[1], nz = grid_.points[2];
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size() * 7);
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        const auto p = static_cast<int>(grid_.index(i, j, k));
        trips.emplace_back(p, p, diagonal(p));
        auto link = [&](std::size_t ii, std::size_t jj, std::size_t kk, double t) {
          trips.emplace_back(p, static_cast<int>(grid_.index(ii, jj, kk)), -t);
        };
        if (i > 0) link(i - 1, j, k, hop_[0]);
        if (i + 1 < nx) link(i + 1, j, k, hop_[0]);
        if (j > 0) link(i, j - 1, k, hop_[1]);
        if (j + 1 < ny) link(i, j + 1, k, hop_[1]);
        if (k > 0) link(i, j, k - 1, hop_[2]);
        if (k + 1 < nz) link(i, j, k + 1, hop_[2]);
      }
  Eigen::SparseMatrix<double> m(static_cast<int>(size()), static_cast<int>(size()));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

HamiltonianOperator discretize(const std::function<double(const Vec3&)>& potential,
                               double mass_ratio, const Grid3D& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.points[2]; ++k)
    for (std::size_t j = 0; j < grid.points[1]; ++j)
      for (std::size_t i = 0; i < grid.points[0]; ++i)
        v[grid.index(i, j, k)] = potential(grid.node(i, j, k));
  return HamiltonianOperator(grid, std::move(v), mass_ratio);
}

HamiltonianOperator discretize(const MoleculeGeometry& geom, const Grid3D& grid) {
  geom.validate();
  check_grid_contains(geom, grid);
  const double hx = 0.5 * grid.spacing(0), hy = 0.5 * grid.spacing(1), hz = 0.5 * grid.spacing(2);
  return discretize(
      [&](const Vec3& r) {
        return cell_average_potential(geom, {r.x - hx, r.y - hy, r.z - hz},
                                      {r.x + hx, r.y + hy, r.z + hz});
      },
      geom.material.effective_mass_ratio, grid);
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// (K + sigma)^-1 with K the Dirichlet finite-difference kinetic operator,
// applied through a 3D DST-I, sandwiched between diagonal scalings that
// account for the local potential.
class KineticPreconditioner {
 public:
  explicit KineticPreconditioner(const HamiltonianOperator& op) : n_(op.size()) {
    const auto& g = op.grid();
    buffer_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      plan_ = fftw_plan_r2r_3d(static_cast<int>(g.points[2]), static_cast<int>(g.points[1]),
                               static_cast<int>(g.points[0]), buffer_, buffer_, FFTW_RODFT00,
                               FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    }
    std::array<std::vector<double>, 3> lam;
    double lowest = 0.0;
    for (int a = 0; a < 3; ++a) {
      const std::size_t n = g.points[a];
      lam[a].resize(n);
      for (std::size_t m = 0; m < n; ++m) {
        lam[a][m] = 2.0 * op.hopping(a) *
                    (1.0 - std::cos(units::kPi * static_cast<double>(m + 1) /
                                    static_cast<double>(n + 1)));
      }
      lowest += lam[a][0];
    }
    sigma_ = lowest;
    double norm = 1.0;
    for (int a = 0; a < 3; ++a) norm *= 2.0 * static_cast<double>(g.points[a] + 1);
    inv_.resize(n_);
    for (std::size_t k = 0; k < g.points[2]; ++k)
      for (std::size_t j = 0; j < g.points[1]; ++j)
        for (std::size_t i = 0; i < g.points[0]; ++i)
          inv_[g.index(i, j, k)] = 1.0 / ((lam[0][i] + lam[1][j] + lam[2][k] + sigma_) * norm);
    scale_.resize(n_);
    const double kd = op.kinetic_diagonal();
    for (std::size_t p = 0; p < n_; ++p) {
      scale_[p] = std::sqrt((kd + sigma_) / (kd + std::max(op.potential()[p], 0.0) + sigma_));
    }
  }
  ~KineticPreconditioner() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }
  KineticPreconditioner(const KineticPreconditioner&) = delete;
  KineticPreconditioner& operator=(const KineticPreconditioner&) = delete;

  void apply(const double* r, double* out) const {
    for (std::size_t p = 0; p < n_; ++p) buffer_[p] = scale_[p] * r[p];
    fftw_execute(plan_);
    for (std::size_t p = 0; p < n_; ++p) buffer_[p] *= inv_[p];
    fftw_execute(plan_);
    for (std::size_t p = 0; p < n_; ++p) out[p] = scale_[p] * buffer_[p];
  }

 private:
  std::size_t n_;
  double* buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
  double sigma_ = 0.0;
  std::vector<double> inv_;
  std::vector<double> scale_;
};

// Uniform in [-0.5, 0.5) from raw engine bits, so start vectors do not depend
// on the standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
}

// Two passes of classical Gram-Schmidt against the first m columns of V.
// Returns the norm left after projection relative to the input norm.
double orthogonalize(const MatrixXd& V, Eigen::Index m, VectorXd& t) {
  const double before = t.norm();
  if (before == 0.0) return 0.0;
  for (int pass = 0; pass < 2 && m > 0; ++pass) {
    VectorXd h = V.leftCols(m).transpose() * t;
    t.noalias() -= V.leftCols(m) * h;
  }
  return t.norm() / before;
}

}  // namespace

EigenResult solve_lowest(const HamiltonianOperator& op, std::size_t k, double tol,
                         const SolverOptions& options) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "solve_lowest needs k >= 2");
  const auto n = static_cast<Eigen::Index>(op.size());
  const auto block = static_cast<Eigen::Index>(k + 2);
  if (block >= n) throw Error(ErrorCode::kInvalidArgument, "grid too small for requested k");
  const Eigen::Index max_dim =
      std::min<Eigen::Index>(n, options.max_subspace ? static_cast<Eigen::Index>(options.max_subspace)
                                                     : std::max<Eigen::Index>(8 * block, 40));
  const Eigen::Index keep = std::min<Eigen::Index>(3 * block, max_dim - block);

  KineticPreconditioner precond(op);
  auto matvec = [&](const double* x, double* y) {
    op.apply(std::span<const double>(x, op.size()), std::span<double>(y, op.size()));
  };

  MatrixXd V(n, max_dim), AV(n, max_dim);
  Eigen::Index m = 0;
  std::mt19937_64 rng(options.seed);
  {
    VectorXd t(n);
    while (m < block) {
      for (Eigen::Index p = 0; p < n; ++p) t[p] = unit_uniform(rng);
      if (orthogonalize(V, m, t) < 1e-8) continue;
      V.col(m) = t / t.norm();
      matvec(V.col(m).data(), AV.col(m).data());
      ++m;
    }
  }

  VectorXd theta;
  MatrixXd X, AX, R;
  std::vector<double> rel(static_cast<std::size_t>(block), 0.0);
  double best = std::numeric_limits<double>::infinity();
  VectorXd t(n);
  MatrixXd G = MatrixXd::Zero(max_dim, max_dim);
  Eigen::Index g_done = 0;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    for (Eigen::Index j = g_done; j < m; ++j) {
      G.col(j).head(m) = V.leftCols(m).transpose() * AV.col(j);
      G.row(j).head(j) = G.col(j).head(j).transpose();
    }
    g_done = m;
    const MatrixXd Gm = 0.5 * (G.topLeftCorner(m, m) + G.topLeftCorner(m, m).transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Gm);
    theta = es.eigenvalues().head(block);
    const MatrixXd S = es.eigenvectors().leftCols(block);
    X.noalias() = V.leftCols(m) * S;
    AX.noalias() = AV.leftCols(m) * S;
    R = AX - X * theta.asDiagonal();

    bool all = true;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < block; ++i) {
      rel[static_cast<std::size_t>(i)] = R.col(i).norm() / std::max(AX.col(i).norm(), 1e-300);
      if (i < static_cast<Eigen::Index>(k)) {
        worst = std::max(worst, rel[static_cast<std::size_t>(i)]);
        if (rel[static_cast<std::size_t>(i)] > tol) all = false;
      }
    }
    best = std::min(best, worst);
    if (all) {
      EigenResult out;
      out.iterations = iter;
      const double scale = 1.0 / std::sqrt(op.grid().cell_volume());
      for (std::size_t i = 0; i < k; ++i) {
        out.energies.push_back(theta[static_cast<Eigen::Index>(i)]);
        out.residuals.push_back(rel[i]);
        Wavefunction psi{op.grid(), std::vector<double>(op.size())};
        const auto col = X.col(static_cast<Eigen::Index>(i));
        const double sum = col.sum();
        const double sign = sum < 0 ? -1.0 : 1.0;
        for (Eigen::Index p = 0; p < n; ++p) psi.values[p] = sign * col[p] * scale;
        out.states.push_back(std::move(psi));
      }
      return out;
    }

    // Collapse onto the current Ritz block when the next expansion would overflow.
    Eigen::Index pending = 0;
    for (Eigen::Index i = 0; i < block; ++i)
      if (rel[static_cast<std::size_t>(i)] > tol) ++pending;
    if (m + pending > max_dim) {
      const MatrixXd Sk = es.eigenvectors().leftCols(keep);
      MatrixXd Vk = V.leftCols(m) * Sk;
      MatrixXd AVk = AV.leftCols(m) * Sk;
      V.leftCols(keep) = Vk;
      AV.leftCols(keep) = AVk;
      m = keep;
      G.setZero();
      G.topLeftCorner(keep, keep) = es.eigenvalues().head(keep).asDiagonal();
      g_done = keep;
    }

    // Block expansion: preconditioned residuals, projected against V with two
    // block Gram-Schmidt passes, then orthonormalized among themselves.
    std::vector<Eigen::Index> todo;
    for (Eigen::Index i = 0; i < block; ++i)
      if (rel[static_cast<std::size_t>(i)] > tol) todo.push_back(i);
    const auto nt = std::min<Eigen::Index>(static_cast<Eigen::Index>(todo.size()), max_dim - m);
    MatrixXd T(n, nt);
    for (Eigen::Index c = 0; c < nt; ++c) {
      precond.apply(R.col(todo[static_cast<std::size_t>(c)]).data(), T.col(c).data());
      T.col(c) /= T.col(c).norm();
    }
    for (int pass = 0; pass < 2; ++pass) {
      const MatrixXd H = V.leftCols(m).transpose() * T;
      T.noalias() -= V.leftCols(m) * H;
    }
    const Eigen::Index m0 = m;
    for (Eigen::Index c = 0; c < nt && m < max_dim; ++c) {
      t = T.col(c);
      const double before = t.norm();
      for (int pass = 0; pass < 2 && m > m0; ++pass) {
        const VectorXd h = V.middleCols(m0, m - m0).transpose() * t;
        t.noalias() -= V.middleCols(m0, m - m0) * h;
      }
      if (t.norm() < 1e-10 * before) continue;
      t /= t.norm();
      V.col(m) = t;
      matvec(V.col(m).data(), AV.col(m).data());
      ++m;
    }
  }
  throw Error(ErrorCode::kNoConvergence,
              "eigensolver hit the iteration cap; best relative residual " + std::to_string(best));
}

Modes1D solve_1d(std::span<const double> profile, double spacing, double mass_ratio,
                 std::size_t count) {
  const std::size_t n = profile.size();
  if (n < 64) throw Error(ErrorCode::kInvalidArgument, "solve_1d needs at least 64 grid points");
  if (!(spacing > 0) || !(mass_ratio > 0) || count == 0 || count > n) {
    throw Error(ErrorCode::kInvalidArgument, "solve_1d: bad spacing, mass or mode count");
  }
  const double hop = units::kinetic_prefactor(mass_ratio) / (spacing * spacing);
  VectorXd diag(n), sub(n - 1);
  for (std::size_t i = 0; i < n; ++i) diag[static_cast<Eigen::Index>(i)] = 2.0 * hop + profile[i];
  sub.setConstant(-hop);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::kNoConvergence, "tridiagonal solve failed");
  Modes1D out;
  out.spacing = spacing;
  const double scale = 1.0 / std::sqrt(spacing);
  for (std::size_t m = 0; m < count; ++m) {
    out.energies.push_back(es.eigenvalues()[static_cast<Eigen::Index>(m)]);
    const auto col = es.eigenvectors().col(static_cast<Eigen::Index>(m));
    // Sign: first significant lobe positive.
    double sign = 1.0;
    for (Eigen::Index p = 0; p < col.size(); ++p) {
      if (std::abs(col[p]) > 1e-3 * col.cwiseAbs().maxCoeff()) {
        sign = col[p] < 0 ? -1.0 : 1.0;
        break;
      }
    }
    std::vector<double> mode(n);
    for (std::size_t p = 0; p < n; ++p) mode[p] = sign * col[static_cast<Eigen::Index>(p)] * scale;
    out.modes.push_back(std::move(mode));
  }
  return out;
}

std::vector<double> axial_profile(const MoleculeGeometry& geom, double z_lo, double z_hi,
                                  std::size_t n) {
  std::vector<double> v(n);
  const double h = (z_hi - z_lo) / static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = potential_at(geom, {geom.axis_x(), geom.axis_y(), z_lo + static_cast<double>(i + 1) * h});
  }
  return v;
}

double localization(const Wavefunction& psi, const DotGeometry& dot) {
  const auto& g = psi.grid;
  double s = 0.0;
  for (std::size_t k = 0; k < g.points[2]; ++k)
    for (std::size_t j = 0; j < g.points[1]; ++j)
      for (std::size_t i = 0; i < g.points[0]; ++i)
        if (dot.contains(g.node(i, j, k))) {
          const double v = psi.values[g.index(i, j, k)];
          s += v * v;
        }
  return s * g.cell_volume();
}

}  // namespace qdmol
