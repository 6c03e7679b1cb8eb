#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <span>
#include <vector>

#include "cipstokes/errors.hpp"

namespace cipstokes {

using Vector = Eigen::VectorXd;
/// Compressed-row storage with sorted, unique column indices per row.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Coordinate-format accumulator; duplicates are summed when the compressed
/// matrix is built.
class TripletAccumulator {
public:
  void add(Eigen::Index row, Eigen::Index col, double value) {
    triplets_.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
  }
  void add_local(std::span<const Eigen::Index> rows, std::span<const Eigen::Index> cols,
                 const Eigen::MatrixXd& local);
  void reserve(std::size_t n) { triplets_.reserve(n); }

  [[nodiscard]] SparseMatrix build(Eigen::Index rows, Eigen::Index cols) const;

private:
  std::vector<Eigen::Triplet<double, int>> triplets_;
};

/// max_ij |A_ij - A_ji|
[[nodiscard]] double max_asymmetry(const SparseMatrix& a);

/// Selection of a subset of unknowns, used for eliminating Dirichlet DOFs.
class DofSubset {
public:
  DofSubset() = default;
  DofSubset(Eigen::Index full_size, std::span<const Eigen::Index> removed);

  [[nodiscard]] Eigen::Index full_size() const { return static_cast<Eigen::Index>(full_to_kept_.size()); }
  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(kept_.size()); }
  [[nodiscard]] const std::vector<Eigen::Index>& kept() const { return kept_; }

  [[nodiscard]] SparseMatrix restrict(const SparseMatrix& a) const;
  [[nodiscard]] Vector restrict(const Vector& v) const;
  /// Scatter back into a full-length vector, zero on removed entries.
  [[nodiscard]] Vector extend(const Vector& v) const;

private:
  std::vector<Eigen::Index> kept_;
  std::vector<Eigen::Index> full_to_kept_; // -1 for removed
};

/// Grid of blocks, each a sum of scaled sparse matrices. Used for the dG
/// interval systems ((r+1) x (r+1) copies of the spatial operators) and for
/// saddle-point layouts.
class BlockMatrix {
public:
  BlockMatrix(std::vector<Eigen::Index> row_sizes, std::vector<Eigen::Index> col_sizes);

  /// block(bi, bj) += scale * m. The matrix is referenced, not copied, until
  /// assemble() is called.
  void add(std::size_t bi, std::size_t bj, double scale, const SparseMatrix& m);

  [[nodiscard]] Eigen::Index rows() const;
  [[nodiscard]] Eigen::Index cols() const;
  [[nodiscard]] SparseMatrix assemble() const;

private:
  struct Term {
    std::size_t bi;
    std::size_t bj;
    double scale;
    const SparseMatrix* matrix;
  };
  std::vector<Eigen::Index> row_sizes_;
  std::vector<Eigen::Index> col_sizes_;
  std::vector<Term> terms_;
};

inline constexpr double kDefaultRtol = 1e-10;
/// A solve also counts as converged when ||b - A x|| <= this factor times
/// eps * || |A||x| + |b| ||, i.e. x is exact up to rounding. Strongly
/// ill-conditioned systems (fine-mesh biharmonic) cannot reach rtol otherwise.
inline constexpr double kBackwardErrorFactor = 16.0;

/// ||A x - b|| / ||b|| (0 when b = 0 and x solves exactly).
[[nodiscard]] double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b);

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
/// Construction throws NotPositiveDefiniteError if a pivot is not positive.
class SpdSolver {
public:
  explicit SpdSolver(const SparseMatrix& a);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  /// Solves to ||Ax-b|| <= rtol ||b|| (with iterative refinement, or to the
  /// rounding floor, see kBackwardErrorFactor); throws SolverError carrying
  /// the achieved residual otherwise.
  [[nodiscard]] Vector solve(const Vector& b, double rtol = kDefaultRtol) const;
  [[nodiscard]] Eigen::Index size() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Sparse LU factorization for nonsymmetric or indefinite systems.
class LuSolver {
public:
  explicit LuSolver(const SparseMatrix& a);
  ~LuSolver();
  LuSolver(LuSolver&&) noexcept;
  LuSolver& operator=(LuSolver&&) noexcept;

  [[nodiscard]] Vector solve(const Vector& b, double rtol = kDefaultRtol) const;
  [[nodiscard]] Eigen::Index size() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class NotPositiveDefiniteError : public SolverError {
public:
  explicit NotPositiveDefiniteError(const std::string& what) : SolverError(what, -1.0) {}
};

[[nodiscard]] Vector solve_spd(const SparseMatrix& a, const Vector& b, double rtol = kDefaultRtol);
[[nodiscard]] Vector solve_general(const SparseMatrix& a, const Vector& b,
                                   double rtol = kDefaultRtol);
[[nodiscard]] Vector solve_general(const BlockMatrix& a, const Vector& b,
                                   double rtol = kDefaultRtol);

} // namespace cipstokes
