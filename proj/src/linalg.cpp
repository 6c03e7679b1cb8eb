#include "cipstokes/linalg.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cipstokes {

void TripletAccumulator::add_local(std::span<const Eigen::Index> rows,
                                   std::span<const Eigen::Index> cols,
                                   const Eigen::MatrixXd& local) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      add(rows[i], cols[j], local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
}

SparseMatrix TripletAccumulator::build(Eigen::Index rows, Eigen::Index cols) const {
  SparseMatrix a(rows, cols);
  a.setFromTriplets(triplets_.begin(), triplets_.end());
  a.makeCompressed();
  return a;
}

double max_asymmetry(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("max_asymmetry: matrix not square");
  const SparseMatrix at = a.transpose();
  const SparseMatrix diff = a - at;
  double m = 0.0;
  for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) m = std::max(m, std::abs(diff.valuePtr()[k]));
  return m;
}

DofSubset::DofSubset(Eigen::Index full_size, std::span<const Eigen::Index> removed)
    : full_to_kept_(static_cast<std::size_t>(full_size), 0) {
  for (auto r : removed) {
    if (r < 0 || r >= full_size) throw std::out_of_range("DofSubset: removed index out of range");
    full_to_kept_[static_cast<std::size_t>(r)] = -1;
  }
  for (Eigen::Index i = 0; i < full_size; ++i) {
    auto& slot = full_to_kept_[static_cast<std::size_t>(i)];
    if (slot == 0) {
      slot = static_cast<Eigen::Index>(kept_.size());
      kept_.push_back(i);
    }
  }
}

SparseMatrix DofSubset::restrict(const SparseMatrix& a) const {
  if (a.rows() != full_size() || a.cols() != full_size()) {
    throw std::invalid_argument("DofSubset::restrict: shape mismatch");
  }
  TripletAccumulator acc;
  acc.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    const auto rr = full_to_kept_[static_cast<std::size_t>(r)];
    if (rr < 0) continue;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      const auto cc = full_to_kept_[static_cast<std::size_t>(it.col())];
      if (cc >= 0) acc.add(rr, cc, it.value());
    }
  }
  return acc.build(size(), size());
}

Vector DofSubset::restrict(const Vector& v) const {
  if (v.size() != full_size()) throw std::invalid_argument("DofSubset::restrict: size mismatch");
  Vector out(size());
  for (std::size_t i = 0; i < kept_.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[kept_[i]];
  return out;
}

Vector DofSubset::extend(const Vector& v) const {
  if (v.size() != size()) throw std::invalid_argument("DofSubset::extend: size mismatch");
  Vector out = Vector::Zero(full_size());
  for (std::size_t i = 0; i < kept_.size(); ++i) out[kept_[i]] = v[static_cast<Eigen::Index>(i)];
  return out;
}

BlockMatrix::BlockMatrix(std::vector<Eigen::Index> row_sizes, std::vector<Eigen::Index> col_sizes)
    : row_sizes_(std::move(row_sizes)), col_sizes_(std::move(col_sizes)) {}

void BlockMatrix::add(std::size_t bi, std::size_t bj, double scale, const SparseMatrix& m) {
  if (bi >= row_sizes_.size() || bj >= col_sizes_.size()) {
    throw std::out_of_range("BlockMatrix::add: block index");
  }
  if (m.rows() != row_sizes_[bi] || m.cols() != col_sizes_[bj]) {
    throw std::invalid_argument("BlockMatrix::add: block shape mismatch");
  }
  terms_.push_back({bi, bj, scale, &m});
}

Eigen::Index BlockMatrix::rows() const {
  return std::accumulate(row_sizes_.begin(), row_sizes_.end(), Eigen::Index{0});
}
Eigen::Index BlockMatrix::cols() const {
  return std::accumulate(col_sizes_.begin(), col_sizes_.end(), Eigen::Index{0});
}

SparseMatrix BlockMatrix::assemble() const {
  std::vector<Eigen::Index> row_offset(row_sizes_.size() + 1, 0);
  std::vector<Eigen::Index> col_offset(col_sizes_.size() + 1, 0);
  std::partial_sum(row_sizes_.begin(), row_sizes_.end(), row_offset.begin() + 1);
  std::partial_sum(col_sizes_.begin(), col_sizes_.end(), col_offset.begin() + 1);
  TripletAccumulator acc;
  for (const auto& t : terms_) {
    if (t.scale == 0.0) continue;
    for (Eigen::Index r = 0; r < t.matrix->outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(*t.matrix, r); it; ++it) {
        acc.add(row_offset[t.bi] + r, col_offset[t.bj] + it.col(), t.scale * it.value());
      }
    }
  }
  return acc.build(rows(), cols());
}

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  const double nb = b.norm();
  const double nr = (a * x - b).norm();
  return nb > 0.0 ? nr / nb : nr;
}

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Residual b - A x accumulated in extended precision, so that refinement is
// not limited by rounding in the residual itself. scale receives |A||x| + |b|.
Vector extended_residual(const SparseMatrix& a, const Vector& x, const Vector& b, Vector* scale) {
  Vector r(a.rows());
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    long double acc = b[i];
    long double mag = std::abs(b[i]);
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      const long double term = static_cast<long double>(it.value()) * x[it.col()];
      acc -= term;
      mag += std::abs(term);
    }
    r[i] = static_cast<double>(acc);
    if (scale) (*scale)[i] = static_cast<double>(mag);
  }
  return r;
}

template <class Factor>
Vector refine_solve(const Factor& factor, const SparseMatrix& a, const Vector& b, double rtol,
                    const char* who) {
  if (b.size() != a.rows()) throw std::invalid_argument(std::string(who) + ": rhs size mismatch");
  const double nb = b.norm();
  if (nb == 0.0) return Vector::Zero(a.cols());
  Vector scale(a.rows());
  Vector x = factor.solve(b);
  Vector r = extended_residual(a, x, b, &scale);
  double res = r.norm() / nb;
  for (int it = 0; it < 3 && res > rtol; ++it) {
    x += factor.solve(r);
    r = extended_residual(a, x, b, &scale);
    res = r.norm() / nb;
  }
  // Once the residual is at the rounding level of A x itself, no double
  // precision x can do better; accept that as converged.
  const double floor = kBackwardErrorFactor * std::numeric_limits<double>::epsilon() * scale.norm();
  if (!(res <= rtol) && !(r.norm() <= floor)) {
    std::ostringstream msg;
    msg << who << ": relative residual " << res << " exceeds " << rtol;
    throw SolverError(msg.str(), res);
  }
  return x;
}

} // namespace

struct SpdSolver::Impl {
  SparseMatrix a;
  Eigen::SimplicialLLT<ColMatrix> llt;
};

SpdSolver::SpdSolver(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SpdSolver: matrix not square");
  impl_->a = a;
  impl_->llt.compute(ColMatrix(a));
  if (impl_->llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("SpdSolver: matrix is not positive definite");
  }
}
SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Vector SpdSolver::solve(const Vector& b, double rtol) const {
  return refine_solve(impl_->llt, impl_->a, b, rtol, "solve_spd");
}
Eigen::Index SpdSolver::size() const { return impl_->a.rows(); }

struct LuSolver::Impl {
  SparseMatrix a;
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
};

LuSolver::LuSolver(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("LuSolver: matrix not square");
  impl_->a = a;
  ColMatrix ca(a);
  ca.makeCompressed();
  impl_->lu.compute(ca);
  if (impl_->lu.info() != Eigen::Success) {
    throw SolverError("solve_general: singular matrix (" + impl_->lu.lastErrorMessage() + ")",
                      std::numeric_limits<double>::infinity());
  }
}
LuSolver::~LuSolver() = default;
LuSolver::LuSolver(LuSolver&&) noexcept = default;
LuSolver& LuSolver::operator=(LuSolver&&) noexcept = default;

Vector LuSolver::solve(const Vector& b, double rtol) const {
  return refine_solve(impl_->lu, impl_->a, b, rtol, "solve_general");
}
Eigen::Index LuSolver::size() const { return impl_->a.rows(); }

Vector solve_spd(const SparseMatrix& a, const Vector& b, double rtol) {
  return SpdSolver(a).solve(b, rtol);
}

Vector solve_general(const SparseMatrix& a, const Vector& b, double rtol) {
  return LuSolver(a).solve(b, rtol);
}

Vector solve_general(const BlockMatrix& a, const Vector& b, double rtol) {
  return solve_general(a.assemble(), b, rtol);
}

} // namespace cipstokes
