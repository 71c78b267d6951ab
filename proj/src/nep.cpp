#include "phoband/nep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "phoband/assembly.hpp"
#include "phoband/errors.hpp"

#ifdef PHOBAND_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace phoband {

namespace {

// g - T x accumulated in long double. Near an eigenvalue ||x|| is large, and a
// double accumulation would add rounding of order eps |T| |x| to the measured residual.
VecC residual_of(const SparseCplx& t, const VecC& x, const VecC& g, double& norm) {
  using ld = long double;
  const auto n = g.size();
  std::vector<ld> re(n), im(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    re[i] = g[i].real();
    im[i] = g[i].imag();
  }
  for (Eigen::Index j = 0; j < t.outerSize(); ++j) {
    const ld xr = x[j].real(), xi = x[j].imag();
    for (SparseCplx::InnerIterator it(t, j); it; ++it) {
      const ld ar = it.value().real(), ai = it.value().imag();
      re[it.row()] -= ar * xr - ai * xi;
      im[it.row()] -= ar * xi + ai * xr;
    }
  }
  VecC r(n);
  ld sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    r[i] = cplx(static_cast<double>(re[i]), static_cast<double>(im[i]));
    sum += re[i] * re[i] + im[i] * im[i];
  }
  norm = static_cast<double>(std::sqrt(sum));
  return r;
}

// base + W y over the first y.size() columns, rounded once. Near an eigenvalue the
// terms are large and nearly cancel; summing them in double leaves an error that T does
// not damp, unlike the LU error which lies along the near-null vector.
VecC combine(const Eigen::MatrixXcd& w, const VecC& y, const VecC* base = nullptr) {
  using ld = long double;
  const auto n = w.rows();
  VecC out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ld re = base ? (*base)[i].real() : 0.0, im = base ? (*base)[i].imag() : 0.0;
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      const ld ar = w(i, j).real(), ai = w(i, j).imag(), yr = y[j].real(), yi = y[j].imag();
      re += ar * yr - ai * yi;
      im += ar * yi + ai * yr;
    }
    out[i] = cplx(static_cast<double>(re), static_cast<double>(im));
  }
  return out;
}

}  // namespace

// UMFPACK reads the factorized matrix again during solves, so keep our own copy.
struct LinearSolver::Factors {
  SparseCplx matrix;
#ifdef PHOBAND_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseCplx> lu;
#else
  Eigen::SparseLU<SparseCplx, Eigen::COLAMDOrdering<int>> lu;
#endif
};

LinearSolver::LinearSolver(double tol) : tol_(tol), lu_(std::make_unique<Factors>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

bool LinearSolver::same_pattern(const SparseCplx& m) const {
  if (!analysed_ || m.outerSize() + 1 != static_cast<Eigen::Index>(outer_.size()) ||
      m.nonZeros() != static_cast<Eigen::Index>(inner_.size())) {
    return false;
  }
  return std::equal(outer_.begin(), outer_.end(), m.outerIndexPtr()) &&
         std::equal(inner_.begin(), inner_.end(), m.innerIndexPtr());
}

void LinearSolver::factorize(const SparseCplx& matrix) {
  factored_ = false;
  lu_->matrix = matrix;
  if (!same_pattern(matrix)) {
    lu_->lu.analyzePattern(lu_->matrix);
    outer_.assign(matrix.outerIndexPtr(), matrix.outerIndexPtr() + matrix.outerSize() + 1);
    inner_.assign(matrix.innerIndexPtr(), matrix.innerIndexPtr() + matrix.nonZeros());
    analysed_ = true;
  }
  lu_->lu.factorize(lu_->matrix);
  if (lu_->lu.info() != Eigen::Success) throw SingularSystem("sparse LU failed: matrix is numerically singular");
  factored_ = true;
}

LinearSolveReport LinearSolver::solve(const SparseCplx& matrix, const VecC& rhs) {
  if (!matrix.isCompressed()) {
    SparseCplx compressed = matrix;
    compressed.makeCompressed();
    return solve(compressed, rhs);
  }
  factorize(matrix);
  LinearSolveReport report;
  report.solution = lu_->lu.solve(rhs);
  if (!report.solution.allFinite()) throw SingularSystem("sparse LU produced a non-finite solution");

  const double rhs_norm = rhs.norm();
  VecC residual = residual_of(matrix, report.solution, rhs, report.residual_norm);
  if (report.residual_norm > tol_ * rhs_norm) {
    // one step of iterative refinement on the same factors
    const VecC refined = report.solution + lu_->lu.solve(residual);
    double rn = 0.0;
    residual = residual_of(matrix, refined, rhs, rn);
    if (rn < report.residual_norm) {
      report.solution = refined;
      report.residual_norm = rn;
    }
  }
  report.condition_flag = report.residual_norm > tol_ * rhs_norm ? SolveStatus::IllConditioned : SolveStatus::Ok;
  return report;
}

VecC LinearSolver::apply_inverse(const VecC& rhs) const {
  if (!factored_) throw std::logic_error("apply_inverse called without factors");
  return lu_->lu.solve(rhs);
}

namespace {

// Two passes of classical Gram-Schmidt against the first `count` columns of `q`.
// Returns the coefficients; `v` is left orthogonal to those columns.
VecC orthogonalize(const Eigen::MatrixXcd& q, int count, VecC& v) {
  VecC h = VecC::Zero(count);
  if (count == 0) return h;
  for (int pass = 0; pass < 2; ++pass) {
    const VecC c = q.leftCols(count).adjoint() * v;
    v.noalias() -= q.leftCols(count) * c;
    h += c;
  }
  return h;
}

constexpr double kDependenceTol = 1e-13;

}  // namespace

RecycledNodeSolver::RecycledNodeSolver(const HolomorphicMatrixFn& fn, cplx anchor, const VecC& rhs, double tol,
                                       int max_dimension)
    : fn_(fn), rhs_(rhs), rhs_norm_(rhs.norm()), tol_(tol), max_dimension_(std::max(1, max_dimension)), anchor_(tol) {
  if (!fn.affine) throw std::invalid_argument("RecycledNodeSolver needs an affine decomposition");
  n_terms_ = static_cast<int>(fn.affine->matrices.size());
  const Eigen::Index n = fn.dimension;
  max_dimension_ = std::min<int>(max_dimension_, static_cast<int>(n));
  anchor_.factorize(fn.evaluate(anchor));
  basis_.resize(n, max_dimension_);
  q_.resize(n, std::min<Eigen::Index>(n, Eigen::Index(max_dimension_) * n_terms_));
  r_ = Eigen::MatrixXcd::Zero(q_.cols(), Eigen::Index(max_dimension_) * n_terms_);
  rhs_coeff_ = VecC::Zero(q_.cols());
  rhs_perp_ = rhs;
}

bool RecycledNodeSolver::extend(const VecC& direction) {
  if (basis_size_ >= max_dimension_) return false;
  VecC w = direction;
  const double before = w.norm();
  orthogonalize(basis_, basis_size_, w);
  const double after = w.norm();
  if (!(after > kDependenceTol * before)) return false;
  w /= after;
  basis_.col(basis_size_) = w;
  for (int t = 0; t < n_terms_; ++t) {
    VecC c = fn_.affine->matrices[t] * w;
    const double cn = c.norm();
    const int col = basis_size_ * n_terms_ + t;
    const VecC h = orthogonalize(q_, q_size_, c);
    r_.col(col).head(q_size_) = h;
    const double rho = c.norm();
    if (rho > kDependenceTol * cn && q_size_ < q_.cols()) {
      q_.col(q_size_) = c / rho;
      r_(q_size_, col) = rho;
      const cplx coeff = q_.col(q_size_).dot(rhs_perp_);
      rhs_coeff_[q_size_] = coeff;
      rhs_perp_ -= coeff * q_.col(q_size_);
      ++q_size_;
    }
  }
  ++basis_size_;
  return true;
}

LinearSolveReport RecycledNodeSolver::solve(cplx z) {
  const SparseCplx t = fn_.evaluate(z);
  LinearSolveReport report;
  report.solution = VecC::Zero(fn_.dimension);
  report.residual_norm = rhs_norm_;
  report.condition_flag = SolveStatus::IllConditioned;
  if (rhs_norm_ == 0.0) {
    report.condition_flag = SolveStatus::Ok;
    return report;
  }
  const double target = tol_ * rhs_norm_;
  VecC residual = rhs_;
  std::vector<double> history;
  for (;;) {
    if (basis_size_ > 0) {
      const auto f = fn_.affine->coefficients(z);
      Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(q_size_, basis_size_);
      for (int i = 0; i < basis_size_; ++i) {
        for (int s = 0; s < n_terms_; ++s) b.col(i) += f[s] * r_.col(i * n_terms_ + s).head(q_size_);
      }
      const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(b);
      VecC x = combine(basis_, qr.solve(rhs_coeff_.head(q_size_)));
      double rn = 0.0;
      residual = residual_of(t, x, rhs_, rn);
      // refinement against the true residual recovers what the projected form rounds away
      for (int pass = 0; pass < 2 && rn > target; ++pass) {
        const VecC c = q_.leftCols(q_size_).adjoint() * residual;
        VecC x2 = combine(basis_, qr.solve(c), &x);
        double rn2 = 0.0;
        VecC r2 = residual_of(t, x2, rhs_, rn2);
        if (!(rn2 < rn)) break;
        x = std::move(x2);
        residual = std::move(r2);
        rn = rn2;
      }
      if (!x.allFinite()) throw SingularSystem("recycled solve produced a non-finite solution");
      if (rn < report.residual_norm) {
        report.solution = x;
        report.residual_norm = rn;
      }
      if (rn <= target) {
        report.condition_flag = SolveStatus::Ok;
        return report;
      }
      history.push_back(rn);
      constexpr std::size_t kWindow = 3;
      if (history.size() > kWindow && rn > 0.5 * history[history.size() - 1 - kWindow]) return report;
      if (basis_size_ >= max_dimension_) return report;
    }
    ++applications_;
    if (!extend(anchor_.apply_inverse(residual))) return report;
  }
}

LinearSolveReport solve(const HolomorphicMatrixFn& fn, cplx omega, const VecC& rhs, double tol) {
  LinearSolver solver(tol);
  return solver.solve(fn.evaluate(omega), rhs);
}

HolomorphicMatrixFn polynomial_fn(std::vector<Eigen::MatrixXcd> coefficients) {
  if (coefficients.empty()) throw InvalidParameter("polynomial needs at least one coefficient");
  const auto n = coefficients.front().rows();
  for (const auto& c : coefficients) {
    if (c.rows() != n || c.cols() != n) throw InvalidParameter("polynomial coefficients must be square and equal-sized");
  }
  HolomorphicMatrixFn fn;
  fn.dimension = static_cast<int>(n);
  auto affine = std::make_shared<AffineTerms>();
  const auto p = coefficients.size();
  fn.evaluate = [coeffs = coefficients](cplx omega) {
    Eigen::MatrixXcd dense = coeffs.back();
    for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) dense = (dense * omega + *it).eval();
    // keep a full pattern so the symbolic analysis is reusable
    std::vector<Eigen::Triplet<cplx, int>> trips;
    trips.reserve(dense.size());
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      for (Eigen::Index i = 0; i < dense.rows(); ++i) trips.emplace_back(int(i), int(j), dense(i, j));
    }
    SparseCplx s(dense.rows(), dense.cols());
    s.setFromTriplets(trips.begin(), trips.end());
    s.makeCompressed();
    return s;
  };
  for (const auto& c : coefficients) {
    std::vector<Eigen::Triplet<cplx, int>> trips;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(int(i), int(j), c(i, j));
    }
    SparseCplx s(n, n);
    s.setFromTriplets(trips.begin(), trips.end());
    s.makeCompressed();
    affine->matrices.push_back(std::move(s));
  }
  affine->coefficients = [p](cplx omega) {
    std::vector<cplx> f(p);
    cplx power = 1.0;
    for (auto& v : f) {
      v = power;
      power *= omega;
    }
    return f;
  };
  fn.affine = std::move(affine);
  return fn;
}

HolomorphicMatrixFn bloch_fn(std::shared_ptr<const BlochOperator> op, double guard) {
  HolomorphicMatrixFn fn;
  fn.dimension = op->dimension();
  fn.evaluate = [op](cplx omega) { return (*op)(omega); };
  auto affine = std::make_shared<AffineTerms>();
  affine->matrices = op->affine_matrices();
  affine->coefficients = [op](cplx omega) { return op->affine_coefficients(omega); };
  fn.affine = std::move(affine);
  fn.admissible = [op, guard](const SearchRegion& region) {
    return region_is_holomorphic(op->model(), region, guard);
  };
  return fn;
}

}  // namespace phoband
