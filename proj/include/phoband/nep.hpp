#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "phoband/region.hpp"
#include "phoband/types.hpp"

namespace phoband {

/// T(omega) = sum_t coefficients(omega)[t] * matrices[t], all matrices on one pattern.
struct AffineTerms {
  std::vector<SparseCplx> matrices;
  std::function<std::vector<cplx>(cplx)> coefficients;
};

/// A holomorphic matrix function omega |-> T(omega) of fixed dimension.
struct HolomorphicMatrixFn {
  int dimension = 0;
  std::function<SparseCplx(cplx)> evaluate;
  /// Optional decomposition of evaluate(); enables RecycledNodeSolver.
  std::shared_ptr<const AffineTerms> affine;
  /// Pole guard: may the circle circumscribing this region be sampled? Empty means always.
  std::function<bool(const SearchRegion&)> admissible;

  bool is_admissible(const SearchRegion& region) const { return !admissible || admissible(region); }
};

enum class SolveStatus { Ok, IllConditioned };

struct LinearSolveReport {
  VecC solution;
  double residual_norm = 0.0;  ///< ||T x - g||_2
  SolveStatus condition_flag = SolveStatus::Ok;
};

inline constexpr double kDefaultSolveTol = 1e-10;

/// Sparse LU that keeps its symbolic analysis while successive matrices share a pattern.
/// One instance per thread.
class LinearSolver {
 public:
  explicit LinearSolver(double tol = kDefaultSolveTol);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Factorizes and solves. Throws SingularSystem on a zero pivot or a non-finite solution.
  LinearSolveReport solve(const SparseCplx& matrix, const VecC& rhs);

  /// Factorizes `matrix` for apply_inverse(). Throws SingularSystem.
  void factorize(const SparseCplx& matrix);
  bool has_factors() const { return factored_; }

  /// Applies the current factors: returns M^{-1} rhs for the last factorized M.
  VecC apply_inverse(const VecC& rhs) const;

  double tolerance() const { return tol_; }

 private:
  bool same_pattern(const SparseCplx& m) const;

  struct Factors;

  double tol_;
  std::unique_ptr<Factors> lu_;
  std::vector<int> outer_, inner_;
  bool analysed_ = false;
  bool factored_ = false;
};

/// Solves T(z) x = g for many z near one anchor point. The anchor factorization
/// preconditions a search space that is shared by all calls, so later nodes mostly
/// reduce to a small least-squares problem. Requires fn.affine.
///
/// Every returned Ok solution passed an explicit residual check against evaluate(z).
class RecycledNodeSolver {
 public:
  /// Throws SingularSystem if T(anchor) cannot be factorized.
  RecycledNodeSolver(const HolomorphicMatrixFn& fn, cplx anchor, const VecC& rhs, double tol = kDefaultSolveTol,
                     int max_dimension = 48);

  /// IllConditioned when the residual target is missed with a full search space.
  LinearSolveReport solve(cplx z);

  int dimension() const { return basis_size_; }
  int factor_applications() const { return applications_; }

 private:
  bool extend(const VecC& direction);

  const HolomorphicMatrixFn& fn_;
  VecC rhs_;
  double rhs_norm_;
  double tol_;
  int max_dimension_;
  int n_terms_;
  LinearSolver anchor_;
  Eigen::MatrixXcd basis_;  // W: N x max_dimension, orthonormal columns
  Eigen::MatrixXcd q_;      // orthonormal basis of span{C_t W}
  Eigen::MatrixXcd r_;      // [C_0 w_1, C_1 w_1, ..., C_0 w_2, ...] = q_ r_
  VecC rhs_coeff_;          // q_^H rhs
  VecC rhs_perp_;           // rhs - q_ q_^H rhs
  int basis_size_ = 0;
  int q_size_ = 0;
  int applications_ = 0;
};

LinearSolveReport solve(const HolomorphicMatrixFn& fn, cplx omega, const VecC& rhs, double tol = kDefaultSolveTol);

/// T(omega) = sum_p omega^p C_p with dense coefficients stored sparse.
HolomorphicMatrixFn polynomial_fn(std::vector<Eigen::MatrixXcd> coefficients);

class BlochOperator;
class DielectricModel;

/// Wraps a Bloch operator; admissibility is the model's pole guard.
HolomorphicMatrixFn bloch_fn(std::shared_ptr<const BlochOperator> op, double guard);

}  // namespace phoband
