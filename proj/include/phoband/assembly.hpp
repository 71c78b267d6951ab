#pragma once

#include <iosfwd>

#include "phoband/dielectric.hpp"
#include "phoband/mesh.hpp"
#include "phoband/types.hpp"

namespace phoband {

/// k-independent P1 matrices on periodic DOFs. All five share one sparsity pattern,
/// so any linear combination of them is a combination of value arrays.
///
/// Row index = test function, column index = trial function:
///   A[i,j]  = int grad phi_j . grad phi_i
///   Sx[i,j] = int phi_j d(phi_i)/dx1,  Sy likewise in x2
///   Ma[i,j] = int_background phi_j phi_i,  Mb[i,j] = int_inclusion phi_j phi_i
struct OperatorBundle {
  SparseReal A, Sx, Sy, Ma, Mb;
  int n_dofs = 0;
  double mesh_h = 0.0;

  SparseReal mass() const { return Ma + Mb; }
};

/// Element loop parallelised with OpenMP; the result does not depend on the thread count.
OperatorBundle assemble(const UnitCellMesh& mesh, const PeriodicDofMap& dofs);

/// Single-threaded reference of assemble(), kept for testing and benchmarking.
OperatorBundle assemble_serial(const UnitCellMesh& mesh, const PeriodicDofMap& dofs);

/// H(k) = A + 2i (k1 Sx + k2 Sy) + |k|^2 (Ma + Mb): the Hermitian, frequency-free part.
SparseCplx quasi_periodic_form(const OperatorBundle& bundle, const Vec2& k);

/// T(omega) = H(k) - omega^2 (eps_a Ma + eps_b(omega) Mb), with c = 1.
SparseCplx operator_at(const OperatorBundle& bundle, const Vec2& k, const DielectricModel& model, cplx omega,
                       double guard = kDefaultPoleGuard);

/// T(omega) for a fixed k, with H(k) precomputed. Evaluating is a fused pass over
/// the shared value arrays.
class BlochOperator {
 public:
  BlochOperator(const OperatorBundle& bundle, const Vec2& k, DielectricModel model, double guard = kDefaultPoleGuard);

  int dimension() const { return static_cast<int>(hk_.rows()); }
  const Vec2& k() const { return k_; }
  const DielectricModel& model() const { return model_; }
  const SparseCplx& hermitian_part() const { return hk_; }

  SparseCplx operator()(cplx omega) const;
  /// H(k), Ma, Mb on the pattern of H(k), with coefficients 1, -omega^2 eps_a, -omega^2 eps_b(omega).
  std::vector<SparseCplx> affine_matrices() const;
  std::vector<cplx> affine_coefficients(cplx omega) const;

 private:
  SparseCplx hk_;
  Eigen::VectorXd ma_values_, mb_values_;
  Vec2 k_;
  DielectricModel model_;
  double guard_;
};

/// Coordinate triplets "row col re im", 0-based, one per stored entry.
void dump_triplets(const SparseReal& m, std::ostream& out);
void dump_triplets(const SparseCplx& m, std::ostream& out);

}  // namespace phoband
