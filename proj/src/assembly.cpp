#include "phoband/assembly.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace phoband {

namespace {

// Dense 3x3 element blocks for one triangle.
struct ElementBlocks {
  std::array<int, 3> dof;
  double stiff[3][3];
  double conv_x[3][3];
  double conv_y[3][3];
  double mass_a[3][3];
  double mass_b[3][3];
};

ElementBlocks element_blocks(const UnitCellMesh& mesh, const PeriodicDofMap& dofs, std::size_t t) {
  ElementBlocks e{};
  const auto& tri = mesh.triangles[t];
  const Vec2& p0 = mesh.vertices[tri[0]];
  const Vec2& p1 = mesh.vertices[tri[1]];
  const Vec2& p2 = mesh.vertices[tri[2]];
  const double area = mesh.area(t);
  const double inv2a = 1.0 / (2.0 * area);
  // grad phi_a = (y_b - y_c, x_c - x_b) / (2|T|) for cyclic (a, b, c)
  const double gx[3] = {(p1[1] - p2[1]) * inv2a, (p2[1] - p0[1]) * inv2a, (p0[1] - p1[1]) * inv2a};
  const double gy[3] = {(p2[0] - p1[0]) * inv2a, (p0[0] - p2[0]) * inv2a, (p1[0] - p0[0]) * inv2a};
  const double w_inc = mesh.inclusion_weight[t];
  for (int a = 0; a < 3; ++a) {
    e.dof[a] = dofs.dof_of_vertex[tri[a]];
    for (int b = 0; b < 3; ++b) {
      e.stiff[a][b] = area * (gx[a] * gx[b] + gy[a] * gy[b]);
      e.conv_x[a][b] = area / 3.0 * gx[a];
      e.conv_y[a][b] = area / 3.0 * gy[a];
      const double m = area / 12.0 * (a == b ? 2.0 : 1.0);
      e.mass_b[a][b] = w_inc * m;
      e.mass_a[a][b] = m - e.mass_b[a][b];
    }
  }
  return e;
}

OperatorBundle scatter(const std::vector<ElementBlocks>& blocks, int n_dofs, double h) {
  using Triplet = Eigen::Triplet<double, int>;
  std::vector<Triplet> ta, tx, ty, tma, tmb;
  const std::size_t nnz = 9 * blocks.size();
  for (auto* v : {&ta, &tx, &ty, &tma, &tmb}) v->reserve(nnz);
  for (const auto& e : blocks) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const int i = e.dof[a], j = e.dof[b];
        ta.emplace_back(i, j, e.stiff[a][b]);
        tx.emplace_back(i, j, e.conv_x[a][b]);
        ty.emplace_back(i, j, e.conv_y[a][b]);
        tma.emplace_back(i, j, e.mass_a[a][b]);
        tmb.emplace_back(i, j, e.mass_b[a][b]);
      }
    }
  }
  OperatorBundle out;
  out.n_dofs = n_dofs;
  out.mesh_h = h;
  auto build = [n_dofs](SparseReal& m, const std::vector<Triplet>& t) {
    m.resize(n_dofs, n_dofs);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
  };
  build(out.A, ta);
  build(out.Sx, tx);
  build(out.Sy, ty);
  build(out.Ma, tma);
  build(out.Mb, tmb);
  for (const SparseReal* m : {&out.Sx, &out.Sy, &out.Ma, &out.Mb}) {
    if (m->nonZeros() != out.A.nonZeros() ||
        !std::equal(m->innerIndexPtr(), m->innerIndexPtr() + m->nonZeros(), out.A.innerIndexPtr())) {
      throw std::logic_error("assembled matrices do not share a sparsity pattern");
    }
  }
  return out;
}

void check_consistent(const UnitCellMesh& mesh, const PeriodicDofMap& dofs) {
  if (dofs.dof_of_vertex.size() != mesh.n_vertices() || mesh.inclusion_weight.size() != mesh.n_triangles()) {
    throw std::invalid_argument("mesh and periodic DOF map are inconsistent");
  }
}

}  // namespace

OperatorBundle assemble(const UnitCellMesh& mesh, const PeriodicDofMap& dofs) {
  check_consistent(mesh, dofs);
  const auto n = static_cast<std::ptrdiff_t>(mesh.n_triangles());
  std::vector<ElementBlocks> blocks(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < n; ++t) blocks[t] = element_blocks(mesh, dofs, t);
  return scatter(blocks, dofs.n_dofs, mesh.h);
}

OperatorBundle assemble_serial(const UnitCellMesh& mesh, const PeriodicDofMap& dofs) {
  check_consistent(mesh, dofs);
  std::vector<ElementBlocks> blocks;
  blocks.reserve(mesh.n_triangles());
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) blocks.push_back(element_blocks(mesh, dofs, t));
  return scatter(blocks, dofs.n_dofs, mesh.h);
}

SparseCplx quasi_periodic_form(const OperatorBundle& b, const Vec2& k) {
  SparseCplx h = b.A.cast<cplx>();
  const double k2 = k[0] * k[0] + k[1] * k[1];
  const cplx two_i(0.0, 2.0);
  const auto nnz = h.nonZeros();
  cplx* hv = h.valuePtr();
  const double *sx = b.Sx.valuePtr(), *sy = b.Sy.valuePtr(), *ma = b.Ma.valuePtr(), *mb = b.Mb.valuePtr();
  for (Eigen::Index p = 0; p < nnz; ++p) hv[p] += two_i * (k[0] * sx[p] + k[1] * sy[p]) + k2 * (ma[p] + mb[p]);
  return h;
}

SparseCplx operator_at(const OperatorBundle& bundle, const Vec2& k, const DielectricModel& model, cplx omega,
                       double guard) {
  return BlochOperator(bundle, k, model, guard)(omega);
}

BlochOperator::BlochOperator(const OperatorBundle& bundle, const Vec2& k, DielectricModel model, double guard)
    : hk_(quasi_periodic_form(bundle, k)),
      ma_values_(Eigen::Map<const Eigen::VectorXd>(bundle.Ma.valuePtr(), bundle.Ma.nonZeros())),
      mb_values_(Eigen::Map<const Eigen::VectorXd>(bundle.Mb.valuePtr(), bundle.Mb.nonZeros())),
      k_(k),
      model_(std::move(model)),
      guard_(guard) {}

SparseCplx BlochOperator::operator()(cplx omega) const {
  const cplx ca = -omega * omega * model_.eps_background();
  const cplx cb = -model_.omega_sq_eps(omega, guard_);
  SparseCplx t = hk_;
  cplx* tv = t.valuePtr();
  const auto nnz = t.nonZeros();
  for (Eigen::Index p = 0; p < nnz; ++p) tv[p] += ca * ma_values_[p] + cb * mb_values_[p];
  return t;
}

std::vector<SparseCplx> BlochOperator::affine_matrices() const {
  std::vector<SparseCplx> out(3, hk_);
  const auto nnz = hk_.nonZeros();
  for (Eigen::Index p = 0; p < nnz; ++p) {
    out[1].valuePtr()[p] = ma_values_[p];
    out[2].valuePtr()[p] = mb_values_[p];
  }
  return out;
}

std::vector<cplx> BlochOperator::affine_coefficients(cplx omega) const {
  return {cplx(1.0), -omega * omega * model_.eps_background(), -model_.omega_sq_eps(omega, guard_)};
}

void dump_triplets(const SparseReal& m, std::ostream& out) {
  out.precision(17);
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseReal::InnerIterator it(m, c); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << " 0\n";
  }
}

void dump_triplets(const SparseCplx& m, std::ostream& out) {
  out.precision(17);
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseCplx::InnerIterator it(m, c); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
    }
  }
}

}  // namespace phoband
