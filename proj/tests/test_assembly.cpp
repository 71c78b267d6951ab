#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "phoband/assembly.hpp"

using namespace phoband;

namespace {

Eigen::MatrixXcd dense(const SparseCplx& m) { return Eigen::MatrixXcd(m); }
Eigen::MatrixXd dense(const SparseReal& m) { return Eigen::MatrixXd(m); }

OperatorBundle bundle_for(int n, double r, InclusionMass rule = InclusionMass::AreaFraction) {
  const auto mesh = generate_structured(n, r, rule);
  return assemble(mesh, build_periodic_dof_map(mesh));
}

}  // namespace

TEST_SUITE("assembly") {
  TEST_CASE("n = 2: constants in the kernel of A, unit mass") {
    const auto b = bundle_for(2, 0.1);
    REQUIRE(b.n_dofs == 4);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    CHECK((b.A * ones).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(ones.dot(b.mass() * ones) - 1.0) < 1e-14);
  }

  TEST_CASE("n = 2, r = 0.1: no inclusion mass under the tagged rule") {
    const auto b = bundle_for(2, 0.1, InclusionMass::Tagged);
    CHECK(dense(b.Mb).cwiseAbs().maxCoeff() == 0.0);
    // the area-fraction rule keeps the exact disc mass instead
    const auto f = bundle_for(2, 0.1);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    CHECK(ones.dot(f.Mb * ones) == doctest::Approx(kPi * 0.01).epsilon(1e-12));
  }

  TEST_CASE("element integrals on a single reference pattern") {
    // on the n = 2 mesh every DOF sees the same stencil; diagonal of A is 4 for P1 on right triangles
    const auto b = bundle_for(2, 0.2);
    const auto A = dense(b.A);
    for (int i = 0; i < 4; ++i) CHECK(A(i, i) == doctest::Approx(4.0));
    // M row sums are the DOF areas: 1 / n_dofs on a uniform grid
    const Eigen::VectorXd rows = dense(b.mass()).rowwise().sum();
    for (int i = 0; i < 4; ++i) CHECK(rows[i] == doctest::Approx(0.25));
  }

  TEST_CASE("k = 0, eps = 1, omega = 0 gives T = A") {
    const auto b = bundle_for(6, 0.3);
    const auto t = operator_at(b, {0.0, 0.0}, DielectricModel::constant(1.0), 0.0);
    CHECK((dense(t) - dense(b.A).cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("e^H H(pi, pi) e = 2 pi^2") {
    const auto b = bundle_for(10, 0.378);
    const auto h = quasi_periodic_form(b, {kPi, kPi});
    const VecC e = VecC::Ones(b.n_dofs);
    CHECK(std::abs(e.dot(h * e) - 2.0 * kPi * kPi) < 1e-12);
  }

  TEST_CASE("real omega, constant model: T is Hermitian") {
    const auto b = bundle_for(8, 0.3);
    const auto t = dense(operator_at(b, {0.7, -1.9}, DielectricModel::constant(8.9), 1.3));
    CHECK((t - t.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("bloch operator agrees with operator_at and its affine terms") {
    const auto b = bundle_for(6, 0.25);
    const auto model = DielectricModel::lorentz(10.9, kTwoPi * 8.75 / 8.12, kTwoPi);
    const Vec2 k{1.1, -0.4};
    const BlochOperator op(b, k, model);
    const cplx w(1.7, 0.3);
    const auto direct = dense(operator_at(b, k, model, w));
    CHECK((dense(op(w)) - direct).cwiseAbs().maxCoeff() < 1e-13);
    const auto mats = op.affine_matrices();
    const auto coef = op.affine_coefficients(w);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(b.n_dofs, b.n_dofs);
    for (std::size_t i = 0; i < mats.size(); ++i) sum += coef[i] * dense(mats[i]);
    CHECK((sum - direct).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("structure invariants across meshes and k") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int n : {2, 10, 20}) {
      const auto b = bundle_for(n, 0.378);
      const auto A = dense(b.A), Sx = dense(b.Sx), Sy = dense(b.Sy), M = dense(b.mass());
      CHECK((Sx + Sx.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((Sy + Sy.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(M.sum() - 1.0) < 1e-12);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(b.n_dofs);
      CHECK((A * ones).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((Sx * ones).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((Sy * ones).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A);
      CHECK(std::abs(ea.eigenvalues()[0]) < 1e-12);
      CHECK(ea.eigenvalues()[1] > 1e-6);
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues()[0] > 0.0);
      for (int s = 0; s < 5; ++s) {
        const Vec2 k{u(rng), u(rng)};
        const auto H = dense(quasi_periodic_form(b, k));
        CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eh(H);
        CHECK(eh.eigenvalues()[0] > -1e-12);
      }
    }
  }

  TEST_CASE("shared sparsity pattern") {
    const auto b = bundle_for(5, 0.3);
    for (const SparseReal* m : {&b.Sx, &b.Sy, &b.Ma, &b.Mb}) {
      REQUIRE(m->nonZeros() == b.A.nonZeros());
      CHECK(std::equal(b.A.innerIndexPtr(), b.A.innerIndexPtr() + b.A.nonZeros(), m->innerIndexPtr()));
    }
    // 7-point stencil for the structured split, periodic
    CHECK(b.A.nonZeros() == 7 * 25);
  }

  TEST_CASE("refinement keeps unit mass and a one-dimensional kernel") {
    const auto m = refine_uniform(generate_structured(4, 0.3));
    const auto b = assemble(m, build_periodic_dof_map(m));
    CHECK(std::abs(dense(b.mass()).sum() - 1.0) < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(dense(b.A));
    CHECK(std::abs(ea.eigenvalues()[0]) < 1e-12);
    CHECK(ea.eigenvalues()[1] > 1e-6);
  }

  TEST_CASE("parallel assembly equals the serial reference") {
    const auto m = generate_structured(24, 0.378);
    const auto d = build_periodic_dof_map(m);
    const auto p = assemble(m, d), s = assemble_serial(m, d);
    for (auto [a, b] : {std::pair{&p.A, &s.A}, {&p.Sx, &s.Sx}, {&p.Sy, &s.Sy}, {&p.Ma, &s.Ma}, {&p.Mb, &s.Mb}}) {
      REQUIRE(a->nonZeros() == b->nonZeros());
      CHECK(std::equal(a->valuePtr(), a->valuePtr() + a->nonZeros(), b->valuePtr()));
    }
  }

  TEST_CASE("triplet dump") {
    const auto b = bundle_for(2, 0.1);
    std::ostringstream os;
    dump_triplets(b.A, os);
    std::istringstream is(os.str());
    int r, c, count = 0;
    double re, im;
    Eigen::MatrixXd back = Eigen::MatrixXd::Zero(4, 4);
    while (is >> r >> c >> re >> im) {
      back(r, c) = re;
      CHECK(im == 0.0);
      ++count;
    }
    CHECK(count == b.A.nonZeros());
    CHECK((back - dense(b.A)).cwiseAbs().maxCoeff() == 0.0);
  }
}
