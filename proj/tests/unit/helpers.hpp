// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_TESTS_HELPERS_HPP
#define MORFORGE_TESTS_HELPERS_HPP

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "morforge/common.hpp"
#include "morforge/fe.hpp"
#include "morforge/mesh.hpp"

namespace morforge::testing
{

inline Matrix RandomMatrix(int rows, int cols, std::mt19937_64 &gen, double lo = -1.0,
                           double hi = 1.0)
{
  std::uniform_real_distribution<double> d(lo, hi);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; j++)
  {
    for (int i = 0; i < rows; i++)
    {
      m(i, j) = d(gen);
    }
  }
  return m;
}

inline Vector RandomVector(int n, std::mt19937_64 &gen, double lo = -1.0, double hi = 1.0)
{
  return RandomMatrix(n, 1, gen, lo, hi).col(0);
}

// P1 mass inner product on a uniform mesh with the left node eliminated (n free dofs).
inline InnerProduct MassInnerProduct(int n)
{
  const Mesh mesh = Mesh::Uniform(n);
  const DofMap dofs(mesh.NumNodes(), {0});
  return InnerProduct(AssembleMass(mesh, dofs), NormKind::kTrial);
}

inline Matrix Dense(const SparseMatrix &m) { return Matrix(m); }

// Orthonormal basis (dense, M-inner product) of the span of the columns, via Cholesky + QR.
inline Matrix SpanBasis(const Matrix &cols, const Matrix &gram, double tol = 1e-10)
{
  const Eigen::LLT<Matrix> llt(gram);
  const Matrix lt = llt.matrixU();
  const Eigen::JacobiSVD<Matrix> svd(lt * cols, Eigen::ComputeThinU);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); i++)
  {
    if (svd.singularValues()[i] > tol * svd.singularValues()[0])
    {
      r++;
    }
  }
  return lt.triangularView<Eigen::Upper>().solve(svd.matrixU().leftCols(r));
}

// Largest principal-angle sine between two M-orthonormal bases of equal dimension.
inline double MaxAngleSine(const Matrix &a, const Matrix &b, const Matrix &gram)
{
  // Largest G-norm of the component of span(a) orthogonal to span(b); both G-orthonormal.
  const Matrix r = a - b * (b.transpose() * gram * a);
  const Matrix l = Eigen::LLT<Matrix>(gram).matrixU();
  return Eigen::JacobiSVD<Matrix>(l * r).singularValues()(0);
}

}  // namespace morforge::testing

#endif  // MORFORGE_TESTS_HELPERS_HPP
