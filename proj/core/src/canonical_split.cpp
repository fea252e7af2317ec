#include <algorithm>
#include <cmath>

#include "annulus/annulus_classes.hpp"

namespace annulus {
namespace {

// Singular values below this count as zero in subspace arithmetic.
constexpr double kSubspaceTol = 1e-8;

// Eigenvectors of h whose eigenvalues are within tol of zero.
Matrix hermitian_kernel(const Matrix& h, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    if (std::abs(es.eigenvalues()(i)) <= tol) keep.push_back(i);
  }
  Matrix q(h.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    q.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
  }
  return q;
}

// Orthonormal basis of the column span of m.
Matrix orth(const Matrix& m) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > kSubspaceTol * std::max(1.0, top)) ++rank;
  return svd.matrixU().leftCols(rank);
}

// span(a) intersected with span(b); both inputs orthonormal.
Matrix intersect(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  if (a.cols() == 0 || b.cols() == 0) return Matrix(n, 0);
  const Matrix residual = a - b * (b.adjoint() * a);
  Eigen::JacobiSVD<Matrix> svd(residual, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    const double si = i < s.size() ? s(i) : 0.0;
    if (si <= kSubspaceTol) keep.push_back(i);
  }
  Matrix v(a.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    v.col(static_cast<Eigen::Index>(j)) = svd.matrixV().col(keep[j]);
  }
  return orth(a * v);
}

}  // namespace

CanonicalSplit canonical_split(const Operator& t, const AnnulusParams& p, double tol) {
  const Matrix& m = t.matrix();
  const Eigen::Index n = t.dim();
  const Matrix id = Matrix::Identity(n, n);
  const double nt2 = std::pow(op_norm(t), 2);
  const Matrix tt = m.adjoint() * m;

  const Matrix normal_defect = tt - m * m.adjoint();
  const Matrix product = (id - tt) * (tt - p.r2() * id);
  const Matrix k1 = hermitian_kernel(0.5 * (normal_defect + normal_defect.adjoint()),
                                     tol * std::max(1.0, nt2));
  const Matrix k2 = hermitian_kernel(0.5 * (product + product.adjoint()),
                                     tol * std::max(1.0, nt2 * nt2));
  Matrix s = intersect(k1, k2);
  // Shrink to the largest subspace invariant under T and T*.
  for (Eigen::Index guard = 0; guard <= n && s.cols() > 0; ++guard) {
    const Eigen::Index before = s.cols();
    s = intersect(intersect(s, orth(m * s)), orth(m.adjoint() * s));
    if (s.cols() == before) break;
  }

  CanonicalSplit out;
  out.unitary_basis = s;
  out.unitary_rank = static_cast<int>(s.cols());
  out.unitary_projector = s * s.adjoint();
  out.cnu_projector = id - out.unitary_projector;
  const Matrix& pu = out.unitary_projector;
  const Matrix& pc = out.cnu_projector;
  out.reducing_residual = std::max(op_norm(pc * m * pu), op_norm(pc * m.adjoint() * pu));
  bool restricted_ok = true;
  if (s.cols() > 0) {
    restricted_ok = is_Ar_unitary(Operator(s.adjoint() * m * s), p, tol).holds;
  }
  out.verified = restricted_ok && out.reducing_residual <= 1e-7 * std::max(1.0, op_norm(t));
  return out;
}

}  // namespace annulus
