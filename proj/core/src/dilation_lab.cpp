#include "annulus/dilation_lab.hpp"

#include <algorithm>
#include <cmath>

#include "annulus/errors.hpp"

namespace annulus {

void DilationData::validate() const {
  if (a.rows() != t.dim() || a.cols() != b.dim()) {
    throw InputError("dilation data: A must be dim(T) x dim(B)");
  }
  if (!a.allFinite()) throw InputError("dilation data: A has non-finite entries");
  if (!is_invertible(b)) throw InvertibilityError("dilation data: B is not invertible");
}

Matrix model_alpha(const DilationData& d, const AnnulusParams& p) {
  d.validate();
  const Matrix bi = certified_inverse(d.b).matrix();
  const Matrix& bm = d.b.matrix();
  const Eigen::Index l = d.b.dim();
  const Matrix defect = Matrix::Identity(l, l) - bm.adjoint() * bm / p.c1();
  return p.c1() * p.c1() * d.a * bi.adjoint() * defect * bi * d.a.adjoint();
}

ModelCheck model_identity_check(const DilationData& d, const AnnulusParams& p, double tol) {
  d.validate();
  const Matrix bi = certified_inverse(d.b).matrix();
  const Matrix& tm = d.t.matrix();
  const Matrix alpha = alpha_form(d.t, p).matrix();
  ModelCheck out;
  out.alpha_residual = op_norm(alpha - model_alpha(d, p));
  out.intertwining_residual =
      op_norm(tm.adjoint() * d.a + d.a * d.b.matrix() - p.c1() * d.a * bi.adjoint());
  const double na = d.a.size() ? op_norm(d.a) : 0.0;
  out.scale = std::max({1.0, alpha_scale(d.t, p), std::pow(na * op_norm(bi) * p.c1(), 2)});
  const IsometryVerdict iso = is_Ar_isometry(d.b.adjoint(), p, tol);
  out.b_coisometry = iso.holds;
  out.b_isometry_residual = -iso.margin;
  out.b_near_miss = !iso.holds && is_Ar_isometry(d.b.adjoint(), p, 100.0 * tol).holds;
  out.pass = out.b_coisometry && out.alpha_residual <= tol * out.scale &&
             out.intertwining_residual <= tol * out.scale;
  return out;
}

Block build_block(const DilationData& d) {
  d.validate();
  const Eigen::Index h = d.t.dim();
  const Eigen::Index l = d.b.dim();
  const Matrix ti = certified_inverse(d.t).matrix().adjoint();  // T^{-*}
  const Matrix bi = certified_inverse(d.b).matrix();
  Matrix v = Matrix::Zero(h + l, h + l);
  v.topLeftCorner(h, h) = d.t.matrix().adjoint();
  v.topRightCorner(h, l) = d.a;
  v.bottomRightCorner(l, l) = d.b.matrix();
  Matrix vi = Matrix::Zero(h + l, h + l);
  vi.topLeftCorner(h, h) = ti;
  vi.topRightCorner(h, l) = -ti * d.a * bi;
  vi.bottomRightCorner(l, l) = bi;
  return Block{Operator(std::move(v)), Operator(std::move(vi))};
}

DilationData split_block(const Operator& v, Eigen::Index dim_h) {
  const Eigen::Index n = v.dim();
  if (dim_h <= 0 || dim_h >= n) throw InputError("split_block needs 0 < dim_h < dim V");
  const Matrix& m = v.matrix();
  const Eigen::Index l = n - dim_h;
  if (m.bottomLeftCorner(l, dim_h).cwiseAbs().maxCoeff() != 0.0) {
    throw InputError("split_block: V is not block upper-triangular");
  }
  return DilationData{Operator(m.topLeftCorner(dim_h, dim_h).adjoint()),
                      m.topRightCorner(dim_h, l), Operator(m.bottomRightCorner(l, l))};
}

double compression_check(const Operator& t, const Operator& v, Eigen::Index dim_h, int m_lo,
                         int m_hi) {
  if (dim_h <= 0 || v.dim() < dim_h || t.dim() != dim_h) {
    throw InputError("compression_check: dimensions do not fit");
  }
  if (m_lo < 0 && !is_invertible(v)) {
    throw InvertibilityError("compression_check: negative powers need an invertible V");
  }
  const double nv = op_norm(v);
  const double nvi = m_lo < 0 ? op_norm(certified_inverse(v)) : 1.0;
  double worst = 0.0;
  for (int m = m_lo; m <= m_hi; ++m) {
    const Matrix vm = power(v, m).matrix();
    const Matrix tm = power(t, m).matrix();
    const double growth = std::pow(m >= 0 ? nv : nvi, std::abs(m));
    const double res = op_norm(tm - vm.topLeftCorner(dim_h, dim_h)) / std::max(1.0, growth);
    worst = std::max(worst, res);
  }
  return worst;
}

bool b2_variety_unitary_check(const OperatorPair& pair, const AnnulusParams& p, double tol) {
  if (!is_spherical(pair, SphericalKind::Unitary, tol).holds) return false;
  const Eigen::Index n = pair.first.dim();
  const double q = op_norm(pair.first.matrix() * pair.second.matrix() -
                           p.cq() * Matrix::Identity(n, n));
  return q <= tol;
}

}  // namespace annulus
