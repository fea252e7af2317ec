#include "annulus/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {
namespace {

void require_finite(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const cplx v = m(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream os;
        os << "non-finite entry at row " << i << ", column " << j;
        throw InputError(os.str());
      }
    }
  }
}

void require_square(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << "operator must be a nonempty square matrix, got " << m.rows() << "x"
       << m.cols();
    throw InputError(os.str());
  }
}

std::vector<cplx> trim_high(std::vector<cplx> c) {
  while (!c.empty() && c.back() == cplx(0.0)) c.pop_back();
  return c;
}

}  // namespace

// --- Operator --------------------------------------------------------------

Operator::Operator(Matrix entries) : m_(std::move(entries)) {
  require_square(m_);
  require_finite(m_);
}

Operator Operator::identity(Eigen::Index dim) {
  return Operator(Matrix::Identity(dim, dim));
}

Operator Operator::zero(Eigen::Index dim) {
  return Operator(Matrix::Zero(dim, dim));
}

Operator Operator::diagonal(std::span<const cplx> diag) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(diag.size()),
                          static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  }
  return Operator(std::move(m));
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw InputError("dimension mismatch in product");
  return Operator(a.m_ * b.m_, Operator::Unchecked{});
}

Operator operator+(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw InputError("dimension mismatch in sum");
  return Operator(a.m_ + b.m_, Operator::Unchecked{});
}

Operator operator-(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw InputError("dimension mismatch in difference");
  return Operator(a.m_ - b.m_, Operator::Unchecked{});
}

Operator operator*(cplx s, const Operator& a) {
  return Operator(s * a.m_, Operator::Unchecked{});
}

// --- HermitianForm ---------------------------------------------------------

HermitianForm::HermitianForm(const Matrix& entries) {
  require_square(entries);
  require_finite(entries);
  const Matrix adj = entries.adjoint();
  asymmetry_ = op_norm(Matrix(entries - adj));
  m_ = 0.5 * (entries + adj);
}

// --- LaurentPolynomial -----------------------------------------------------

LaurentPolynomial::LaurentPolynomial(int min_deg, std::vector<cplx> coeffs)
    : min_deg_(min_deg), coeffs_(std::move(coeffs)) {
  auto first = std::find_if(coeffs_.begin(), coeffs_.end(),
                            [](cplx c) { return c != cplx(0.0); });
  if (first == coeffs_.end()) {
    coeffs_.clear();
    min_deg_ = 0;
    return;
  }
  min_deg_ += static_cast<int>(first - coeffs_.begin());
  coeffs_.erase(coeffs_.begin(), first);
  coeffs_ = trim_high(std::move(coeffs_));
  for (cplx c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw InputError("non-finite Laurent coefficient");
    }
  }
}

LaurentPolynomial LaurentPolynomial::monomial(int k, cplx c) {
  return LaurentPolynomial(k, {c});
}

cplx LaurentPolynomial::coeff(int k) const {
  if (is_zero() || k < min_deg_ || k > max_deg()) return 0.0;
  return coeffs_[static_cast<std::size_t>(k - min_deg_)];
}

cplx LaurentPolynomial::operator()(cplx z) const {
  if (is_zero()) return 0.0;
  cplx pos = 0.0;
  if (max_deg() >= 0) {
    const int lo = std::max(min_deg_, 0);
    for (int k = max_deg(); k >= lo; --k) pos = pos * z + coeff(k);
    if (lo > 0) pos *= std::pow(z, lo);
  }
  cplx neg = 0.0;
  if (min_deg_ < 0) {
    const cplx w = 1.0 / z;
    for (int k = min_deg_; k <= -1; ++k) neg = neg * w + coeff(k);
    neg *= w;
  }
  return pos + neg;
}

LaurentPolynomial LaurentPolynomial::scaled(cplx s) const {
  std::vector<cplx> c = coeffs_;
  for (auto& v : c) v *= s;
  return LaurentPolynomial(min_deg_, std::move(c));
}

// --- Polynomial ------------------------------------------------------------

Polynomial::Polynomial(std::vector<cplx> ascending)
    : c_(trim_high(std::move(ascending))) {}

cplx Polynomial::operator()(cplx z) const {
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<cplx> Polynomial::roots() const {
  const int d = degree();
  if (d < 1) return {};
  Matrix companion = Matrix::Zero(d, d);
  const cplx lead = c_.back();
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -c_[static_cast<std::size_t>(i)] / lead;
  Eigen::ComplexEigenSolver<Matrix> es(companion, false);
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + d);
  return out;
}

Polynomial Polynomial::deflate(cplx root) const {
  const int d = degree();
  if (d < 1) return *this;
  std::vector<cplx> q(static_cast<std::size_t>(d));
  cplx carry = c_.back();
  for (int k = d - 1; k >= 0; --k) {
    q[static_cast<std::size_t>(k)] = carry;
    carry = c_[static_cast<std::size_t>(k)] + carry * root;
  }
  return Polynomial(std::move(q));
}

// --- RationalFunction ------------------------------------------------------

RationalFunction::RationalFunction(Polynomial numerator, Polynomial denominator)
    : p_(std::move(numerator)), q_(std::move(denominator)) {
  if (q_.is_zero()) throw InputError("denominator is identically zero");
  if (p_.is_zero()) {
    q_ = Polynomial({1.0});
    return;
  }
  bool cancelled = true;
  while (cancelled && p_.degree() > 0 && q_.degree() > 0) {
    cancelled = false;
    const auto pr = p_.roots();
    const auto qr = q_.roots();
    for (cplx a : pr) {
      for (cplx b : qr) {
        if (std::abs(a - b) <= kRootTol) {
          const cplx mid = 0.5 * (a + b);
          p_ = p_.deflate(mid);
          q_ = q_.deflate(mid);
          cancelled = true;
          break;
        }
      }
      if (cancelled) break;
    }
  }
}

RationalFunction mobius_function(cplx lambda0) {
  return RationalFunction(Polynomial({-lambda0, 1.0}),
                          Polynomial({1.0, -std::conj(lambda0)}));
}

// --- norms, spectra, positivity --------------------------------------------

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  require_finite(m);
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double min_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

double condition_number(const Operator& m) {
  Eigen::JacobiSVD<Matrix> svd(m.matrix());
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

bool is_invertible(const Operator& m) {
  Eigen::JacobiSVD<Matrix> svd(m.matrix());
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > kInvTolRel * s(0);
}

Operator certified_inverse(const Operator& m) {
  if (!is_invertible(m)) {
    std::ostringstream os;
    os << "operator is not certifiably invertible (sigma_min = "
       << min_singular_value(m.matrix()) << ", ||M|| = " << op_norm(m) << ")";
    throw InvertibilityError(os.str());
  }
  return Operator(m.matrix().partialPivLu().inverse());
}

std::vector<cplx> spectrum(const Operator& m) {
  Eigen::ComplexEigenSolver<Matrix> es(m.matrix(), false);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> hermitian_eigenvalues(const HermitianForm& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

PsdVerdict is_psd(const HermitianForm& h, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  PsdVerdict v;
  v.min_eigenvalue = es.eigenvalues()(0);
  v.witness = es.eigenvectors().col(0);
  v.psd = v.min_eigenvalue >= -tol;
  return v;
}

// --- functional calculus ---------------------------------------------------

Operator power(const Operator& t, int k) {
  const Eigen::Index n = t.dim();
  if (k == 0) return Operator::identity(n);
  const Matrix base = k > 0 ? t.matrix() : certified_inverse(t).matrix();
  unsigned e = static_cast<unsigned>(k > 0 ? k : -k);
  Matrix acc = Matrix::Identity(n, n);
  Matrix sq = base;
  while (e != 0) {
    if (e & 1u) acc = acc * sq;
    e >>= 1u;
    if (e != 0) sq = sq * sq;
  }
  return Operator(std::move(acc));
}

Operator apply_polynomial(const Operator& t, const Polynomial& p) {
  const Eigen::Index n = t.dim();
  Matrix acc = Matrix::Zero(n, n);
  const auto& c = p.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    acc = acc * t.matrix();
    acc.diagonal().array() += *it;
  }
  return Operator(std::move(acc));
}

Operator apply_laurent(const Operator& t, const LaurentPolynomial& f) {
  const Eigen::Index n = t.dim();
  Matrix acc = Matrix::Zero(n, n);
  if (f.is_zero()) return Operator(std::move(acc));

  if (f.max_deg() >= 0) {
    for (int k = f.max_deg(); k >= 0; --k) {
      acc = acc * t.matrix();
      acc.diagonal().array() += f.coeff(k);
    }
  }
  if (f.min_deg() < 0) {
    const Matrix inv = certified_inverse(t).matrix();
    // sum_{k=1}^{m} c_{-k} S^k with S = T^{-1}, by Horner: S(c_{-1} + S(c_{-2} + ...)).
    Matrix neg = Matrix::Zero(n, n);
    for (int k = f.min_deg(); k <= -1; ++k) {
      neg.diagonal().array() += f.coeff(k);
      neg = inv * neg;
    }
    acc += neg;
  }
  return Operator(std::move(acc));
}

Operator apply_rational(const Operator& t, const RationalFunction& f) {
  const auto poles = f.poles();
  if (!poles.empty()) {
    for (cplx lambda : spectrum(t)) {
      for (cplx pole : poles) {
        if (std::abs(lambda - pole) < kPoleTol) {
          std::ostringstream os;
          os << "pole " << pole << " collides with eigenvalue " << lambda;
          throw PoleCollisionError(os.str());
        }
      }
    }
  }
  const Operator p = apply_polynomial(t, f.numerator());
  const Operator q = apply_polynomial(t, f.denominator());
  // p(T) and q(T) commute, so p q^{-1} = q^{-1} p; solve instead of inverting.
  Matrix out = q.matrix().partialPivLu().solve(p.matrix());
  return Operator(std::move(out));
}

Operator mobius_of_operator(const Operator& t, cplx lambda0) {
  return apply_rational(t, mobius_function(lambda0));
}

}  // namespace annulus
