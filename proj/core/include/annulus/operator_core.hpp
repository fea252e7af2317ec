#pragma once

// Dense complex matrices standing in for Hilbert-space operators, plus the
// functional calculus (Laurent polynomials, rational functions) and the
// positivity tests that the rest of the library is built on.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace annulus {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Relative threshold for certifying invertibility: sigma_min > kInvTolRel * ||M||.
inline constexpr double kInvTolRel = 1e-10;
/// Forms are symmetrized on construction; asymmetry above this is reported.
inline constexpr double kHermTol = 1e-10;
/// Minimum distance between a pole and an eigenvalue in rational calculus.
inline constexpr double kPoleTol = 1e-8;
/// Common roots of numerator and denominator closer than this are cancelled.
inline constexpr double kRootTol = 1e-8;

/// A finite square complex matrix with finite entries.
class Operator {
 public:
  explicit Operator(Matrix entries);

  static Operator identity(Eigen::Index dim);
  static Operator zero(Eigen::Index dim);
  static Operator diagonal(std::span<const cplx> diag);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  Operator adjoint() const { return Operator(m_.adjoint(), Unchecked{}); }

  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(cplx s, const Operator& a);
  friend Operator operator*(const Operator& a, cplx s) { return s * a; }

 private:
  struct Unchecked {};
  Operator(Matrix entries, Unchecked) : m_(std::move(entries)) {}

  Matrix m_;
};

/// Hermitian matrix; entries are replaced by (H + H*)/2 on construction.
class HermitianForm {
 public:
  explicit HermitianForm(const Matrix& entries);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  /// ||H - H*|| of the matrix handed to the constructor.
  double asymmetry() const noexcept { return asymmetry_; }

 private:
  Matrix m_;
  double asymmetry_ = 0.0;
};

/// sum_{k = min_deg}^{max_deg} c_k z^k, trimmed so that both end
/// coefficients are nonzero (the zero polynomial has no coefficients).
class LaurentPolynomial {
 public:
  LaurentPolynomial() = default;
  LaurentPolynomial(int min_deg, std::vector<cplx> coeffs);

  static LaurentPolynomial monomial(int k, cplx c = 1.0);

  bool is_zero() const noexcept { return coeffs_.empty(); }
  int min_deg() const noexcept { return min_deg_; }
  int max_deg() const noexcept {
    return min_deg_ + static_cast<int>(coeffs_.size()) - 1;
  }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  cplx coeff(int k) const;

  cplx operator()(cplx z) const;
  LaurentPolynomial scaled(cplx s) const;

 private:
  int min_deg_ = 0;
  std::vector<cplx> coeffs_;
};

/// Ordinary polynomial with ascending coefficients c_0 + c_1 z + ...
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> ascending);

  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  const std::vector<cplx>& coeffs() const noexcept { return c_; }
  cplx operator()(cplx z) const;

  /// Roots via the eigenvalues of the companion matrix.
  std::vector<cplx> roots() const;
  /// Quotient of synthetic division by (z - root); remainder is discarded.
  Polynomial deflate(cplx root) const;

 private:
  std::vector<cplx> c_;
};

/// p / q with q not identically zero and common roots (within kRootTol)
/// cancelled during construction.
class RationalFunction {
 public:
  RationalFunction(Polynomial numerator, Polynomial denominator);

  const Polynomial& numerator() const noexcept { return p_; }
  const Polynomial& denominator() const noexcept { return q_; }
  std::vector<cplx> poles() const { return q_.roots(); }
  cplx operator()(cplx z) const { return p_(z) / q_(z); }

 private:
  Polynomial p_;
  Polynomial q_;
};

/// phi(z) = (z - lambda0) / (1 - conj(lambda0) z).
RationalFunction mobius_function(cplx lambda0);

double op_norm(const Matrix& m);
inline double op_norm(const Operator& m) { return op_norm(m.matrix()); }
double min_singular_value(const Matrix& m);
double condition_number(const Operator& m);

/// Invertibility certified by sigma_min > kInvTolRel * ||M||.
bool is_invertible(const Operator& m);
/// Throws InvertibilityError when is_invertible fails.
Operator certified_inverse(const Operator& m);

/// Eigenvalues with multiplicity (dense nonsymmetric solver).
std::vector<cplx> spectrum(const Operator& m);
/// Ascending eigenvalues of a Hermitian form.
std::vector<double> hermitian_eigenvalues(const HermitianForm& h);

struct PsdVerdict {
  bool psd = true;
  double min_eigenvalue = 0.0;
  /// Unit eigenvector for min_eigenvalue; <Hx, x> = min_eigenvalue.
  Vector witness;
};

/// PSD iff lambda_min(H) >= -tol.
PsdVerdict is_psd(const HermitianForm& h, double tol);

Operator apply_polynomial(const Operator& t, const Polynomial& p);
/// Horner on the nonnegative and negative parts separately; negative powers
/// need a certified inverse.
Operator apply_laurent(const Operator& t, const LaurentPolynomial& f);
/// p(T) q(T)^{-1}; throws PoleCollisionError if a pole is within kPoleTol
/// of an eigenvalue.
Operator apply_rational(const Operator& t, const RationalFunction& f);
/// (T - lambda0 I)(I - conj(lambda0) T)^{-1}.
Operator mobius_of_operator(const Operator& t, cplx lambda0);

/// T^k for any integer k (certified inverse for k < 0).
Operator power(const Operator& t, int k);

}  // namespace annulus
