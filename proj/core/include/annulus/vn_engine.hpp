#pragma once

// von Neumann inequality evaluation on a closed annulus, a budgeted
// semi-decision for "the annulus is a spectral set for T", and a multi-start
// search for lower bounds on the best K-spectral constant.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "annulus/annulus_params.hpp"
#include "annulus/operator_core.hpp"

namespace annulus {

/// Ratio above which a certificate counts as a genuine violation.
inline constexpr double kViolationThreshold = 1.0 + 1e-7;
/// Ratios in (kNoiseFloor, kViolationThreshold] are reported UNDECIDED.
inline constexpr double kNoiseFloor = 1.0 + 1e-9;
/// Relative slack on the radii when checking that the spectrum lies inside.
inline constexpr double kSpectralInclusionTol = 1e-8;

struct VnBudget {
  int max_laurent_degree = 8;
  int boundary_samples = 512;  // per circle
  int restarts = 32;
  int opt_iters = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  /// Throws InputError unless every field is positive.
  void validate() const;
};

enum class Verdict { In, Out, Undecided };
const char* to_string(Verdict v);

using TestFunction = std::variant<LaurentPolynomial, RationalFunction>;

struct SupNorm {
  double value = 0.0;
  cplx argmax{};
};

/// Max of |f| over the two boundary circles, sampled at `grid` points per
/// circle and refined around every near-maximal discrete peak. Maximum
/// modulus makes interior points redundant.
SupNorm sup_norm_annulus(const LaurentPolynomial& f, const AnnulusDomain& dom, int grid);
/// Throws DomainError when a pole lies in the closed annulus (within kPoleTol).
SupNorm sup_norm_annulus(const RationalFunction& f, const AnnulusDomain& dom, int grid);
SupNorm sup_norm_annulus(const TestFunction& f, const AnnulusDomain& dom, int grid);

Operator apply_function(const Operator& t, const TestFunction& f);

/// ||f(T)|| / sup |f| over the boundary of dom.
double vn_ratio(const Operator& t, const TestFunction& f, const AnnulusDomain& dom,
                int grid = 512);
inline double vn_ratio(const Operator& t, const TestFunction& f, const AnnulusParams& p,
                       int grid = 512) {
  return vn_ratio(t, f, AnnulusDomain::standard(p), grid);
}

struct VnCertificate {
  LaurentPolynomial function;
  /// ||f(T)|| / sup |f| with the sup recomputed on a 4x finer grid.
  double ratio = 0.0;
  double operator_norm = 0.0;
  double sup_norm = 0.0;
  cplx argmax_point{};
};

struct KSearchResult {
  double k_lower = 0.0;
  VnCertificate certificate;
  /// Best certified ratio over monomials z^k, |k| <= degree.
  double monomial_best = 0.0;
  /// Best exact ratio reached by each restart, in restart order.
  std::vector<double> restart_best;
  long evaluations = 0;
};

/// Maximizes the vn ratio over Laurent polynomials of degree <= budget
/// degree. Requires T invertible (InvertibilityError otherwise).
KSearchResult max_k_search(const Operator& t, const AnnulusDomain& dom, const VnBudget& budget);
inline KSearchResult max_k_search(const Operator& t, const AnnulusParams& p,
                                  const VnBudget& budget) {
  return max_k_search(t, AnnulusDomain::standard(p), budget);
}

struct SpectralTestResult {
  Verdict verdict = Verdict::Undecided;
  std::optional<VnCertificate> certificate;
  std::optional<cplx> escaped_eigenvalue;
  double best_ratio = 0.0;
  VnBudget budget;
  std::string reason;
};

/// OUT: spectrum escapes dom, or a certificate with ratio > kViolationThreshold.
/// UNDECIDED: best ratio inside the noise band when the budget ran out.
/// IN: spectrum inside and nothing above kNoiseFloor found within budget.
SpectralTestResult ar_spectral_test(const Operator& t, const AnnulusDomain& dom,
                                    const VnBudget& budget);
inline SpectralTestResult ar_spectral_test(const Operator& t, const AnnulusParams& p,
                                           const VnBudget& budget) {
  return ar_spectral_test(t, AnnulusDomain::standard(p), budget);
}

/// sum c_ij z1^i z2^j.
class BivariatePolynomial {
 public:
  BivariatePolynomial() = default;
  explicit BivariatePolynomial(std::map<std::pair<int, int>, cplx> coeffs);

  const std::map<std::pair<int, int>, cplx>& coeffs() const noexcept { return c_; }
  int total_degree() const;
  cplx operator()(cplx z1, cplx z2) const;
  /// g(T1, T2) for a commuting pair.
  Matrix apply(const Matrix& t1, const Matrix& t2) const;

 private:
  std::map<std::pair<int, int>, cplx> c_;
};

/// f = g o kappa as a Laurent polynomial in z.
LaurentPolynomial restrict_to_kappa(const BivariatePolynomial& g, const AnnulusParams& p);
/// A g with g o kappa = f.
BivariatePolynomial lift_to_variety(const LaurentPolynomial& f, const AnnulusParams& p);

struct VarietyTestResult {
  double annulus_max_ratio = 0.0;
  double variety_max_ratio = 0.0;
  double max_discrepancy = 0.0;
  int functions_tested = 0;
  Verdict annulus_verdict = Verdict::Undecided;
  Verdict variety_verdict = Verdict::Undecided;
  /// Max ratios within 1e-6 and verdicts identical.
  bool consistent = false;
};

/// Compares ||g(kappa(T))|| against sup |g| over kappa(boundary) for sampled
/// g of total degree <= budget degree, alongside the annulus-side ratios of
/// the restricted Laurent polynomials. Requires T invertible.
VarietyTestResult variety_poly_test(const Operator& t, const AnnulusParams& p,
                                    const VnBudget& budget);

/// T invertible and ||T|| <= 1 + 1e-9. Rational functions with a pole at 0
/// have infinite sup on the punctured disk and are not sampled.
bool vn_set_punctured_disk(const Operator& t);

/// Max over f of |vn_ratio(T, f) - ratio of F(z1, z2) = f(sqrt(1+r^2) z1)
/// on kappa(T) against its sup over kappa(boundary)|.
double kappa_vn_transfer_check(const Operator& t, const AnnulusParams& p,
                               std::span<const TestFunction> sample_fns, int grid = 512);

}  // namespace annulus
