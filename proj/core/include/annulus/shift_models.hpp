#pragma once

// Weighted bilateral shifts acting exactly on finitely supported sequences.
// Norms come from a diagonal Gram rule, so no truncated matrices are built.
// Coefficients and weights are held in extended precision because the
// weights r^{2n} leave double range long before the default window edge.

#include <complex>
#include <map>

#include "annulus/annulus_params.hpp"
#include "annulus/operator_core.hpp"

namespace annulus {

using lcplx = std::complex<long double>;

enum class ShiftKind {
  MZT,       // M_z^t on H^2(Omega_r)
  MZT_STAR,  // its adjoint
  EG6_T,     // M_z^* on H^2(A_r, C, aI)
  EG6_MZ,    // M_z on H^2(A_r, C, aI)
};

const char* to_string(ShiftKind k);

struct ShiftModel {
  ShiftKind kind = ShiftKind::MZT;
  AnnulusParams params{0.5};
  double a = 0.0;
  long lo = -256;
  long hi = 256;

  static ShiftModel mzt(const AnnulusParams& p, long half_width = 256);
  static ShiftModel mzt_star(const AnnulusParams& p, long half_width = 256);
  static ShiftModel eg6_t(const AnnulusParams& p, double a, long half_width = 256);
  static ShiftModel eg6_mz(const AnnulusParams& p, double a, long half_width = 256);

  /// ||e_n||^2. Throws DomainError if it leaves extended range.
  long double gram(long n) const;
  /// Indices in [lo + 1, hi - 1] are usable.
  bool in_window(long n) const { return n > lo && n < hi; }
};

/// Finitely supported sequence n -> f_n; zero entries are not stored.
class WeightedSeq {
 public:
  WeightedSeq() = default;
  static WeightedSeq delta(long n, lcplx c = 1.0L);

  const std::map<long, lcplx>& support() const noexcept { return c_; }
  lcplx at(long n) const;
  void add(long n, lcplx c);
  bool empty() const noexcept { return c_.empty(); }
  long min_index() const { return c_.begin()->first; }
  long max_index() const { return c_.rbegin()->first; }

  WeightedSeq scaled(lcplx s) const;
  friend WeightedSeq operator+(const WeightedSeq& x, const WeightedSeq& y);
  friend WeightedSeq operator-(const WeightedSeq& x, const WeightedSeq& y);

 private:
  std::map<long, lcplx> c_;
};

/// <f, g> = sum f_n conj(g_n) gram(n)
lcplx inner(const ShiftModel& m, const WeightedSeq& f, const WeightedSeq& g);
long double norm_sq(const ShiftModel& m, const WeightedSeq& f);

/// Applies the model operator `power` times (its exact inverse for
/// negative powers). Throws WindowOverflowError when the support would reach
/// the window edge.
WeightedSeq shift_apply(const ShiftModel& m, int power, const WeightedSeq& f);

/// Orthonormal vector w_n of the MZT / MZT_STAR space.
WeightedSeq onb_vector(const ShiftModel& m, long n);

/// (1+s^2)||M*f||^2 - ||M*^2 f||^2 - s^2 ||f||^2 at f = delta_1.
double eg5_defect(const AnnulusParams& p, double s);

/// alpha_1(m) = (1 + a^2 r^2) / (1 + a^2 r^{2(1-m)})
double eg6_alpha1(double a, const AnnulusParams& p, int m);

struct Eg6Defect {
  /// alpha_1(4) - 2(1+r^2)alpha_1(3) + (1+r^4+4r^2)alpha_1(2) - 2r^2(1+r^2)alpha_1(1) + r^4
  double formula = 0.0;
  /// <beta(T*,T) f, f> / ||f||^2 on the EG6_T model, f = delta_1.
  double shift_route = 0.0;
};

Eg6Defect eg6_beta_defect(double a, const AnnulusParams& p);

struct MobiusVectors {
  double s_w0_normsq = 0.0;
  double sinv_w0_normsq = 0.0;
  double defect = 0.0;
  double closed_sinv_normsq = 0.0;
  double closed_defect = 0.0;
  int terms = 0;
  /// Certified bound on the neglected tail of the slower series.
  double tail_bound = 0.0;
};

/// S = phi(M_z^t)^*, phi the Moebius map at lambda0, evaluated on w_0 by
/// truncated series. Requires |lambda0| < r (DomainError otherwise).
MobiusVectors mobius_shift_vectors(const AnnulusParams& p, cplx lambda0, double s,
                                   double tol = 1e-13);

struct KernelValue {
  cplx value;
  int positive_terms = 0;
  int negative_terms = 0;
};

/// sum_{n in Z} (lambda conj(mu))^n / (1 + r^{2n}); both arguments strictly
/// inside the annulus (DomainError otherwise).
KernelValue hardy_kernel(cplx lambda, cplx mu, const AnnulusParams& p, double tol = 1e-15);

struct MisraPair {
  Operator a_matrix{Matrix::Zero(2, 2)};
  Operator t{Matrix::Zero(2, 2)};
  double a = 0.0;
  double det_i_minus_tt = 0.0;
  double det_alpha = 0.0;
  double det_alpha_adjoint = 0.0;
};

/// A = [[w, a], [0, w]], T = [[w, sqrt(2) a], [0, w]], a = (1-w^2)(w^2-r^2).
/// Requires r < w < 1.
MisraPair misra_pair(const AnnulusParams& p, double w);

}  // namespace annulus
