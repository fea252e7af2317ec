#pragma once

#include <complex>

namespace annulus {

/// Modulus r of the annulus {r < |z| < 1}, strictly inside (0, 1).
class AnnulusParams {
 public:
  explicit AnnulusParams(double r);

  double r() const noexcept { return r_; }
  double r2() const noexcept { return r_ * r_; }
  /// 1 + r^2
  double c1() const noexcept { return c1_; }
  /// r / (1 + r^2), the constant of the principal variety z1 z2 = c_q.
  double cq() const noexcept { return cq_; }

 private:
  double r_;
  double c1_;
  double cq_;
};

/// Closed annulus {inner <= |z| <= outer}; the boundary is the two circles.
struct AnnulusDomain {
  double inner;
  double outer;

  /// {r <= |z| <= 1}
  static AnnulusDomain standard(const AnnulusParams& p) { return {p.r(), 1.0}; }
  /// {r <= |z| <= 1/r}
  static AnnulusDomain quantum(const AnnulusParams& p) { return {p.r(), 1.0 / p.r()}; }

  /// Relative slack rel_tol on both radii.
  bool contains(std::complex<double> z, double rel_tol) const {
    const double m = std::abs(z);
    return m >= inner * (1.0 - rel_tol) && m <= outer * (1.0 + rel_tol);
  }
};

}  // namespace annulus
