#include "annulus/variety_geom.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {

double VarietyPoint::constant() const {
  if (variant == VarietyKind::Principal) return r / (1.0 + r * r);
  return 1.0 / (r * r + 1.0 / (r * r));
}

double VarietyPoint::residual() const { return std::abs(z1 * z2 - constant()); }

VarietyPoint kappa_point(cplx z, const AnnulusParams& p, VarietyKind variant) {
  if (z == cplx(0.0)) throw DomainError("kappa is undefined at 0");
  VarietyPoint pt;
  pt.r = p.r();
  pt.variant = variant;
  if (variant == VarietyKind::Principal) {
    const double s = std::sqrt(p.c1());
    pt.z1 = z / s;
    pt.z2 = p.r() / (s * z);
  } else {
    const double s = std::sqrt(p.r2() + 1.0 / p.r2());
    pt.z1 = z / s;
    pt.z2 = 1.0 / (s * z);
  }
  return pt;
}

const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::Interior:
      return "INTERIOR";
    case PointClass::DistinguishedBoundary:
      return "DISTINGUISHED_BOUNDARY";
    case PointClass::Outside:
      return "OUTSIDE";
  }
  return "?";
}

PointClass classify_point(const VarietyPoint& pt, double tol) {
  if (pt.residual() > 1e-9) {
    std::ostringstream os;
    os << "point is not on the variety (residual " << pt.residual() << ")";
    throw DomainError(os.str());
  }
  const double s = pt.ball_radius_sq();
  if (s < 1.0 - tol) return PointClass::Interior;
  if (s > 1.0 + tol) return PointClass::Outside;
  return PointClass::DistinguishedBoundary;
}

SuiteResult lem_pi_property_suite(const AnnulusParams& p, int samples, std::uint64_t seed) {
  if (samples <= 0) throw InputError("suite needs a positive sample count");
  const double r = p.r();
  const double tol = 1e-9;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  // log-modulus spread over an annulus three times as wide as the target
  std::uniform_real_distribution<double> logmod(2.0 * std::log(r), -std::log(r));
  std::uniform_int_distribution<int> kind(0, 3);

  SuiteResult res;
  res.samples = samples;
  auto fail = [&](const std::string& why, cplx z) {
    ++res.failures;
    res.pass = false;
    if (res.first_failure.empty()) {
      std::ostringstream os;
      os << why << " at z = " << z << " (|z| = " << std::abs(z) << ")";
      res.first_failure = os.str();
    }
  };

  for (int i = 0; i < samples; ++i) {
    double m = 0.0;
    switch (kind(rng)) {
      case 0:
        m = std::exp(logmod(rng));
        break;
      case 1:
        m = (i % 2 == 0) ? r : 1.0;  // exactly on a boundary circle
        break;
      case 2:
        m = (i % 2 == 0) ? 1.0 + 1e-6 : r * (1.0 - 1e-6);  // just outside
        break;
      default:
        m = (i % 2 == 0) ? 1.0 - 1e-6 : r * (1.0 + 1e-6);  // just inside
        break;
    }
    const cplx z = std::polar(m, angle(rng));
    const VarietyPoint pt = kappa_point(z, p);
    if (pt.residual() > 1e-14) fail("variety residual above 1e-14", z);
    const PointClass c = classify_point(pt, tol);
    // Scalar oracle: (|z|^2 - r^2)(|z|^2 - 1) <= 0 on the closed annulus.
    const double g = (m * m - r * r) * (m * m - 1.0);
    const bool on_circle = std::abs(m - r) <= 1e-12 * r || std::abs(m - 1.0) <= 1e-12;
    const bool closed = g <= 0.0 || on_circle;
    const bool open = g < 0.0 && !on_circle;
    if (closed != (c != PointClass::Outside)) fail("closed-annulus identity", z);
    if (open != (c == PointClass::Interior)) fail("open-annulus identity", z);
    if (on_circle != (c == PointClass::DistinguishedBoundary)) fail("boundary identity", z);

    // kappa(z) = kappa(z') forces z = z': the first coordinate determines z.
    const cplx zp = std::polar(std::exp(logmod(rng)), angle(rng));
    const VarietyPoint qt = kappa_point(zp, p);
    const double dist = std::abs(pt.z1 - qt.z1) + std::abs(pt.z2 - qt.z2);
    if (dist <= 1e-10 && std::abs(z - zp) > 1e-10 * std::max(1.0, std::abs(z))) {
      fail("kappa not injective", z);
    }
    const double recovered = std::abs(pt.z1 * std::sqrt(p.c1()) - z);
    if (recovered > 1e-12 * std::abs(z)) fail("kappa does not invert on its image", z);
  }
  return res;
}

}  // namespace annulus
