#pragma once

// Pointwise geometry of kappa and kappa_0: image points on the varieties
// z1 z2 = c and their position relative to the closed unit ball of C^2.
// On these varieties the topological boundary inside the ball coincides
// with the distinguished boundary, so a single boundary label is exposed.

#include <cstdint>
#include <string>

#include "annulus/annulus_params.hpp"
#include "annulus/operator_core.hpp"

namespace annulus {

enum class VarietyKind { Principal, Quantum };

struct VarietyPoint {
  cplx z1;
  cplx z2;
  double r = 0.5;
  VarietyKind variant = VarietyKind::Principal;

  /// r / (1+r^2) for Principal, 1 / (r^2 + r^-2) for Quantum.
  double constant() const;
  /// |z1 z2 - constant()|
  double residual() const;
  /// |z1|^2 + |z2|^2
  double ball_radius_sq() const { return std::norm(z1) + std::norm(z2); }
};

/// kappa(z) or kappa_0(z). Throws DomainError for z = 0.
VarietyPoint kappa_point(cplx z, const AnnulusParams& p,
                         VarietyKind variant = VarietyKind::Principal);

enum class PointClass { Interior, DistinguishedBoundary, Outside };
const char* to_string(PointClass c);

/// By s = |z1|^2 + |z2|^2 against 1 +- tol. Throws DomainError when the
/// variety residual exceeds 1e-9.
PointClass classify_point(const VarietyPoint& pt, double tol = 1e-9);

struct SuiteResult {
  bool pass = true;
  int samples = 0;
  int failures = 0;
  std::string first_failure;
};

/// Samples z across annuli around the closed annulus and checks that
/// membership in the closed annulus, the open annulus and its boundary
/// circles matches the class of kappa(z), plus injectivity of kappa.
SuiteResult lem_pi_property_suite(const AnnulusParams& p, int samples, std::uint64_t seed = 0);

}  // namespace annulus
