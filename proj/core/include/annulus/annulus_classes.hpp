#pragma once

// Defect forms, the induced pair kappa(T) and membership predicates for the
// operator classes attached to the annulus.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annulus/annulus_params.hpp"
#include "annulus/operator_core.hpp"
#include "annulus/vn_engine.hpp"

namespace annulus {

/// Default relative tolerance of every PSD / norm predicate below.
inline constexpr double kClassTol = 1e-9;

struct OperatorPair {
  Operator first;
  Operator second;
  /// ||T1 T2 - T2 T1||
  double commute_defect = 0.0;

  /// commute_defect <= 1e-9 max(||T1||, ||T2||, 1)^2
  bool commuting() const;
};

OperatorPair make_pair(Operator first, Operator second);

/// -T*^2 T^2 + (1+r^2) T*T - r^2 I
HermitianForm alpha_form(const Operator& t, const AnnulusParams& p);
/// T*^4T^4 - 2(1+r^2)T*^3T^3 + (1+r^4+4r^2)T*^2T^2 - 2r^2(1+r^2)T*T + r^4 I
HermitianForm beta_form(const Operator& t, const AnnulusParams& p);
/// Sum of the norms of the terms of alpha_form; the PSD tolerance scales with it.
double alpha_scale(const Operator& t, const AnnulusParams& p);
double beta_scale(const Operator& t, const AnnulusParams& p);

/// (T / sqrt(1+r^2), r T^{-1} / sqrt(1+r^2)). Throws InvertibilityError.
OperatorPair kappa_pair(const Operator& t, const AnnulusParams& p);

enum class SphericalKind { Contraction, Isometry, Unitary };

struct FormVerdict {
  bool holds = false;
  /// Signed distance to failure: positive inside, negative outside.
  double margin = 0.0;
  /// Unit vector realizing a negative margin, when one exists.
  std::optional<Vector> witness;
};

/// Throws ContractViolation when the pair does not commute.
FormVerdict is_spherical(const OperatorPair& pair, SphericalKind kind, double tol = kClassTol);

/// n = 1: I - T1*T1 - T2*T2.  n = 2: I + M^2(I) - 2M(I), M(X) = T1*XT1 + T2*XT2.
HermitianForm delta_n(const OperatorPair& pair, int n);

/// ||[T*,T]|| <= tol s and ||(I-T*T)(T*T-r^2)|| <= tol s, s = max(1, ||T||^4).
FormVerdict is_Ar_unitary(const Operator& t, const AnnulusParams& p, double tol = kClassTol);

struct IsometryVerdict : FormVerdict {
  /// ||alpha_form(V)|| / alpha_scale(V); vanishes with the defining identity.
  double alpha_cross_check = 0.0;
};

/// ||V*V + r^2 V^{-*}V^{-1} - (1+r^2) I|| <= tol s. Throws InvertibilityError.
IsometryVerdict is_Ar_isometry(const Operator& v, const AnnulusParams& p, double tol = kClassTol);

struct CanonicalSplit {
  Matrix unitary_projector;
  Matrix cnu_projector;
  /// Orthonormal basis of the range of unitary_projector.
  Matrix unitary_basis;
  int unitary_rank = 0;
  /// max(||(I-P)TP||, ||(I-P)T*P||)
  double reducing_residual = 0.0;
  /// Reducing within tolerance and the restriction is an A_r-unitary.
  bool verified = false;
};

/// Largest reducing subspace on which T is an A_r-unitary.
CanonicalSplit canonical_split(const Operator& t, const AnnulusParams& p, double tol = kClassTol);

struct ClassVerdict {
  Verdict verdict = Verdict::Undecided;
  double margin = 0.0;
  std::optional<Vector> witness_vector;
  std::optional<VnCertificate> witness_function;
  std::optional<cplx> witness_eigenvalue;
  std::string note;
};

struct QuantumBridgeReport {
  ClassVerdict sa;
  ClassVerdict pa;
  ClassVerdict qa;
  /// Verdicts of rT against the A_{r^2} versions of each class.
  Verdict sa_scaled = Verdict::Undecided;
  Verdict pa_scaled = Verdict::Undecided;
  Verdict qa_scaled = Verdict::Undecided;

  bool agree() const {
    return sa.verdict == sa_scaled && pa.verdict == pa_scaled && qa.verdict == qa_scaled;
  }
};

/// SA_r, PA_r, QA_r, each computed directly and via T -> rT.
QuantumBridgeReport quantum_bridge(const Operator& t, const AnnulusParams& p,
                                   const VnBudget& budget);

namespace cls {
inline constexpr const char* kAr = "A_r-contraction";
inline constexpr const char* kAlpha = "C_alpha";
inline constexpr const char* kAlphaStar = "C_alpha*";
inline constexpr const char* kOneR = "C_1r";
inline constexpr const char* kOne = "C_1";
inline constexpr const char* kBeta = "C_beta";
inline constexpr const char* kSpherical = "kappa-spherical-contraction";
inline constexpr const char* kDelta2 = "Delta2-positive";
inline constexpr const char* kBetaPos = "beta-positive";
inline constexpr const char* kPA = "PA_r";
inline constexpr const char* kQA = "QA_r";
inline constexpr const char* kSA = "SA_r";
}  // namespace cls

struct ChainEdge {
  const char* smaller;
  const char* larger;
};

/// Inclusions IN(smaller) => IN(larger) checked at report assembly.
const std::vector<ChainEdge>& chain_edges();

struct MembershipReport {
  std::map<std::string, ClassVerdict> classes;
  bool chain_consistent = true;
  std::vector<std::string> chain_violations;
  VnBudget budget;
  double r = 0.0;
};

/// Classes violating the chain in `classes`; empty when consistent.
std::vector<std::string> chain_violations(const std::map<std::string, ClassVerdict>& classes);

MembershipReport classify(const Operator& t, const AnnulusParams& p, const VnBudget& budget);

/// C_alpha membership using the raw alpha-form test (no budgeted search).
ClassVerdict c_alpha_verdict(const Operator& t, const AnnulusParams& p, double tol = kClassTol);
/// C_{1,r} membership.
ClassVerdict c_1r_verdict(const Operator& t, const AnnulusParams& p, double tol = kClassTol);

}  // namespace annulus
