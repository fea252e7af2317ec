#pragma once

// Verification of block-model and compression identities on explicit
// finite dilation data. Nothing here constructs a dilation.

#include <optional>

#include "annulus/annulus_classes.hpp"
#include "annulus/annulus_params.hpp"
#include "annulus/operator_core.hpp"

namespace annulus {

struct DilationData {
  Operator t;  // on H, dim h
  Matrix a;    // h x l
  Operator b;  // on L, dim l

  /// Throws InputError on inconsistent shapes, InvertibilityError on singular B.
  void validate() const;
};

struct ModelCheck {
  bool pass = false;
  /// ||alpha(T*,T) - (1+r^2)^2 A B^{-*}(I - B1*B1) B^{-1} A*||
  double alpha_residual = 0.0;
  /// ||T*A + AB - (1+r^2) A B^{-*}||
  double intertwining_residual = 0.0;
  double scale = 1.0;
  /// Whether B* passes is_Ar_isometry (B is an A_r-coisometry).
  bool b_coisometry = false;
  double b_isometry_residual = 0.0;
  /// B* fails the isometry test but lies within 100 tol of passing.
  bool b_near_miss = false;
};

/// Both identities within tol * scale and B* an A_r-isometry at tol.
ModelCheck model_identity_check(const DilationData& d, const AnnulusParams& p, double tol = 1e-10);

/// alpha(T*,T) predicted by the block model: (1+r^2)^2 A B^{-*}(I - B1*B1) B^{-1} A*.
Matrix model_alpha(const DilationData& d, const AnnulusParams& p);

struct Block {
  Operator v;
  Operator v_inv;
};

/// V = [[T*, A], [0, B]] with its exact block inverse.
Block build_block(const DilationData& d);

/// Inverse of build_block: reads (T*, A, B) off a block upper-triangular V.
DilationData split_block(const Operator& v, Eigen::Index dim_h);

/// max over m in [m_lo, m_hi] of ||T^m - P_H V^m |_H|| / max(1, ||V||^|m|).
double compression_check(const Operator& t, const Operator& v, Eigen::Index dim_h, int m_lo = -8,
                         int m_hi = 8);

/// Spherical unitary with U1 U2 = c_q I.
bool b2_variety_unitary_check(const OperatorPair& pair, const AnnulusParams& p, double tol = 1e-9);

}  // namespace annulus
