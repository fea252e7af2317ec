#include <cmath>

#include <gtest/gtest.h>

#include "annulus/errors.hpp"
#include "annulus/shift_models.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace annulus {
namespace {

using testing::Rng;

WeightedSeq random_seq(long lo, long hi, Rng& g) {
  WeightedSeq f;
  for (long n = lo; n <= hi; ++n) {
    const cplx c = testing::gaussian(g);
    f.add(n, lcplx(c.real(), c.imag()));
  }
  return f;
}

TEST(ShiftApply, SignFlipAtZero) {
  const ShiftModel m = ShiftModel::mzt(AnnulusParams(0.5));
  const WeightedSeq out = shift_apply(m, 1, WeightedSeq::delta(-1));
  ASSERT_EQ(out.support().size(), 1u);
  EXPECT_EQ(out.at(0), lcplx(-1.0L));
}

TEST(ShiftApply, PowerZeroIsIdentity) {
  Rng g(1);
  const AnnulusParams p(0.6);
  const WeightedSeq f = random_seq(-3, 3, g);
  for (const ShiftModel& m : {ShiftModel::mzt(p), ShiftModel::mzt_star(p), ShiftModel::eg6_t(p, 0.4),
                              ShiftModel::eg6_mz(p, 0.4)}) {
    const WeightedSeq out = shift_apply(m, 0, f);
    EXPECT_EQ(out.support(), f.support()) << to_string(m.kind);
  }
}

TEST(ShiftApply, InverseUndoesForward) {
  Rng g(2);
  const AnnulusParams p(0.7);
  const WeightedSeq f = random_seq(-4, 4, g);
  for (const ShiftModel& m : {ShiftModel::mzt(p), ShiftModel::mzt_star(p), ShiftModel::eg6_t(p, 0.3),
                              ShiftModel::eg6_mz(p, 0.3)}) {
    const WeightedSeq back = shift_apply(m, -3, shift_apply(m, 3, f));
    EXPECT_LT(static_cast<double>(norm_sq(m, back - f)), 1e-24 * static_cast<double>(norm_sq(m, f)))
        << to_string(m.kind);
  }
}

TEST(ShiftApply, AdjointPairing) {
  // <M f, g> = <f, M* g> ties the MZT and MZT_STAR actions together.
  Rng g(3);
  const AnnulusParams p(0.55);
  const ShiftModel m = ShiftModel::mzt(p);
  const ShiftModel s = ShiftModel::mzt_star(p);
  for (int trial = 0; trial < 20; ++trial) {
    const WeightedSeq f = random_seq(-5, 5, g);
    const WeightedSeq h = random_seq(-5, 5, g);
    const lcplx lhs = inner(m, shift_apply(m, 1, f), h);
    const lcplx rhs = inner(m, f, shift_apply(s, 1, h));
    EXPECT_LT(std::abs(lhs - rhs), 1e-14L * (1 + std::abs(lhs)));
  }
}

TEST(ShiftApply, WindowOverflowIsDetected) {
  const ShiftModel m = ShiftModel::mzt(AnnulusParams(0.5), 8);
  EXPECT_NO_THROW(shift_apply(m, 7, WeightedSeq::delta(0)));
  try {
    shift_apply(m, 8, WeightedSeq::delta(0));
    FAIL() << "expected overflow";
  } catch (const WindowOverflowError& e) {
    EXPECT_GE(e.required_half_width(), 9);
  }
  EXPECT_THROW(shift_apply(m, -9, WeightedSeq::delta(0)), WindowOverflowError);
  EXPECT_THROW(shift_apply(m, 1, WeightedSeq::delta(8)), WindowOverflowError);
}

TEST(Gram, Examples) {
  const AnnulusParams p(0.5);
  const ShiftModel m = ShiftModel::mzt(p);
  EXPECT_NEAR(static_cast<double>(m.gram(2)), 1.0 / 12.0, 1e-16);
  EXPECT_NEAR(static_cast<double>(norm_sq(m, onb_vector(m, 0))), 1.0, 1e-16);
  EXPECT_EQ(inner(m, onb_vector(m, 3), onb_vector(m, 5)), lcplx(0.0L));
  EXPECT_THROW(onb_vector(ShiftModel::eg6_t(p, 0.5), 0), InputError);
}

TEST(Gram, OrthonormalBasis) {
  const AnnulusParams p(0.3);
  const ShiftModel m = ShiftModel::mzt(p);
  for (long n = -128; n <= 128; n += 8) {
    for (long k = -128; k <= 128; k += 8) {
      const long double v = std::abs(inner(m, onb_vector(m, n), onb_vector(m, k)));
      EXPECT_NEAR(static_cast<double>(v), n == k ? 1.0 : 0.0, 1e-14);
    }
  }
}

TEST(Gram, OutOfRangeWeightsRaise) {
  const ShiftModel m = ShiftModel::mzt(AnnulusParams(0.01), 100000);
  EXPECT_THROW(m.gram(90000), DomainError);
}

TEST(PowerNorms, UnitNormsUpToQuarterWindow) {
  for (double r : {0.1, 0.5, 0.9}) {
    const ShiftModel m = ShiftModel::mzt(AnnulusParams(r));
    for (int n = 1; n <= 64; ++n) {
      const double a = std::sqrt(static_cast<double>(norm_sq(m, shift_apply(m, n, onb_vector(m, -n)))));
      const WeightedSeq back = shift_apply(m, -n, onb_vector(m, n + 1));
      const double b = std::sqrt(static_cast<double>(norm_sq(m, back))) * std::pow(r, n);
      EXPECT_NEAR(a, 1.0, 1e-14) << "r " << r << " n " << n;
      EXPECT_NEAR(b, 1.0, 1e-14) << "r " << r << " n " << n;
    }
  }
}

TEST(PowerNorms, ImageIsSignedW0) {
  const ShiftModel m = ShiftModel::mzt(AnnulusParams(0.4));
  const WeightedSeq img = shift_apply(m, 5, onb_vector(m, -5));
  const WeightedSeq w0 = onb_vector(m, 0);
  EXPECT_LT(static_cast<double>(norm_sq(m, img + w0)), 1e-28);
}

TEST(Eg5, AnchorsAndGrid) {
  EXPECT_NEAR(eg5_defect(AnnulusParams(0.5), 0.5), -0.0625, 1e-15);
  EXPECT_NEAR(eg5_defect(AnnulusParams(0.9), 0.1), -0.0081, 1e-15);
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      const double r = i / 11.0;
      const double s = j / 11.0;
      EXPECT_NEAR(eg5_defect(AnnulusParams(r), s), -s * s * r * r, 1e-12);
    }
  }
  EXPECT_THROW(eg5_defect(AnnulusParams(0.5), 1.0), DomainError);
}

TEST(Eg5, SmallSLimit) {
  for (double r : {0.2, 0.5, 0.8}) {
    EXPECT_NEAR(eg5_defect(AnnulusParams(r), 1e-6) / 1e-12, -r * r, 1e-6);
  }
}

TEST(Eg6, AnchorIsNegative) {
  const Eg6Defect d = eg6_beta_defect(0.37, AnnulusParams(0.75));
  EXPECT_LT(d.formula, 0.0);
  EXPECT_LT(d.shift_route, 0.0);
  EXPECT_NEAR(d.formula, oracle::eg6_formula(0.37, 0.75), 1e-15);
}

TEST(Eg6, SmallALimitVanishes) {
  for (double r : {0.2, 0.5, 0.75}) {
    EXPECT_NEAR(eg6_beta_defect(1e-9, AnnulusParams(r)).formula, 0.0, 1e-12);
  }
}

TEST(Eg6, DualRouteAgreement) {
  Rng g(4);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = testing::uniform(g, 0.05, 2.0);
    const double r = testing::uniform(g, 0.1, 0.95);
    const Eg6Defect d = eg6_beta_defect(a, AnnulusParams(r));
    EXPECT_NEAR(d.shift_route, d.formula, 1e-12) << a << " " << r;
    EXPECT_NEAR(d.formula, oracle::eg6_formula(a, r), 1e-13);
  }
}

TEST(Eg6, MzIsAnAnnulusIsometryOnTheModel) {
  Rng g(5);
  for (int trial = 0; trial < 20; ++trial) {
    const AnnulusParams p(testing::uniform(g, 0.2, 0.9));
    const ShiftModel m = ShiftModel::eg6_mz(p, testing::uniform(g, 0.1, 1.5));
    const WeightedSeq f = random_seq(-6, 6, g);
    const long double lhs = (1 + static_cast<long double>(p.r2())) * norm_sq(m, f) -
                            norm_sq(m, shift_apply(m, 1, f)) -
                            static_cast<long double>(p.r2()) * norm_sq(m, shift_apply(m, -1, f));
    EXPECT_NEAR(static_cast<double>(lhs), 0.0, 1e-12 * static_cast<double>(norm_sq(m, f)));
  }
}

TEST(Mobius, ZeroCenter) {
  const double r = 0.6;
  const MobiusVectors v = mobius_shift_vectors(AnnulusParams(r), 0.0, 0.3);
  EXPECT_NEAR(v.sinv_w0_normsq, 1.0 / (r * r), 1e-12);
  EXPECT_NEAR(v.defect, 0.09 * (r * r - 1) / (r * r), 1e-12);
  EXPECT_LT(v.defect, 0.0);
}

TEST(Mobius, WorkedPoint) {
  const MobiusVectors v = mobius_shift_vectors(AnnulusParams(0.5), 0.25, 0.3);
  EXPECT_NEAR(v.sinv_w0_normsq, 4.75, 1e-8);
  EXPECT_NEAR(v.defect, -0.3375, 1e-8);
  EXPECT_NEAR(v.s_w0_normsq, 1.0, 1e-8);
  EXPECT_LE(v.tail_bound, 1e-13);
}

TEST(Mobius, RandomCentersAgainstClosedForms) {
  Rng g(6);
  for (int trial = 0; trial < 10; ++trial) {
    const double r = testing::uniform(g, 0.2, 0.9);
    const cplx l = testing::uniform(g, 0.0, 0.95) * r * testing::unit_phase(g);
    const double s = testing::uniform(g, 0.05, 0.95);
    const MobiusVectors v = mobius_shift_vectors(AnnulusParams(r), l, s);
    const double lm = std::abs(l);
    EXPECT_NEAR(v.s_w0_normsq, 1.0, 1e-8);
    EXPECT_NEAR(v.sinv_w0_normsq, oracle::mobius_sinv_normsq(r, lm), 1e-8);
    EXPECT_NEAR(v.defect, oracle::mobius_defect(r, lm, s), 1e-8);
    EXPECT_LT(v.defect, 0.0);
  }
}

TEST(Mobius, RejectsLargeCenter) {
  EXPECT_THROW(mobius_shift_vectors(AnnulusParams(0.5), 0.5, 0.3), DomainError);
}

TEST(Kernel, PartialSumOracleAndSymmetry) {
  const AnnulusParams p(0.5);
  const KernelValue k = hardy_kernel(0.7, 0.7, p);
  EXPECT_NEAR(std::abs(k.value - oracle::kernel_partial_sum(0.7, 0.7, 0.5, 10000)), 0.0, 1e-10);
  Rng g(7);
  for (int trial = 0; trial < 20; ++trial) {
    const cplx l = testing::uniform(g, 0.55, 0.95) * testing::unit_phase(g);
    const cplx m = testing::uniform(g, 0.55, 0.95) * testing::unit_phase(g);
    const cplx a = hardy_kernel(l, m, p).value;
    const cplx b = hardy_kernel(m, l, p).value;
    EXPECT_LT(std::abs(a - std::conj(b)), 1e-12 * std::abs(a));
    EXPECT_LT(std::abs(a - oracle::kernel_partial_sum(l, m, 0.5, 10000)), 1e-10);
  }
}

TEST(Kernel, DiagonalBound) {
  for (int i = 1; i <= 10; ++i) {
    const double r = i / 11.0;
    for (int j = 1; j <= 10; ++j) {
      const double w = r + (1 - r) * j / 11.0;
      const double k = hardy_kernel(w, w, AnnulusParams(r)).value.real();
      EXPECT_LE(k, 1 / ((1 - w * w) * (w * w - r * r)));
      EXPECT_GT(k, 0.0);
    }
  }
}

TEST(Kernel, RejectsPointsOffTheAnnulus) {
  EXPECT_THROW(hardy_kernel(0.3, 0.7, AnnulusParams(0.5)), DomainError);
  EXPECT_THROW(hardy_kernel(0.7, 1.0, AnnulusParams(0.5)), DomainError);
}

TEST(Misra, Anchors) {
  const MisraPair a = misra_pair(AnnulusParams(0.35), 0.91);
  EXPECT_NEAR(a.a, 0.12129264, 5e-9);
  EXPECT_GT(a.det_i_minus_tt, 0.0);
  EXPECT_LT(a.det_alpha, 0.0);
  EXPECT_NEAR(a.det_i_minus_tt, oracle::misra_det(0.35, 0.91), 1e-14);
  const double nt = op_norm(a.t);
  const double nti = 0.35 * op_norm(certified_inverse(a.t));
  EXPECT_NEAR(nti, 3500.0 / 8281.0 * nt, 1e-12);
  EXPECT_NEAR(0.35 / (0.91 * 0.91), 3500.0 / 8281.0, 1e-15);

  const MisraPair b = misra_pair(AnnulusParams(0.52), 0.99);
  EXPECT_NEAR(b.a, 0.01412303, 5e-9);
  EXPECT_LT(b.det_i_minus_tt, 0.0);
  EXPECT_THROW(misra_pair(AnnulusParams(0.5), 0.4), DomainError);
}

}  // namespace
}  // namespace annulus
