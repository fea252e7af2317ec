#include "annulus/shift_models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "annulus/annulus_classes.hpp"
#include "annulus/errors.hpp"

namespace annulus {

const char* to_string(ShiftKind k) {
  switch (k) {
    case ShiftKind::MZT:
      return "MZT";
    case ShiftKind::MZT_STAR:
      return "MZT_STAR";
    case ShiftKind::EG6_T:
      return "EG6_T";
    case ShiftKind::EG6_MZ:
      return "EG6_MZ";
  }
  return "?";
}

namespace {

ShiftModel make(ShiftKind kind, const AnnulusParams& p, double a, long half_width) {
  if (half_width < 2) throw InputError("shift window half width must be at least 2");
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("weight parameter a must be >= 0");
  ShiftModel m;
  m.kind = kind;
  m.params = p;
  m.a = a;
  m.lo = -half_width;
  m.hi = half_width;
  return m;
}

long double checked(long double v, long n) {
  if (!std::isfinite(v) || !(v > 0.0L) || v < std::numeric_limits<long double>::min()) {
    std::ostringstream os;
    os << "Gram weight at index " << n << " leaves the representable range";
    throw DomainError(os.str());
  }
  return v;
}

long double r2l(const ShiftModel& m) {
  const long double r = m.params.r();
  return r * r;
}

void require_window(const ShiftModel& m, long n) {
  if (!m.in_window(n)) {
    std::ostringstream os;
    os << "index " << n << " reaches the edge of window [" << m.lo << ", " << m.hi << "]";
    const long need = (n < 0 ? -n : n) + 1;
    throw WindowOverflowError(os.str(), need);
  }
}

// One forward (dir = +1) or inverse (dir = -1) step on a single index:
// returns the destination index and the multiplier.
std::pair<long, long double> step(const ShiftModel& m, long n, int dir) {
  const long double r2 = r2l(m);
  switch (m.kind) {
    case ShiftKind::MZT:
      if (dir > 0) return {n + 1, n + 1 == 0 ? -1.0L : 1.0L};
      return {n - 1, n == 0 ? -1.0L : 1.0L};
    case ShiftKind::MZT_STAR: {
      auto factor = [&](long src) { return src >= 1 ? r2 : (src == 0 ? -1.0L : 1.0L); };
      if (dir > 0) return {n - 1, factor(n)};
      return {n + 1, 1.0L / factor(n + 1)};
    }
    case ShiftKind::EG6_T:
      if (dir > 0) return {n - 1, m.gram(n) / m.gram(n - 1)};
      return {n + 1, m.gram(n) / m.gram(n + 1)};
    case ShiftKind::EG6_MZ:
      return {n + dir, 1.0L};
  }
  return {n, 1.0L};
}

}  // namespace

ShiftModel ShiftModel::mzt(const AnnulusParams& p, long half_width) {
  return make(ShiftKind::MZT, p, 0.0, half_width);
}
ShiftModel ShiftModel::mzt_star(const AnnulusParams& p, long half_width) {
  return make(ShiftKind::MZT_STAR, p, 0.0, half_width);
}
ShiftModel ShiftModel::eg6_t(const AnnulusParams& p, double a, long half_width) {
  return make(ShiftKind::EG6_T, p, a, half_width);
}
ShiftModel ShiftModel::eg6_mz(const AnnulusParams& p, double a, long half_width) {
  return make(ShiftKind::EG6_MZ, p, a, half_width);
}

long double ShiftModel::gram(long n) const {
  const long double r = params.r();
  switch (kind) {
    case ShiftKind::MZT:
    case ShiftKind::MZT_STAR: {
      const long double base = 1.0L / (1.0L - r * r);
      return checked(n >= 0 ? std::pow(r, 2.0L * n) * base : base, n);
    }
    case ShiftKind::EG6_T:
    case ShiftKind::EG6_MZ: {
      const long double aa = static_cast<long double>(a) * a;
      return checked(1.0L + aa * std::pow(r, 2.0L * n), n);
    }
  }
  return 1.0L;
}

WeightedSeq WeightedSeq::delta(long n, lcplx c) {
  WeightedSeq s;
  s.add(n, c);
  return s;
}

lcplx WeightedSeq::at(long n) const {
  const auto it = c_.find(n);
  return it == c_.end() ? lcplx(0.0L) : it->second;
}

void WeightedSeq::add(long n, lcplx c) {
  const lcplx v = at(n) + c;
  if (v == lcplx(0.0L)) {
    c_.erase(n);
  } else {
    c_[n] = v;
  }
}

WeightedSeq WeightedSeq::scaled(lcplx s) const {
  WeightedSeq out;
  for (const auto& [n, c] : c_) out.add(n, s * c);
  return out;
}

WeightedSeq operator+(const WeightedSeq& x, const WeightedSeq& y) {
  WeightedSeq out = x;
  for (const auto& [n, c] : y.c_) out.add(n, c);
  return out;
}

WeightedSeq operator-(const WeightedSeq& x, const WeightedSeq& y) {
  WeightedSeq out = x;
  for (const auto& [n, c] : y.c_) out.add(n, -c);
  return out;
}

lcplx inner(const ShiftModel& m, const WeightedSeq& f, const WeightedSeq& g) {
  lcplx s = 0.0L;
  for (const auto& [n, c] : f.support()) {
    const lcplx d = g.at(n);
    if (d != lcplx(0.0L)) s += c * std::conj(d) * m.gram(n);
  }
  return s;
}

long double norm_sq(const ShiftModel& m, const WeightedSeq& f) {
  long double s = 0.0L;
  for (const auto& [n, c] : f.support()) s += std::norm(c) * m.gram(n);
  return s;
}

WeightedSeq shift_apply(const ShiftModel& m, int power, const WeightedSeq& f) {
  for (const auto& [n, c] : f.support()) require_window(m, n);
  WeightedSeq cur = f;
  const int dir = power >= 0 ? 1 : -1;
  for (int it = 0; it < std::abs(power); ++it) {
    WeightedSeq next;
    for (const auto& [n, c] : cur.support()) {
      const auto [dst, factor] = step(m, n, dir);
      require_window(m, dst);
      next.add(dst, c * factor);
    }
    cur = std::move(next);
  }
  return cur;
}

WeightedSeq onb_vector(const ShiftModel& m, long n) {
  if (m.kind != ShiftKind::MZT && m.kind != ShiftKind::MZT_STAR) {
    throw InputError("orthonormal basis vectors are defined for the MZT models");
  }
  require_window(m, n);
  const long double r = m.params.r();
  const long double root = std::sqrt(1.0L - r * r);
  const long double c = n >= 0 ? root / std::pow(r, static_cast<long double>(n)) : root;
  if (!std::isfinite(c)) throw DomainError("basis coefficient leaves the representable range");
  return WeightedSeq::delta(n, c);
}

double eg5_defect(const AnnulusParams& p, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("eg5 needs s in (0, 1)");
  const ShiftModel star = ShiftModel::mzt_star(p);
  const WeightedSeq f = WeightedSeq::delta(1);
  const long double a = norm_sq(star, shift_apply(star, 1, f));
  const long double b = norm_sq(star, shift_apply(star, 2, f));
  const long double c = norm_sq(star, f);
  const long double s2 = static_cast<long double>(s) * s;
  // (1+s^2)a - b - s^2 c, grouped to avoid cancelling the O(1) parts.
  return static_cast<double>((a - b) + s2 * (a - c));
}

double eg6_alpha1(double a, const AnnulusParams& p, int m) {
  const double aa = a * a;
  return (1.0 + aa * p.r2()) / (1.0 + aa * std::pow(p.r(), 2.0 * (1 - m)));
}

Eg6Defect eg6_beta_defect(double a, const AnnulusParams& p) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("eg6 needs a > 0");
  const double r2 = p.r2();
  const double r4 = r2 * r2;
  const double c1 = p.c1();
  Eg6Defect out;
  out.formula = eg6_alpha1(a, p, 4) - 2.0 * c1 * eg6_alpha1(a, p, 3) +
                (1.0 + r4 + 4.0 * r2) * eg6_alpha1(a, p, 2) - 2.0 * r2 * c1 * eg6_alpha1(a, p, 1) +
                r4;

  const ShiftModel t = ShiftModel::eg6_t(p, a);
  const WeightedSeq f = WeightedSeq::delta(1);
  long double n[5];
  for (int k = 0; k <= 4; ++k) n[k] = norm_sq(t, shift_apply(t, k, f));
  const long double lr2 = r2;
  const long double lr4 = lr2 * lr2;
  const long double lc1 = 1.0L + lr2;
  const long double q = n[4] - 2.0L * lc1 * n[3] + (1.0L + lr4 + 4.0L * lr2) * n[2] -
                        2.0L * lr2 * lc1 * n[1] + lr4 * n[0];
  out.shift_route = static_cast<double>(q / n[0]);
  return out;
}

MobiusVectors mobius_shift_vectors(const AnnulusParams& p, cplx lambda0, double s, double tol) {
  const double lam = std::abs(lambda0);
  const double r = p.r();
  if (!(lam < r)) throw DomainError("Moebius parameter needs |lambda0| < r");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  // Term n of the slower series (S^{-1} w_0) has norm (1-|l|^2)|l|^{n-1} r^{-n}.
  const double q = lam / r;
  int terms = 0;
  double tail = (1.0 - lam * lam) / (r * (1.0 - q));
  while (tail >= tol) {
    if (++terms > 200000) throw DomainError("Moebius series converges too slowly");
    tail *= q;
  }
  const long half = std::max<long>(256, terms + 2);
  const ShiftModel star = ShiftModel::mzt_star(p, half);
  const WeightedSeq w0 = onb_vector(star, 0);
  const lcplx l(lambda0.real(), lambda0.imag());
  const long double one_minus = 1.0L - std::norm(l);

  WeightedSeq sw0 = w0.scaled(-std::conj(l));
  WeightedSeq sinv = w0.scaled(-l);
  WeightedSeq fwd = w0;
  WeightedSeq back = w0;
  lcplx lp = 1.0L;
  lcplx lpc = 1.0L;
  for (int n = 1; n <= terms; ++n) {
    fwd = shift_apply(star, 1, fwd);     // (M*)^n w_0 = -w_{-n}
    back = shift_apply(star, -1, back);  // (M*)^{-n} w_0 = r^{-n} w_n
    sw0 = sw0 + fwd.scaled(one_minus * lp);
    sinv = sinv + back.scaled(one_minus * lpc);
    lp *= l;
    lpc *= std::conj(l);
  }

  MobiusVectors out;
  out.terms = terms;
  out.tail_bound = tail;
  out.s_w0_normsq = static_cast<double>(norm_sq(star, sw0));
  out.sinv_w0_normsq = static_cast<double>(norm_sq(star, sinv));
  const double l2 = lam * lam;
  out.closed_sinv_normsq = l2 + (1.0 - l2) * (1.0 - l2) / (r * r - l2);
  out.defect = (1.0 + s * s) - out.s_w0_normsq - s * s * out.sinv_w0_normsq;
  out.closed_defect = s * s * (1.0 - l2) * (r * r - 1.0) / (r * r - l2);
  return out;
}

KernelValue hardy_kernel(cplx lambda, cplx mu, const AnnulusParams& p, double tol) {
  const double r = p.r();
  for (cplx z : {lambda, mu}) {
    const double m = std::abs(z);
    if (!(m > r && m < 1.0)) throw DomainError("kernel series diverges off the open annulus");
  }
  const cplx x = lambda * std::conj(mu);
  const cplx y = p.r2() / x;
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  KernelValue out;
  cplx sum = 0.0;
  cplx term = 1.0;  // x^n
  double r2n = 1.0;
  double bound = 1.0 / (1.0 - ax);
  for (int n = 0; bound >= tol; ++n) {
    sum += term / (1.0 + r2n);
    term *= x;
    r2n *= p.r2();
    bound *= ax;
    ++out.positive_terms;
  }
  term = y;
  r2n = p.r2();
  bound = ay / (1.0 - ay);
  for (int n = 1; bound >= tol; ++n) {
    sum += term / (1.0 + r2n);
    term *= y;
    r2n *= p.r2();
    bound *= ay;
    ++out.negative_terms;
  }
  out.value = sum;
  return out;
}

MisraPair misra_pair(const AnnulusParams& p, double w) {
  if (!(w > p.r() && w < 1.0)) throw DomainError("Misra example needs r < w < 1");
  MisraPair out;
  out.a = (1.0 - w * w) * (w * w - p.r2());
  Matrix a(2, 2);
  a << w, out.a, 0.0, w;
  Matrix t(2, 2);
  t << w, std::sqrt(2.0) * out.a, 0.0, w;
  out.a_matrix = Operator(a);
  out.t = Operator(t);
  out.det_i_minus_tt = (Matrix::Identity(2, 2) - t.adjoint() * t).determinant().real();
  out.det_alpha = alpha_form(out.t, p).matrix().determinant().real();
  out.det_alpha_adjoint = alpha_form(out.t.adjoint(), p).matrix().determinant().real();
  return out;
}

}  // namespace annulus
