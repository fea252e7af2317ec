#include "annulus/annulus_classes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {

AnnulusParams::AnnulusParams(double r) : r_(r) {
  if (!(r > 0.0 && r < 1.0)) {
    std::ostringstream os;
    os << "annulus parameter r must lie in (0, 1), got " << r;
    throw DomainError(os.str());
  }
  c1_ = 1.0 + r * r;
  cq_ = r / c1_;
}

bool OperatorPair::commuting() const {
  const double s = std::max({1.0, op_norm(first), op_norm(second)});
  return commute_defect <= 1e-9 * s * s;
}

OperatorPair make_pair(Operator first, Operator second) {
  if (first.dim() != second.dim()) throw InputError("pair components differ in dimension");
  const double defect = op_norm(first.matrix() * second.matrix() - second.matrix() * first.matrix());
  return OperatorPair{std::move(first), std::move(second), defect};
}

HermitianForm alpha_form(const Operator& t, const AnnulusParams& p) {
  const Matrix& m = t.matrix();
  const Matrix tt = m.adjoint() * m;
  const Matrix m2 = m * m;
  const Eigen::Index n = t.dim();
  return HermitianForm(-(m2.adjoint() * m2) + p.c1() * tt - p.r2() * Matrix::Identity(n, n));
}

HermitianForm beta_form(const Operator& t, const AnnulusParams& p) {
  const Matrix& m = t.matrix();
  const Eigen::Index n = t.dim();
  const double r2 = p.r2();
  const double r4 = r2 * r2;
  Matrix pw = m;
  std::vector<Matrix> g{Matrix::Identity(n, n)};  // g[k] = T*^k T^k
  for (int k = 1; k <= 4; ++k) {
    g.push_back(pw.adjoint() * pw);
    pw = pw * m;
  }
  return HermitianForm(g[4] - 2.0 * p.c1() * g[3] + (1.0 + r4 + 4.0 * r2) * g[2] -
                       2.0 * r2 * p.c1() * g[1] + r4 * g[0]);
}

double alpha_scale(const Operator& t, const AnnulusParams& p) {
  const double n2 = std::pow(op_norm(t), 2);
  return n2 * n2 + p.c1() * n2 + p.r2();
}

double beta_scale(const Operator& t, const AnnulusParams& p) {
  const double n2 = std::pow(op_norm(t), 2);
  const double r2 = p.r2();
  return std::pow(n2, 4) + 2.0 * p.c1() * std::pow(n2, 3) + (1.0 + r2 * r2 + 4.0 * r2) * n2 * n2 +
         2.0 * r2 * p.c1() * n2 + r2 * r2;
}

OperatorPair kappa_pair(const Operator& t, const AnnulusParams& p) {
  const double s = std::sqrt(p.c1());
  const Operator inv = certified_inverse(t);
  return make_pair(cplx(1.0 / s) * t, cplx(p.r() / s) * inv);
}

namespace {

double pair_scale(const OperatorPair& pair) {
  return std::max(1.0, std::pow(op_norm(pair.first), 2) + std::pow(op_norm(pair.second), 2));
}

void require_commuting(const OperatorPair& pair) {
  if (!pair.commuting()) {
    std::ostringstream os;
    os << "pair does not commute (defect " << pair.commute_defect << ")";
    throw ContractViolation(os.str());
  }
}

double commutator_norm(const Matrix& m) { return op_norm(m.adjoint() * m - m * m.adjoint()); }

}  // namespace

HermitianForm delta_n(const OperatorPair& pair, int n) {
  require_commuting(pair);
  const Matrix& a = pair.first.matrix();
  const Matrix& b = pair.second.matrix();
  const Eigen::Index dim = a.rows();
  const Matrix id = Matrix::Identity(dim, dim);
  auto m_map = [&](const Matrix& x) -> Matrix {
    return a.adjoint() * x * a + b.adjoint() * x * b;
  };
  if (n == 1) return HermitianForm(id - m_map(id));
  if (n == 2) {
    const Matrix m1 = m_map(id);
    return HermitianForm(id + m_map(m1) - 2.0 * m1);
  }
  throw InputError("delta_n supports n = 1 and n = 2");
}

FormVerdict is_spherical(const OperatorPair& pair, SphericalKind kind, double tol) {
  const HermitianForm d = delta_n(pair, 1);
  const double scale = pair_scale(pair);
  FormVerdict out;
  if (kind == SphericalKind::Contraction) {
    const PsdVerdict v = is_psd(d, tol * scale);
    out.holds = v.psd;
    out.margin = v.min_eigenvalue;
    if (!v.psd) out.witness = v.witness;
    return out;
  }
  double residual = op_norm(d.matrix());
  bool holds = residual <= tol * scale;
  if (kind == SphericalKind::Unitary) {
    const double s1 = std::max(1.0, std::pow(op_norm(pair.first), 2));
    const double s2 = std::max(1.0, std::pow(op_norm(pair.second), 2));
    const double n1 = commutator_norm(pair.first.matrix());
    const double n2 = commutator_norm(pair.second.matrix());
    holds = holds && n1 <= tol * s1 && n2 <= tol * s2;
    residual = std::max({residual, n1, n2});
  }
  out.holds = holds;
  out.margin = -residual;
  return out;
}

FormVerdict is_Ar_unitary(const Operator& t, const AnnulusParams& p, double tol) {
  const Matrix& m = t.matrix();
  const Eigen::Index n = t.dim();
  const Matrix tt = m.adjoint() * m;
  const Matrix id = Matrix::Identity(n, n);
  const double normal_defect = commutator_norm(m);
  const double product = op_norm((id - tt) * (tt - p.r2() * id));
  const double s = std::max(1.0, std::pow(op_norm(t), 4));
  FormVerdict out;
  out.holds = normal_defect <= tol * s && product <= tol * s;
  out.margin = -std::max(normal_defect, product);
  return out;
}

IsometryVerdict is_Ar_isometry(const Operator& v, const AnnulusParams& p, double tol) {
  const Operator inv = certified_inverse(v);
  const Matrix& m = v.matrix();
  const Matrix& mi = inv.matrix();
  const Eigen::Index n = v.dim();
  const Matrix defect =
      m.adjoint() * m + p.r2() * (mi.adjoint() * mi) - p.c1() * Matrix::Identity(n, n);
  const double residual = op_norm(defect);
  const double scale =
      std::max(p.c1(), std::pow(op_norm(m), 2) + p.r2() * std::pow(op_norm(mi), 2));
  IsometryVerdict out;
  out.holds = residual <= tol * scale;
  out.margin = -residual;
  out.alpha_cross_check = op_norm(alpha_form(v, p).matrix()) / alpha_scale(v, p);
  return out;
}

// --- class verdicts --------------------------------------------------------

namespace {

ClassVerdict from_flag(bool in, double margin, std::string note) {
  ClassVerdict v;
  v.verdict = in ? Verdict::In : Verdict::Out;
  v.margin = margin;
  v.note = std::move(note);
  return v;
}

ClassVerdict singular_verdict() {
  return from_flag(false, 0.0, "operator is not invertible");
}

// Top right singular vector of m.
Vector top_right_singular(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
  return svd.matrixV().col(0);
}

ClassVerdict psd_verdict(const HermitianForm& h, double tol_scaled, const char* what) {
  const PsdVerdict v = is_psd(h, tol_scaled);
  ClassVerdict out = from_flag(v.psd, v.min_eigenvalue, what);
  if (!v.psd) out.witness_vector = v.witness;
  return out;
}

ClassVerdict norm_bounds_verdict(const Operator& t, double bound_t, double bound_inv,
                                 double coeff_inv, double tol) {
  if (!is_invertible(t)) return singular_verdict();
  const Operator inv = certified_inverse(t);
  const double nt = op_norm(t);
  const double ni = coeff_inv * op_norm(inv);
  const bool ok_t = nt <= bound_t * (1.0 + tol);
  const bool ok_i = ni <= bound_inv * (1.0 + tol);
  ClassVerdict v = from_flag(ok_t && ok_i, std::min(bound_t - nt, bound_inv - ni),
                             "norm bounds on T and its inverse");
  if (!ok_t) {
    v.witness_vector = top_right_singular(t.matrix());
  } else if (!ok_i) {
    v.witness_vector = top_right_singular(inv.matrix());
  }
  return v;
}

ClassVerdict from_spectral(const SpectralTestResult& s) {
  ClassVerdict v;
  v.verdict = s.verdict;
  v.margin = s.escaped_eigenvalue ? 0.0 : 1.0 - s.best_ratio;
  if (s.certificate && s.verdict != Verdict::In) v.witness_function = s.certificate;
  v.witness_eigenvalue = s.escaped_eigenvalue;
  v.note = s.reason;
  return v;
}

double pa_scale(const Operator& t, const Operator& inv, const AnnulusParams& p) {
  return p.r2() + 1.0 / p.r2() + std::pow(op_norm(t), 2) + std::pow(op_norm(inv), 2);
}

}  // namespace

ClassVerdict c_alpha_verdict(const Operator& t, const AnnulusParams& p, double tol) {
  if (!is_invertible(t)) return singular_verdict();
  return psd_verdict(alpha_form(t, p), tol * alpha_scale(t, p), "alpha form positivity");
}

ClassVerdict c_1r_verdict(const Operator& t, const AnnulusParams& p, double tol) {
  return norm_bounds_verdict(t, 1.0, 1.0, p.r(), tol);
}

QuantumBridgeReport quantum_bridge(const Operator& t, const AnnulusParams& p,
                                   const VnBudget& budget) {
  const double r = p.r();
  const AnnulusParams p2(p.r2());
  const Operator rt = cplx(r) * t;
  QuantumBridgeReport out;

  out.qa = norm_bounds_verdict(t, 1.0 / r, 1.0 / r, 1.0, kClassTol);
  out.qa_scaled = c_1r_verdict(rt, p2).verdict;

  if (!is_invertible(t)) {
    out.pa = singular_verdict();
  } else {
    const Operator inv = certified_inverse(t);
    const Matrix& m = t.matrix();
    const Matrix& mi = inv.matrix();
    const Eigen::Index n = t.dim();
    const HermitianForm form((r * r + 1.0 / (r * r)) * Matrix::Identity(n, n) -
                             m.adjoint() * m - mi.adjoint() * mi);
    out.pa = psd_verdict(form, kClassTol * pa_scale(t, inv, p), "quantum annulus form positivity");
  }
  out.pa_scaled = c_alpha_verdict(rt, p2).verdict;

  out.sa = from_spectral(ar_spectral_test(t, AnnulusDomain::quantum(p), budget));
  out.sa_scaled = ar_spectral_test(rt, AnnulusDomain::standard(p2), budget).verdict;
  return out;
}

const std::vector<ChainEdge>& chain_edges() {
  static const std::vector<ChainEdge> edges = {
      {cls::kAr, cls::kAlpha},          {cls::kAr, cls::kAlphaStar},
      {cls::kAlpha, cls::kOneR},        {cls::kAlphaStar, cls::kOneR},
      {cls::kOneR, cls::kOne},          {cls::kOne, cls::kBeta},
      {cls::kAlpha, cls::kSpherical},   {cls::kSpherical, cls::kAlpha},
      {cls::kDelta2, cls::kBetaPos},    {cls::kAr, cls::kSA},
      {cls::kSA, cls::kPA},             {cls::kPA, cls::kQA},
      {cls::kAlpha, cls::kPA},          {cls::kOneR, cls::kQA},
  };
  return edges;
}

std::vector<std::string> chain_violations(const std::map<std::string, ClassVerdict>& classes) {
  std::vector<std::string> out;
  for (const ChainEdge& e : chain_edges()) {
    const auto a = classes.find(e.smaller);
    const auto b = classes.find(e.larger);
    if (a == classes.end() || b == classes.end()) continue;
    if (a->second.verdict == Verdict::In && b->second.verdict == Verdict::Out) {
      out.push_back(std::string(e.smaller) + " -> " + e.larger);
    }
  }
  return out;
}

MembershipReport classify(const Operator& t, const AnnulusParams& p, const VnBudget& budget) {
  budget.validate();
  MembershipReport rep;
  rep.budget = budget;
  rep.r = p.r();
  auto& c = rep.classes;
  const bool inv = is_invertible(t);

  c[cls::kBeta] = from_flag(inv, min_singular_value(t.matrix()), "invertibility");
  if (inv) {
    const double nt = op_norm(t);
    c[cls::kOne] = from_flag(nt <= 1.0 + kClassTol, 1.0 - nt, "contraction");
    if (nt > 1.0 + kClassTol) c[cls::kOne].witness_vector = top_right_singular(t.matrix());
  } else {
    c[cls::kOne] = singular_verdict();
  }
  c[cls::kOneR] = c_1r_verdict(t, p);
  c[cls::kAlpha] = c_alpha_verdict(t, p);
  c[cls::kAlphaStar] = c_alpha_verdict(t.adjoint(), p);
  c[cls::kBetaPos] =
      psd_verdict(beta_form(t, p), kClassTol * beta_scale(t, p), "beta form positivity");

  if (inv) {
    const OperatorPair kp = kappa_pair(t, p);
    const FormVerdict sph = is_spherical(kp, SphericalKind::Contraction);
    c[cls::kSpherical] = from_flag(sph.holds, sph.margin, "spherical contraction of kappa(T)");
    c[cls::kSpherical].witness_vector = sph.witness;
    const double s = pair_scale(kp);
    c[cls::kDelta2] = psd_verdict(delta_n(kp, 2), kClassTol * (1.0 + s) * (1.0 + s),
                                  "second defect of kappa(T)");
  } else {
    c[cls::kSpherical] = singular_verdict();
    c[cls::kDelta2] = singular_verdict();
  }

  c[cls::kQA] = norm_bounds_verdict(t, 1.0 / p.r(), 1.0 / p.r(), 1.0, kClassTol);
  if (!inv) {
    c[cls::kPA] = singular_verdict();
  } else {
    const Operator ti = certified_inverse(t);
    const Matrix& m = t.matrix();
    const Matrix& mi = ti.matrix();
    const double r2 = p.r2();
    const HermitianForm form((r2 + 1.0 / r2) * Matrix::Identity(t.dim(), t.dim()) -
                             m.adjoint() * m - mi.adjoint() * mi);
    c[cls::kPA] = psd_verdict(form, kClassTol * pa_scale(t, ti, p), "quantum annulus form positivity");
  }

  // Budgeted searches run only when no cheaper necessary condition fails.
  if (c[cls::kPA].verdict == Verdict::Out) {
    ClassVerdict v = from_flag(false, c[cls::kPA].margin, "necessary condition PA_r fails");
    v.witness_vector = c[cls::kPA].witness_vector;
    c[cls::kSA] = v;
  } else {
    c[cls::kSA] = from_spectral(ar_spectral_test(t, AnnulusDomain::quantum(p), budget));
  }

  const char* failed = nullptr;
  for (const char* need : {cls::kAlpha, cls::kAlphaStar, cls::kSA}) {
    if (!failed && c[need].verdict == Verdict::Out) failed = need;
  }
  if (failed) {
    ClassVerdict v = from_flag(false, c[failed].margin,
                               std::string("necessary condition ") + failed + " fails");
    v.witness_vector = c[failed].witness_vector;
    v.witness_function = c[failed].witness_function;
    v.witness_eigenvalue = c[failed].witness_eigenvalue;
    c[cls::kAr] = v;
  } else {
    c[cls::kAr] = from_spectral(ar_spectral_test(t, AnnulusDomain::standard(p), budget));
  }

  rep.chain_violations = chain_violations(c);
  rep.chain_consistent = rep.chain_violations.empty();
  return rep;
}

}  // namespace annulus
