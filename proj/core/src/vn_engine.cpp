#include "annulus/vn_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "annulus/annulus_classes.hpp"
#include "annulus/errors.hpp"

namespace annulus {

void VnBudget::validate() const {
  if (max_laurent_degree <= 0 || boundary_samples <= 0 || restarts <= 0 || opt_iters <= 0 ||
      threads == 0) {
    throw InputError("vn budget fields must all be positive");
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::In:
      return "IN";
    case Verdict::Out:
      return "OUT";
    case Verdict::Undecided:
      return "UNDECIDED";
  }
  return "UNDECIDED";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Discrete peaks within this fraction of the max are refined.
constexpr double kRefineFraction = 0.95;
constexpr int kGoldenIters = 48;

std::vector<double> circle_radii(const AnnulusDomain& dom) {
  if (!(dom.inner > 0.0) || !(dom.outer >= dom.inner) || !std::isfinite(dom.outer)) {
    throw DomainError("annulus domain needs 0 < inner <= outer < inf");
  }
  if (dom.inner == dom.outer) return {dom.inner};
  return {dom.inner, dom.outer};
}

cplx on_circle(double rho, double theta) { return std::polar(rho, theta); }

// Golden-section maximization of g on [a, b].
template <class G>
std::pair<double, double> golden_max(G&& g, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = g(x1);
  double f2 = g(x2);
  for (int it = 0; it < kGoldenIters; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = g(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// Max of absf over the boundary circles, with golden-section refinement of
// every discrete local max within kRefineFraction of the discrete max.
template <class AbsF>
SupNorm boundary_sup(AbsF&& absf, const AnnulusDomain& dom, int grid) {
  if (grid < 8) throw InputError("boundary grid needs at least 8 points per circle");
  const double h = kTwoPi / grid;
  SupNorm best;
  best.value = -1.0;
  std::vector<double> vals(static_cast<std::size_t>(grid));
  for (double rho : circle_radii(dom)) {
    double m = 0.0;
    for (int j = 0; j < grid; ++j) {
      vals[j] = absf(on_circle(rho, j * h));
      if (!std::isfinite(vals[j])) throw DomainError("function is not finite on the boundary");
      m = std::max(m, vals[j]);
    }
    for (int j = 0; j < grid; ++j) {
      const double prev = vals[(j + grid - 1) % grid];
      const double next = vals[(j + 1) % grid];
      if (vals[j] < prev || vals[j] < next || vals[j] < kRefineFraction * m) continue;
      auto g = [&](double th) { return absf(on_circle(rho, th)); };
      auto [th, v] = golden_max(g, (j - 1) * h, (j + 1) * h);
      if (vals[j] > v) {
        th = j * h;
        v = vals[j];
      }
      if (v > best.value) {
        best.value = v;
        best.argmax = on_circle(rho, th);
      }
    }
  }
  best.value = std::max(best.value, 0.0);
  return best;
}

void require_poles_outside(const RationalFunction& f, const AnnulusDomain& dom) {
  for (cplx pole : f.poles()) {
    const double m = std::abs(pole);
    if (m >= dom.inner - kPoleTol && m <= dom.outer + kPoleTol) {
      std::ostringstream os;
      os << "pole " << pole << " lies in the closed annulus";
      throw DomainError(os.str());
    }
  }
}

}  // namespace

SupNorm sup_norm_annulus(const LaurentPolynomial& f, const AnnulusDomain& dom, int grid) {
  return boundary_sup([&](cplx z) { return std::abs(f(z)); }, dom, grid);
}

SupNorm sup_norm_annulus(const RationalFunction& f, const AnnulusDomain& dom, int grid) {
  require_poles_outside(f, dom);
  return boundary_sup([&](cplx z) { return std::abs(f(z)); }, dom, grid);
}

SupNorm sup_norm_annulus(const TestFunction& f, const AnnulusDomain& dom, int grid) {
  return std::visit([&](const auto& g) { return sup_norm_annulus(g, dom, grid); }, f);
}

Operator apply_function(const Operator& t, const TestFunction& f) {
  if (const auto* l = std::get_if<LaurentPolynomial>(&f)) return apply_laurent(t, *l);
  return apply_rational(t, std::get<RationalFunction>(f));
}

double vn_ratio(const Operator& t, const TestFunction& f, const AnnulusDomain& dom, int grid) {
  const double sup = sup_norm_annulus(f, dom, grid).value;
  if (!(sup > 0.0)) throw DomainError("test function vanishes on the boundary");
  return op_norm(apply_function(t, f)) / sup;
}

// --- optimizer -------------------------------------------------------------

namespace {

// Convex-alternation chains run after the restarts; their count is fixed so
// K_lower stays monotone in the number of restarts.
constexpr int kDualChains = 1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Coefficients live in the basis phi_k = z^k / m_k, m_k = sup of |z^k| on
// the boundary, so that every basis element has sup norm exactly 1.
class SearchSpace {
 public:
  SearchSpace(const Operator& t, const AnnulusDomain& dom, int degree, int grid,
              int surrogate_grid)
      : D_(degree), n_(t.dim()), dom_(dom), grid_(grid) {
    const int K = 2 * D_ + 1;
    scale_.resize(K);
    for (int k = -D_; k <= D_; ++k) {
      scale_[k + D_] = std::max(std::pow(dom.inner, k), std::pow(dom.outer, k));
    }
    power_.assign(K, Matrix());
    power_[D_] = Matrix::Identity(n_, n_);
    const Matrix& tm = t.matrix();
    const Matrix tinv = certified_inverse(t).matrix();
    for (int k = 1; k <= D_; ++k) {
      power_[D_ + k] = power_[D_ + k - 1] * tm * (scale_[D_ + k - 1] / scale_[D_ + k]);
      power_[D_ - k] = power_[D_ - k + 1] * tinv * (scale_[D_ - k + 1] / scale_[D_ - k]);
    }
    full_ = sample_basis(grid);
    sur_ = sample_basis(surrogate_grid);
  }

  int degree() const { return D_; }
  int grid() const { return grid_; }
  double scale(int k) const { return scale_[k + D_]; }
  const Matrix& power(int k) const { return power_[k + D_]; }
  const AnnulusDomain& domain() const { return dom_; }

  // Columns of a sampled basis for coefficients -d..d.
  auto full_cols(int d) const { return full_.middleCols(D_ - d, 2 * d + 1); }
  auto sur_cols(int d) const { return sur_.middleCols(D_ - d, 2 * d + 1); }

  Matrix op_value(const Vector& c, int d) const {
    Matrix f = Matrix::Zero(n_, n_);
    for (int k = -d; k <= d; ++k) {
      const cplx ck = c(k + D_);
      if (ck != cplx(0.0)) f.noalias() += ck * power_[k + D_];
    }
    return f;
  }

  LaurentPolynomial to_laurent(const Vector& c, int d) const {
    std::vector<cplx> a(static_cast<std::size_t>(2 * d + 1));
    for (int k = -d; k <= d; ++k) a[k + d] = c(k + D_) / scale(k);
    return LaurentPolynomial(-d, std::move(a));
  }

 private:
  Matrix sample_basis(int grid) const {
    const auto radii = circle_radii(dom_);
    const int rows = grid * static_cast<int>(radii.size());
    Matrix b(rows, 2 * D_ + 1);
    int row = 0;
    for (double rho : radii) {
      for (int j = 0; j < grid; ++j, ++row) {
        const double th = kTwoPi * j / grid;
        for (int k = -D_; k <= D_; ++k) {
          b(row, k + D_) = std::polar(std::pow(rho, k) / scale(k), k * th);
        }
      }
    }
    return b;
  }

  int D_;
  Eigen::Index n_;
  AnnulusDomain dom_;
  int grid_;
  std::vector<double> scale_;
  std::vector<Matrix> power_;
  Matrix full_;
  Matrix sur_;
};

double sigma_max(const Matrix& f) {
  Eigen::JacobiSVD<Matrix> svd(f);
  return svd.singularValues()(0);
}

struct Candidate {
  Vector c;
  int degree = 0;
  double ratio = -1.0;
};

class Restart {
 public:
  // opt_iters is spread over this many degree stages.
  static constexpr int kStages = 8;

  Restart(const SearchSpace& s, const VnBudget& b, int index,
          const std::vector<cplx>& eigen_seeds)
      : s_(s), b_(b), index_(index), eig_(eigen_seeds) {}

  Candidate run() {
    const int D = s_.degree();
    Vector c = Vector::Zero(2 * D + 1);
    init(c);
    Candidate best;
    // Stage length does not depend on D, so a run at degree D extends the
    // run at D - 1 and the search is monotone in the degree.
    const int per_stage = std::max(6, b_.opt_iters / kStages);
    for (int d = 1; d <= D; ++d) {
      ascend(c, d, per_stage);
      polish(c, d);
      const double ratio = exact_ratio(c, d);
      if (ratio > best.ratio) best = {c, d, ratio};
    }
    return best;
  }

  long evaluations() const { return evals_; }

 private:
  void init(Vector& c) {
    std::mt19937_64 rng(splitmix64(b_.seed ^ splitmix64(0x5eed0000ULL + index_)));
    std::normal_distribution<double> nd(0.0, 1.0);
    const int D = s_.degree();
    for (int k = -1; k <= 1; ++k) c(D + k) = cplx(nd(rng), nd(rng));
    if (index_ < static_cast<int>(eig_.size())) {
      // (z - lambda) with a small random tilt.
      const cplx lam = eig_[index_];
      Vector seed = Vector::Zero(2 * D + 1);
      seed(D + 1) = s_.scale(1);
      seed(D) = -lam;
      c = seed / seed.norm() + 1e-3 * c;
    }
    c /= c.norm();
  }

  // Smoothed ratio: ||f(T)|| over the p-mean of |f| on the surrogate grid.
  struct Smooth {
    double value = 0.0;
    double sigma = 0.0;
    Vector u;
    Vector v;
  };

  Smooth smooth_value(const Vector& c, int d, int p, bool vectors, Vector* fv_out,
                      Vector* w_out, double* mean_out, double* m_out) {
    ++evals_;
    Smooth out;
    const Matrix f = s_.op_value(c, d);
    if (vectors) {
      Eigen::JacobiSVD<Matrix> svd(f, Eigen::ComputeThinU | Eigen::ComputeThinV);
      out.sigma = svd.singularValues()(0);
      out.u = svd.matrixU().col(0);
      out.v = svd.matrixV().col(0);
    } else {
      out.sigma = sigma_max(f);
    }
    const Vector fv = s_.sur_cols(d) * c.segment(s_.degree() - d, 2 * d + 1);
    const Eigen::Index n = fv.size();
    Eigen::VectorXd x(n);
    double m2 = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      x(j) = std::norm(fv(j));
      m2 = std::max(m2, x(j));
    }
    if (!(m2 > 0.0)) return out;
    double mean = 0.0;
    Eigen::VectorXd w(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double xj = x(j) / m2;
      double y = xj;
      for (int q = 2; q < p; q *= 2) y *= y;  // y = xj^(p/2)
      mean += y;
      w(j) = xj > 0.0 ? y / xj : 0.0;
    }
    mean /= static_cast<double>(n);
    const double m = std::sqrt(m2);
    out.value = out.sigma / (m * std::pow(mean, 1.0 / p));
    if (fv_out) *fv_out = fv;
    if (w_out) *w_out = w.cast<cplx>();
    if (mean_out) *mean_out = mean;
    if (m_out) *m_out = m;
    return out;
  }

  Vector gradient(const Vector& c, int d, int p, double* value) {
    Vector fv;
    Vector w;
    double mean = 0.0;
    double m = 0.0;
    Smooth s = smooth_value(c, d, p, true, &fv, &w, &mean, &m);
    *value = s.value;
    const int K = 2 * d + 1;
    Vector g = Vector::Zero(c.size());
    if (!(s.value > 0.0)) return g;
    const double smean = m * std::pow(mean, 1.0 / p);
    const Eigen::Index n = fv.size();
    const Vector h = s_.sur_cols(d).adjoint() * w.cwiseProduct(fv);
    const double g2_scale = std::pow(mean, (1.0 - p) / p) / (m * static_cast<double>(n));
    for (int i = 0; i < K; ++i) {
      const int k = i - d;
      const cplx beta = s.u.dot(s_.power(k) * s.v);  // u^* P_k v
      const cplx g1 = std::conj(beta);
      const cplx g2 = g2_scale * h(i);
      g(s_.degree() + k) = g1 / smean - s.sigma * g2 / (smean * smean);
    }
    return g;
  }

  void ascend(Vector& c, int d, int iters) {
    static constexpr int kPowers[] = {16, 64, 256};
    const int per_level = std::max(2, iters / 3);
    for (int p : kPowers) {
      double step = 0.1;
      for (int it = 0; it < per_level; ++it) {
        double j0 = 0.0;
        const Vector g = gradient(c, d, p, &j0);
        const double gn = g.norm();
        if (!(gn > 0.0) || !std::isfinite(gn)) break;
        bool moved = false;
        for (int tries = 0; tries < 6; ++tries) {
          Vector trial = c + (step / gn) * g;
          trial /= trial.norm();
          const double j1 = smooth_value(trial, d, p, false, nullptr, nullptr, nullptr, nullptr).value;
          if (j1 > j0) {
            c = trial;
            step = std::min(1.0, step * 1.3);
            moved = true;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
      }
    }
  }

  // ||f(T)|| over the discrete max of |f| on the full grid.
  double discrete_ratio(const Vector& c, int d) {
    ++evals_;
    const double sigma = sigma_max(s_.op_value(c, d));
    const Vector fv = s_.full_cols(d) * c.segment(s_.degree() - d, 2 * d + 1);
    const double m = fv.cwiseAbs().maxCoeff();
    return m > 0.0 ? sigma / m : 0.0;
  }

  // One derivative-free coordinate sweep on the unsmoothed objective.
  void polish(Vector& c, int d) {
    static const cplx kDirs[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    const double h = 0.01;
    double cur = discrete_ratio(c, d);
    for (int k = -d; k <= d; ++k) {
      for (cplx dir : kDirs) {
        Vector trial = c;
        trial(s_.degree() + k) += h * dir;
        trial /= trial.norm();
        const double v = discrete_ratio(trial, d);
        if (v > cur) {
          cur = v;
          c = trial;
        }
      }
    }
  }

  double exact_ratio(const Vector& c, int d) {
    ++evals_;
    const double sigma = sigma_max(s_.op_value(c, d));
    const double sup = sup_norm_annulus(s_.to_laurent(c, d), s_.domain(), s_.grid()).value;
    return sup > 0.0 ? sigma / sup : 0.0;
  }

  const SearchSpace& s_;
  const VnBudget& b_;
  int index_;
  const std::vector<cplx>& eig_;
  long evals_ = 0;
};

// Alternating convex ascent. For fixed unit vectors (u, v) the best f is
//   max Re u^* f(T) v  subject to |f| <= 1 on the sampled boundary,
// a small second-order cone program solved by a log-barrier Newton method.
// The top singular pair of the new f(T) then replaces (u, v). This reaches
// violations that need f close to unimodular near both circles, where the
// smoothed ascent above stalls on near-constant functions.
class DualChain {
 public:
  static constexpr int kAlternations = 3;

  DualChain(const SearchSpace& s, const VnBudget& b, int index, Eigen::Index n)
      : s_(s), b_(b), index_(index), n_(n) {}

  // Degree continuation 1..D; the stage at degree d depends only on the stages
  // before it, so a run at D - 1 is a prefix of the run at D.
  Candidate run() {
    std::mt19937_64 rng(splitmix64(b_.seed ^ splitmix64(0xd0a1c0000ULL + index_)));
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector u(n_), v(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      u(i) = cplx(nd(rng), nd(rng));
      v(i) = cplx(nd(rng), nd(rng));
    }
    u.normalize();
    v.normalize();
    const int D = s_.degree();
    Candidate best;
    for (int d = 1; d <= D; ++d) {
      for (int a = 0; a < kAlternations; ++a) {
        Vector g(2 * d + 1);
        for (int k = -d; k <= d; ++k) g(k + d) = u.dot(s_.power(k) * v);
        if (!(g.norm() > 0.0)) break;
        Vector c = Vector::Zero(2 * D + 1);
        c.segment(D - d, 2 * d + 1) = solve(g, d);
        const Matrix f = s_.op_value(c, d);
        Eigen::JacobiSVD<Matrix> svd(f, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU().col(0);
        v = svd.matrixV().col(0);
        ++evals_;
        const double sup = sup_norm_annulus(s_.to_laurent(c, d), s_.domain(), s_.grid()).value;
        const double ratio = sup > 0.0 ? svd.singularValues()(0) / sup : 0.0;
        if (ratio > best.ratio) best = {c, d, ratio};
      }
    }
    return best;
  }

  long evaluations() const { return evals_; }

 private:
  // Maximizes Re(g . c) over coefficients -d..d with |f| <= 1 on the surrogate
  // grid plus the fine-grid points that the previous solve pushed above 1.
  Vector solve(const Vector& g, int d) {
    const Matrix fine = s_.full_cols(d);
    Matrix rows = s_.sur_cols(d);
    Vector c = Vector::Zero(2 * d + 1);
    for (int round = 0; round < 4; ++round) {
      c = barrier(g, rows, c);
      const Eigen::VectorXd mod = (fine * c).cwiseAbs();
      std::vector<Eigen::Index> add;
      for (Eigen::Index j = 0; j < mod.size(); ++j) {
        if (mod(j) > 1.0 + 1e-6) add.push_back(j);
      }
      if (add.empty()) break;
      Matrix grown(rows.rows() + static_cast<Eigen::Index>(add.size()), rows.cols());
      grown.topRows(rows.rows()) = rows;
      for (std::size_t i = 0; i < add.size(); ++i) grown.row(rows.rows() + i) = fine.row(add[i]);
      rows = std::move(grown);
      // Pull the start back inside the enlarged feasible set.
      const double m = (rows * c).cwiseAbs().maxCoeff();
      if (m > 0.0) c *= 0.5 / m;
    }
    return c;
  }

  // Log-barrier method in the real coordinates x = (Re c, Im c); start is
  // strictly feasible.
  Vector barrier(const Vector& g, const Matrix& b, const Vector& start) {
    const Eigen::Index K = b.cols();
    const Eigen::Index m = b.rows();
    Eigen::MatrixXd a(2 * m, 2 * K);
    a << b.real(), -b.imag(), b.imag(), b.real();
    Eigen::VectorXd h(2 * K);
    h << g.real(), -g.imag();
    Eigen::VectorXd x(2 * K);
    x << start.real(), start.imag();

    const auto slack = [&](const Eigen::VectorXd& y) {
      return Eigen::VectorXd(1.0 - y.head(m).array().square() - y.tail(m).array().square());
    };
    const auto value = [&](const Eigen::VectorXd& xv, double t, bool& ok) {
      const Eigen::VectorXd sv = slack(a * xv);
      ok = (sv.array() > 0.0).all();
      return ok ? -t * h.dot(xv) - sv.array().log().sum() : 0.0;
    };

    // The duality gap m / t starts at the objective scale |h| and ends 1e-6 below it.
    const double hn = h.norm();
    const double t0 = static_cast<double>(m) / hn;
    // Intermediate centerings are loose; only the last one is solved tightly.
    const double t_end = 1e6 * t0;
    for (double t = t0; t <= t_end; t *= 16.0) {
      const double dec_stop = t * 16.0 > t_end ? 1e-6 : 1e-2;
      for (int it = 0; it < 30; ++it) {
        ++evals_;
        const Eigen::VectorXd y = a * x;
        const Eigen::VectorXd sv = slack(y);
        // -log(1 - |y_j|^2): gradient 2 y / s, Hessian 2 I / s + 4 y y^T / s^2 per sample.
        Eigen::VectorXd w(2 * m);
        w << 2.0 / sv.array(), 2.0 / sv.array();
        // Hessian = M^T M with M = [sqrt(w) A; Q], Q_j = (2 / s_j)(y_j^re A_j^re + y_j^im A_j^im).
        Eigen::MatrixXd mm(3 * m, 2 * K);
        mm.topRows(2 * m) = w.cwiseSqrt().asDiagonal() * a;
        mm.bottomRows(m) = (2.0 / sv.array()).matrix().asDiagonal() *
                           (y.head(m).asDiagonal() * a.topRows(m) + y.tail(m).asDiagonal() * a.bottomRows(m));
        const Eigen::VectorXd grad = -t * h + a.transpose() * w.cwiseProduct(y);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(2 * K, 2 * K);
        hess.selfadjointView<Eigen::Lower>().rankUpdate(mm.transpose());
        const Eigen::VectorXd step = -hess.selfadjointView<Eigen::Lower>().ldlt().solve(grad);
        const double dec = -grad.dot(step);
        if (!(dec > 1e-10)) break;
        bool ok = false;
        const double f0 = value(x, t, ok);
        double alpha = 1.0;
        for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
          const double f1 = value(x + alpha * step, t, ok);
          if (ok && f1 <= f0 - 0.25 * alpha * dec) break;
        }
        if (!ok) break;
        x += alpha * step;
        if (dec < dec_stop) break;
      }
    }
    Vector c(K);
    for (Eigen::Index k = 0; k < K; ++k) c(k) = cplx(x(k), x(K + k));
    return c;
  }

  const SearchSpace& s_;
  const VnBudget& b_;
  int index_;
  Eigen::Index n_;
  long evals_ = 0;
};

std::vector<cplx> distinct_eigenvalues(const Operator& t) {
  std::vector<cplx> out;
  for (cplx l : spectrum(t)) {
    bool seen = false;
    for (cplx o : out) seen = seen || std::abs(o - l) < 1e-6;
    if (!seen) out.push_back(l);
  }
  return out;
}

VnCertificate certify(const Operator& t, const LaurentPolynomial& f, const AnnulusDomain& dom,
                      int grid) {
  VnCertificate cert;
  cert.function = f;
  const SupNorm sup = sup_norm_annulus(f, dom, 4 * grid);
  cert.sup_norm = sup.value;
  cert.argmax_point = sup.argmax;
  cert.operator_norm = op_norm(apply_laurent(t, f));
  cert.ratio = sup.value > 0.0 ? cert.operator_norm / sup.value : 0.0;
  return cert;
}

}  // namespace

KSearchResult max_k_search(const Operator& t, const AnnulusDomain& dom, const VnBudget& budget) {
  budget.validate();
  if (!is_invertible(t)) throw InvertibilityError("max_k_search needs an invertible operator");
  const int D = budget.max_laurent_degree;
  const int grid = budget.boundary_samples;
  const SearchSpace space(t, dom, D, grid, std::max(64, grid / 4));

  KSearchResult res;
  // Monomials have sup exactly 1 in the normalized basis.
  int best_k = 0;
  double best_mono = -1.0;
  for (int k = -D; k <= D; ++k) {
    const double v = op_norm(space.power(k));
    if (v > best_mono) {
      best_mono = v;
      best_k = k;
    }
  }

  const std::vector<cplx> eig = distinct_eigenvalues(t);
  std::vector<Candidate> found(static_cast<std::size_t>(budget.restarts));
  std::vector<long> evals(found.size(), 0);
  auto work = [&](int first, int stride) {
    for (int i = first; i < budget.restarts; i += stride) {
      Restart run(space, budget, i, eig);
      found[i] = run.run();
      evals[i] = run.evaluations();
    }
  };
  const unsigned nthreads = std::min<unsigned>(budget.threads, budget.restarts);
  if (nthreads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < nthreads; ++k) pool.emplace_back(work, k, nthreads);
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i < kDualChains; ++i) {
    DualChain chain(space, budget, i, t.dim());
    found.push_back(chain.run());
    evals.push_back(chain.evaluations());
  }

  // Every candidate is certified and the max is taken by (certified ratio,
  // index) with the monomial first, so more degree or restarts never lowers it.
  res.certificate = certify(t, LaurentPolynomial::monomial(best_k), dom, grid);
  res.monomial_best = res.certificate.ratio;
  res.restart_best.reserve(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (i < static_cast<std::size_t>(budget.restarts)) res.restart_best.push_back(found[i].ratio);
    res.evaluations += evals[i];
    if (found[i].ratio < 0.0) continue;
    VnCertificate c = certify(t, space.to_laurent(found[i].c, found[i].degree), dom, grid);
    if (c.ratio > res.certificate.ratio) res.certificate = std::move(c);
  }
  res.k_lower = res.certificate.ratio;
  return res;
}

SpectralTestResult ar_spectral_test(const Operator& t, const AnnulusDomain& dom,
                                    const VnBudget& budget) {
  budget.validate();
  SpectralTestResult out;
  out.budget = budget;
  for (cplx l : spectrum(t)) {
    if (!dom.contains(l, kSpectralInclusionTol)) {
      out.verdict = Verdict::Out;
      out.escaped_eigenvalue = l;
      std::ostringstream os;
      os << "eigenvalue " << l << " with modulus " << std::abs(l) << " escapes the annulus";
      out.reason = os.str();
      return out;
    }
  }
  // Spectrum inside a domain with inner > 0 implies invertibility.
  if (!is_invertible(t)) {
    out.verdict = Verdict::Out;
    out.escaped_eigenvalue = cplx(0.0);
    out.reason = "operator is numerically singular";
    return out;
  }
  KSearchResult ks = max_k_search(t, dom, budget);
  out.best_ratio = ks.k_lower;
  out.certificate = ks.certificate;
  if (ks.k_lower > kViolationThreshold) {
    out.verdict = Verdict::Out;
    out.reason = "von Neumann inequality violated by the certificate";
  } else if (ks.k_lower > kNoiseFloor) {
    out.verdict = Verdict::Undecided;
    out.reason = "best ratio inside the noise band at budget exhaustion";
  } else {
    out.verdict = Verdict::In;
    out.certificate.reset();
    out.reason = "no violation found within budget";
  }
  return out;
}

// --- variety side ----------------------------------------------------------

BivariatePolynomial::BivariatePolynomial(std::map<std::pair<int, int>, cplx> coeffs) {
  for (auto& [ij, c] : coeffs) {
    if (ij.first < 0 || ij.second < 0) throw InputError("bivariate exponents must be >= 0");
    if (c != cplx(0.0)) c_.emplace(ij, c);
  }
}

int BivariatePolynomial::total_degree() const {
  int d = 0;
  for (const auto& [ij, c] : c_) d = std::max(d, ij.first + ij.second);
  return d;
}

cplx BivariatePolynomial::operator()(cplx z1, cplx z2) const {
  cplx s = 0.0;
  for (const auto& [ij, c] : c_) s += c * std::pow(z1, ij.first) * std::pow(z2, ij.second);
  return s;
}

Matrix BivariatePolynomial::apply(const Matrix& t1, const Matrix& t2) const {
  const Eigen::Index n = t1.rows();
  int d1 = 0;
  int d2 = 0;
  for (const auto& [ij, c] : c_) {
    d1 = std::max(d1, ij.first);
    d2 = std::max(d2, ij.second);
  }
  std::vector<Matrix> p1{Matrix::Identity(n, n)};
  std::vector<Matrix> p2{Matrix::Identity(n, n)};
  for (int i = 1; i <= d1; ++i) p1.push_back(p1.back() * t1);
  for (int j = 1; j <= d2; ++j) p2.push_back(p2.back() * t2);
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [ij, c] : c_) out.noalias() += c * (p1[ij.first] * p2[ij.second]);
  return out;
}

LaurentPolynomial restrict_to_kappa(const BivariatePolynomial& g, const AnnulusParams& p) {
  const double s = std::sqrt(p.c1());
  std::map<int, cplx> acc;
  for (const auto& [ij, c] : g.coeffs()) {
    const auto [i, j] = ij;
    acc[i - j] += c * std::pow(p.r(), j) / std::pow(s, i + j);
  }
  if (acc.empty()) return {};
  const int lo = acc.begin()->first;
  const int hi = acc.rbegin()->first;
  std::vector<cplx> a(static_cast<std::size_t>(hi - lo + 1), cplx(0.0));
  for (const auto& [k, c] : acc) a[k - lo] = c;
  return LaurentPolynomial(lo, std::move(a));
}

BivariatePolynomial lift_to_variety(const LaurentPolynomial& f, const AnnulusParams& p) {
  const double s = std::sqrt(p.c1());
  std::map<std::pair<int, int>, cplx> c;
  for (int k = f.min_deg(); k <= f.max_deg() && !f.is_zero(); ++k) {
    const cplx a = f.coeff(k);
    if (a == cplx(0.0)) continue;
    if (k >= 0) {
      c[{k, 0}] += a * std::pow(s, k);
    } else {
      c[{0, -k}] += a * std::pow(s / p.r(), -k);
    }
  }
  return BivariatePolynomial(std::move(c));
}

namespace {

Verdict verdict_from_ratio(double ratio) {
  if (ratio > kViolationThreshold) return Verdict::Out;
  if (ratio > kNoiseFloor) return Verdict::Undecided;
  return Verdict::In;
}

// sup of |g| over kappa(boundary), evaluated at the image points.
double variety_sup(const BivariatePolynomial& g, const AnnulusParams& p, int grid) {
  const double s = std::sqrt(p.c1());
  const double r = p.r();
  auto absg = [&](cplx z) { return std::abs(g(z / s, r / (s * z))); };
  return boundary_sup(absg, AnnulusDomain::standard(p), grid).value;
}

}  // namespace

VarietyTestResult variety_poly_test(const Operator& t, const AnnulusParams& p,
                                    const VnBudget& budget) {
  budget.validate();
  const OperatorPair kp = kappa_pair(t, p);
  const AnnulusDomain dom = AnnulusDomain::standard(p);
  const int D = budget.max_laurent_degree;
  const int grid = budget.boundary_samples;

  std::vector<BivariatePolynomial> family;
  const KSearchResult ks = max_k_search(t, dom, budget);
  family.push_back(lift_to_variety(ks.certificate.function, p));
  for (int i = 0; i <= D; ++i) {
    for (int j = 0; i + j <= D; ++j) family.push_back(BivariatePolynomial({{{i, j}, 1.0}}));
  }
  std::mt19937_64 rng(splitmix64(budget.seed ^ 0xa11e7ULL));
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int n = 0; n < budget.restarts; ++n) {
    const int deg = 1 + n % D;
    std::map<std::pair<int, int>, cplx> c;
    for (int i = 0; i <= deg; ++i) {
      for (int j = 0; i + j <= deg; ++j) c[{i, j}] = cplx(nd(rng), nd(rng));
    }
    family.emplace_back(std::move(c));
  }

  VarietyTestResult out;
  for (const auto& g : family) {
    const LaurentPolynomial f = restrict_to_kappa(g, p);
    if (f.is_zero()) continue;
    const double vsup = variety_sup(g, p, grid);
    if (!(vsup > 0.0)) continue;
    const double rv = op_norm(g.apply(kp.first.matrix(), kp.second.matrix())) / vsup;
    const double ra = vn_ratio(t, f, dom, grid);
    out.variety_max_ratio = std::max(out.variety_max_ratio, rv);
    out.annulus_max_ratio = std::max(out.annulus_max_ratio, ra);
    out.max_discrepancy = std::max(out.max_discrepancy, std::abs(rv - ra));
    ++out.functions_tested;
  }

  bool escapes = false;
  for (cplx l : spectrum(t)) escapes = escapes || !dom.contains(l, kSpectralInclusionTol);
  // Joint spectrum of kappa(T) is kappa(sigma(T)); it leaves the closed
  // ball exactly when sigma(T) leaves the closed annulus.
  bool leaves_ball = false;
  const double s = std::sqrt(p.c1());
  for (cplx l : spectrum(t)) {
    const double b = std::norm(l / s) + std::norm(p.r() / (s * l));
    leaves_ball = leaves_ball || b > 1.0 + 2.0 * kSpectralInclusionTol;
  }
  out.annulus_verdict = escapes ? Verdict::Out : verdict_from_ratio(out.annulus_max_ratio);
  out.variety_verdict = leaves_ball ? Verdict::Out : verdict_from_ratio(out.variety_max_ratio);
  out.consistent = std::abs(out.annulus_max_ratio - out.variety_max_ratio) <= 1e-6 &&
                   out.annulus_verdict == out.variety_verdict;
  return out;
}

bool vn_set_punctured_disk(const Operator& t) {
  return is_invertible(t) && op_norm(t) <= 1.0 + 1e-9;
}

double kappa_vn_transfer_check(const Operator& t, const AnnulusParams& p,
                               std::span<const TestFunction> sample_fns, int grid) {
  const OperatorPair kp = kappa_pair(t, p);
  const AnnulusDomain dom = AnnulusDomain::standard(p);
  const double s = std::sqrt(p.c1());
  // F(z1, z2) = f(s z1), so F(kappa(T)) = f(s T1) and F o kappa = f.
  const Operator st1 = cplx(s) * kp.first;
  double worst = 0.0;
  for (const auto& f : sample_fns) {
    const double lhs = vn_ratio(t, f, dom, grid);
    const double num = op_norm(apply_function(st1, f));
    auto absF = [&](cplx z) {
      const cplx z1 = z / s;
      return std::visit([&](const auto& g) { return std::abs(g(s * z1)); }, f);
    };
    if (const auto* rf = std::get_if<RationalFunction>(&f)) require_poles_outside(*rf, dom);
    const double den = boundary_sup(absF, dom, grid).value;
    worst = std::max(worst, std::abs(lhs - num / den));
  }
  return worst;
}

}  // namespace annulus
