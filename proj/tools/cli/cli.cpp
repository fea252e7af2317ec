#include "cli.hpp"
#include "detail.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "annulus/annulus_classes.hpp"
#include "annulus/dilation_lab.hpp"
#include "annulus/errors.hpp"
#include "annulus/matrix_io.hpp"
#include "annulus/report_json.hpp"
#include "annulus/variety_geom.hpp"
#include "annulus/vn_engine.hpp"

namespace annulus::cli {

namespace detail {

std::complex<double> parse_complex(const std::string& s, const char* flag) {
  std::istringstream is(s);
  double re = 0.0;
  double im = 0.0;
  char comma = 0;
  if (!(is >> re)) throw UsageError(std::string(flag) + " expects X,Y");
  if (is >> comma) {
    if (comma != ',' || !(is >> im)) throw UsageError(std::string(flag) + " expects X,Y");
  }
  std::string rest;
  if (is >> rest) throw UsageError(std::string(flag) + " expects X,Y");
  return {re, im};
}

}  // namespace detail

namespace {

using detail::parse_complex;
using detail::UsageError;

AnnulusParams params_of(const RunConfig& cfg) {
  if (!(cfg.r > 0.0 && cfg.r < 1.0)) {
    std::ostringstream os;
    os << "--r must lie in (0, 1), got " << cfg.r;
    throw UsageError(os.str());
  }
  return AnnulusParams(cfg.r);
}

VnBudget budget_of(const RunConfig& cfg) {
  VnBudget b;
  b.max_laurent_degree = cfg.degree;
  b.boundary_samples = cfg.samples;
  b.restarts = cfg.restarts;
  b.opt_iters = cfg.iters;
  b.seed = cfg.seed;
  b.threads = cfg.threads;
  try {
    b.validate();
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  return b;
}

void emit(const RunConfig& cfg, const json& report, const std::vector<json>& lines,
          const std::string& summary, std::ostream& out) {
  if (cfg.jsonl) {
    for (const auto& l : lines) out << l.dump() << '\n';
  } else {
    out << summary;
  }
  if (!cfg.out_path.empty()) {
    std::ofstream f(cfg.out_path);
    if (!f) throw InputError("cannot write " + cfg.out_path);
    f << report.dump(2) << '\n';
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

int run_classify(const RunConfig& cfg, std::ostream& out) {
  const AnnulusParams p = params_of(cfg);
  const VnBudget b = budget_of(cfg);
  const Operator t = read_operator_file(cfg.matrix_path);
  const MembershipReport rep = classify(t, p, b);
  json report = {{"command", "classify"},
                 {"inputs", {{"matrix", operator_to_json(t)}, {"r", cfg.r}}},
                 {"report", membership_to_json(rep)},
                 {"pass", rep.chain_consistent}};
  std::vector<json> lines;
  std::ostringstream sum;
  for (const auto& [name, v] : rep.classes) {
    lines.push_back({{"class", name}, {"result", class_verdict_to_json(v)}});
    sum << std::left << std::setw(30) << name << std::setw(10) << to_string(v.verdict)
        << "margin " << fmt(v.margin) << '\n';
  }
  lines.push_back({{"chain_consistent", rep.chain_consistent},
                   {"chain_violations", rep.chain_violations}});
  sum << "chain consistent: " << (rep.chain_consistent ? "yes" : "no") << '\n';
  for (const auto& v : rep.chain_violations) sum << "  violated: " << v << '\n';
  emit(cfg, report, lines, sum.str(), out);
  return rep.chain_consistent ? kExitOk : kExitCheckFailed;
}

int run_vn_search(const RunConfig& cfg, std::ostream& out) {
  const AnnulusParams p = params_of(cfg);
  const VnBudget b = budget_of(cfg);
  const Operator t = read_operator_file(cfg.matrix_path);
  if (!is_invertible(t)) throw InputError("vn-search needs an invertible matrix");
  const KSearchResult ks = max_k_search(t, p, b);
  // Re-verify the certificate independently of the search bookkeeping.
  const double recheck =
      vn_ratio(t, ks.certificate.function, AnnulusDomain::standard(p), 4 * b.boundary_samples);
  const bool ok = std::abs(recheck - ks.certificate.ratio) <= 1e-6 * std::max(1.0, recheck);
  Verdict v = Verdict::In;
  if (ks.k_lower > kViolationThreshold) {
    v = Verdict::Out;
  } else if (ks.k_lower > kNoiseFloor) {
    v = Verdict::Undecided;
  }
  json report = {{"command", "vn-search"},
                 {"inputs", {{"matrix", operator_to_json(t)}, {"r", cfg.r},
                             {"budget", budget_to_json(b)}}},
                 {"result", k_search_to_json(ks)},
                 {"certificate_recheck", recheck},
                 {"violation", to_string(v)},
                 {"pass", ok}};
  std::ostringstream sum;
  sum << "K_lower " << fmt(ks.k_lower) << " (monomials " << fmt(ks.monomial_best) << ")\n"
      << "certificate degree [" << ks.certificate.function.min_deg() << ", "
      << ks.certificate.function.max_deg() << "], ratio " << fmt(ks.certificate.ratio)
      << ", recheck " << fmt(recheck) << '\n'
      << "von Neumann inequality: " << (v == Verdict::Out ? "violated" : v == Verdict::In ? "no violation found" : "undecided") << '\n';
  emit(cfg, report, {report}, sum.str(), out);
  return ok ? kExitOk : kExitCheckFailed;
}

int run_reproduce(const RunConfig& cfg, std::ostream& out) {
  const std::vector<json> recs = reproduce(cfg);
  bool all = true;
  std::ostringstream sum;
  for (const auto& r : recs) {
    const bool ok = r.at("pass").get<bool>();
    all = all && ok;
    sum << (ok ? "PASS " : "FAIL ") << r.at("example").get<std::string>() << ' '
        << r.at("inputs").dump() << '\n';
    for (const auto& c : r.at("checks")) {
      if (!c.at("pass").get<bool>()) sum << "     failed check: " << c.at("name").get<std::string>() << '\n';
    }
  }
  sum << recs.size() << " record(s), " << (all ? "all passed" : "some failed") << '\n';
  json report = {{"command", "reproduce"}, {"records", recs}, {"pass", all}};
  emit(cfg, report, recs, sum.str(), out);
  return all ? kExitOk : kExitCheckFailed;
}

int run_dilate(const RunConfig& cfg, std::ostream& out) {
  const AnnulusParams p = params_of(cfg);
  const json doc = read_json_file(cfg.data_path);
  for (const char* key : {"T", "A", "B"}) {
    if (!doc.is_object() || !doc.contains(key)) {
      throw InputError(std::string("dilation data needs key \"") + key + "\"");
    }
  }
  const DilationData d{operator_from_json(doc.at("T")), matrix_from_json(doc.at("A")),
                       operator_from_json(doc.at("B"))};
  const ModelCheck mc = model_identity_check(d, p);
  const Block blk = build_block(d);
  const Eigen::Index h = d.t.dim();
  const double inv_res =
      op_norm(blk.v.matrix() * blk.v_inv.matrix() - Matrix::Identity(blk.v.dim(), blk.v.dim()));
  const double comp = compression_check(d.t.adjoint(), blk.v, h, -8, 8);
  const bool pass = mc.pass && comp <= 1e-9 && inv_res <= 1e-11 * std::max(1.0, op_norm(blk.v));
  json report = {{"command", "dilate-verify"},
                 {"inputs", {{"r", cfg.r}, {"dim_h", h}, {"dim_l", d.b.dim()}}},
                 {"alpha_residual", mc.alpha_residual},
                 {"intertwining_residual", mc.intertwining_residual},
                 {"residual_scale", mc.scale},
                 {"b_coisometry", mc.b_coisometry},
                 {"b_isometry_residual", mc.b_isometry_residual},
                 {"b_near_miss", mc.b_near_miss},
                 {"block_inverse_residual", inv_res},
                 {"compression_residual", comp},
                 {"model_pass", mc.pass},
                 {"pass", pass}};
  std::ostringstream sum;
  sum << "alpha residual " << fmt(mc.alpha_residual) << ", intertwining residual "
      << fmt(mc.intertwining_residual) << " (scale " << fmt(mc.scale) << ")\n"
      << "B coisometry: " << (mc.b_coisometry ? "yes" : mc.b_near_miss ? "near miss" : "no") << '\n'
      << "compression residual (|m| <= 8) " << fmt(comp) << '\n'
      << (pass ? "PASS" : "FAIL") << '\n';
  emit(cfg, report, {report}, sum.str(), out);
  return pass ? kExitOk : kExitCheckFailed;
}

int run_decompose(const RunConfig& cfg, std::ostream& out) {
  const AnnulusParams p = params_of(cfg);
  const Operator t = read_operator_file(cfg.matrix_path);
  const CanonicalSplit cs = canonical_split(t, p, cfg.tol);
  json report = {{"command", "decompose"},
                 {"inputs", {{"matrix", operator_to_json(t)}, {"r", cfg.r}, {"tol", cfg.tol}}},
                 {"unitary_rank", cs.unitary_rank},
                 {"unitary_projector", matrix_to_json(cs.unitary_projector)},
                 {"cnu_projector", matrix_to_json(cs.cnu_projector)},
                 {"reducing_residual", cs.reducing_residual},
                 {"verified", cs.verified},
                 {"pass", cs.verified}};
  std::ostringstream sum;
  sum << "A_r-unitary part: rank " << cs.unitary_rank << " of " << t.dim() << '\n'
      << "reducing residual " << fmt(cs.reducing_residual) << '\n'
      << (cs.verified ? "verified" : "NOT verified") << '\n';
  emit(cfg, report, {report}, sum.str(), out);
  return cs.verified ? kExitOk : kExitCheckFailed;
}

int run_variety_point(const RunConfig& cfg, std::ostream& out) {
  const AnnulusParams p = params_of(cfg);
  const cplx z = parse_complex(cfg.z, "--z");
  const VarietyKind kind = cfg.quantum ? VarietyKind::Quantum : VarietyKind::Principal;
  const VarietyPoint pt = kappa_point(z, p, kind);
  const PointClass c = classify_point(pt, cfg.tol);
  json report = {{"command", "variety classify-point"},
                 {"inputs", {{"z", complex_to_json(z)}, {"r", cfg.r}, {"quantum", cfg.quantum},
                             {"tol", cfg.tol}}},
                 {"z1", complex_to_json(pt.z1)},
                 {"z2", complex_to_json(pt.z2)},
                 {"ball_radius_sq", pt.ball_radius_sq()},
                 {"variety_residual", pt.residual()},
                 {"class", to_string(c)},
                 {"pass", true}};
  std::ostringstream sum;
  sum << "kappa" << (cfg.quantum ? "_0" : "") << "(z) = (" << pt.z1 << ", " << pt.z2 << ")\n"
      << "|z1|^2 + |z2|^2 = " << fmt(pt.ball_radius_sq()) << " -> " << to_string(c) << '\n';
  emit(cfg, report, {report}, sum.str(), out);
  return kExitOk;
}

}  // namespace

std::optional<RunConfig> parse(int argc, const char* const* argv, std::ostream& out,
                               std::ostream& err, int& exit_code) {
  RunConfig cfg;
  CLI::App app{"Operator theory on the annulus: class tests, von Neumann searches, worked examples"};
  app.require_subcommand(1);
  auto r_opt = [&](CLI::App* sub) {
    sub->add_option("--r", cfg.r, "annulus modulus in (0, 1)")->required();
  };
  auto budget = [&](CLI::App* sub) {
    sub->add_option("--degree", cfg.degree, "max Laurent degree")->capture_default_str();
    sub->add_option("--restarts", cfg.restarts, "optimizer restarts")->capture_default_str();
    sub->add_option("--samples", cfg.samples, "boundary samples per circle")->capture_default_str();
    sub->add_option("--iters", cfg.iters, "gradient iterations per restart")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads for restarts")->capture_default_str();
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_path, "write the JSON report here");
    sub->add_flag("--jsonl", cfg.jsonl, "JSON lines on stdout instead of the summary");
  };

  auto* c = app.add_subcommand("classify", "membership report for every class");
  c->add_option("--matrix", cfg.matrix_path, "matrix JSON")->required();
  r_opt(c);
  budget(c);
  common(c);

  auto* v = app.add_subcommand("vn-search", "lower bound on the K-spectral constant");
  v->add_option("--matrix", cfg.matrix_path, "matrix JSON")->required();
  r_opt(v);
  budget(v);
  common(v);

  auto* rp = app.add_subcommand("reproduce", "worked examples with closed forms");
  rp->add_option("example", cfg.example, "eg5 | eg6 | misra | mobius | kernel | all")
      ->check(CLI::IsMember({"eg5", "eg6", "misra", "mobius", "kernel", "all"}))
      ->capture_default_str();
  rp->add_option("--r", cfg.r, "annulus modulus");
  rp->add_option("--s", cfg.s, "eg5 / mobius parameter s");
  rp->add_option("--a", cfg.a, "eg6 weight parameter a");
  rp->add_option("--w", cfg.w, "Misra parameter w");
  rp->add_option("--lambda", cfg.lambda, "complex X,Y");
  rp->add_option("--mu", cfg.mu, "complex X,Y");
  rp->add_option("--filter", cfg.filter, "keep records whose example name contains this");
  budget(rp);
  common(rp);

  auto* d = app.add_subcommand("dilate-verify", "check block-model dilation data");
  d->add_option("--data", cfg.data_path, "JSON with keys T, A, B")->required();
  r_opt(d);
  common(d);

  auto* dc = app.add_subcommand("decompose", "split into A_r-unitary and c.n.u. parts");
  dc->add_option("--matrix", cfg.matrix_path, "matrix JSON")->required();
  r_opt(dc);
  dc->add_option("--tol", cfg.tol, "relative tolerance")->capture_default_str();
  common(dc);

  auto* var = app.add_subcommand("variety", "geometry of the principal variety");
  var->require_subcommand(1);
  auto* cp = var->add_subcommand("classify-point", "position of kappa(z) relative to the ball");
  cp->add_option("--z", cfg.z, "complex X,Y")->required();
  r_opt(cp);
  cp->add_flag("--quantum", cfg.quantum, "use kappa_0 and the quantum variety");
  cp->add_option("--tol", cfg.tol, "boundary tolerance")->capture_default_str();
  common(cp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    exit_code = app.exit(e, out, err);
    if (exit_code != 0) exit_code = kExitUsage;
    return std::nullopt;
  }
  if (c->parsed()) cfg.command = Command::Classify;
  if (v->parsed()) cfg.command = Command::VnSearch;
  if (rp->parsed()) {
    cfg.command = Command::Reproduce;
    cfg.r_given = rp->count("--r") > 0;
  }
  if (d->parsed()) cfg.command = Command::DilateVerify;
  if (dc->parsed()) cfg.command = Command::Decompose;
  if (cp->parsed()) cfg.command = Command::VarietyClassifyPoint;
  if (cfg.tol <= 0.0) {
    err << "error: --tol must be positive\n";
    exit_code = kExitUsage;
    return std::nullopt;
  }
  exit_code = kExitOk;
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::Classify:
        return run_classify(cfg, out);
      case Command::VnSearch:
        return run_vn_search(cfg, out);
      case Command::Reproduce:
        return run_reproduce(cfg, out);
      case Command::DilateVerify:
        return run_dilate(cfg, out);
      case Command::Decompose:
        return run_decompose(cfg, out);
      case Command::VarietyClassifyPoint:
        return run_variety_point(cfg, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  const auto cfg = parse(argc, argv, out, err, code);
  if (!cfg) return code;
  return run(*cfg, out, err);
}

}  // namespace annulus::cli
