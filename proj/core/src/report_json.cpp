#include "annulus/report_json.hpp"

#include "annulus/errors.hpp"

namespace annulus {

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

json laurent_to_json(const LaurentPolynomial& f) {
  json c = json::array();
  for (cplx a : f.coeffs()) c.push_back(complex_to_json(a));
  return {{"min_deg", f.is_zero() ? 0 : f.min_deg()}, {"coeffs", c}};
}

LaurentPolynomial laurent_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("min_deg") || !doc.contains("coeffs")) {
    throw InputError("Laurent polynomial needs \"min_deg\" and \"coeffs\"");
  }
  std::vector<cplx> c;
  for (const auto& v : doc.at("coeffs")) c.push_back(complex_from_json(v));
  return LaurentPolynomial(doc.at("min_deg").get<int>(), std::move(c));
}

json budget_to_json(const VnBudget& b) {
  return {{"max_laurent_degree", b.max_laurent_degree},
          {"boundary_samples", b.boundary_samples},
          {"restarts", b.restarts},
          {"opt_iters", b.opt_iters},
          {"seed", b.seed}};
}

json certificate_to_json(const VnCertificate& c) {
  return {{"function", laurent_to_json(c.function)},
          {"ratio", c.ratio},
          {"operator_norm", c.operator_norm},
          {"sup_norm", c.sup_norm},
          {"argmax_point", complex_to_json(c.argmax_point)}};
}

json class_verdict_to_json(const ClassVerdict& v) {
  json w = nullptr;
  if (v.witness_function) {
    w = {{"kind", "function"}, {"certificate", certificate_to_json(*v.witness_function)}};
  } else if (v.witness_eigenvalue) {
    w = {{"kind", "eigenvalue"}, {"eigenvalue", complex_to_json(*v.witness_eigenvalue)}};
  } else if (v.witness_vector) {
    w = {{"kind", "vector"}, {"vector", vector_to_json(*v.witness_vector)}};
  }
  return {{"verdict", to_string(v.verdict)}, {"margin", v.margin}, {"witness", w},
          {"note", v.note}};
}

json membership_to_json(const MembershipReport& rep) {
  json out = json::object();
  for (const auto& [name, v] : rep.classes) out[name] = class_verdict_to_json(v);
  out["chain_consistent"] = rep.chain_consistent;
  out["chain_violations"] = rep.chain_violations;
  out["budget"] = budget_to_json(rep.budget);
  out["r"] = rep.r;
  return out;
}

json spectral_test_to_json(const SpectralTestResult& s) {
  json out = {{"verdict", to_string(s.verdict)},
              {"best_ratio", s.best_ratio},
              {"budget", budget_to_json(s.budget)},
              {"reason", s.reason}};
  out["certificate"] = s.certificate ? certificate_to_json(*s.certificate) : json(nullptr);
  out["escaped_eigenvalue"] =
      s.escaped_eigenvalue ? complex_to_json(*s.escaped_eigenvalue) : json(nullptr);
  return out;
}

json k_search_to_json(const KSearchResult& k) {
  return {{"k_lower", k.k_lower},
          {"certificate", certificate_to_json(k.certificate)},
          {"monomial_best", k.monomial_best},
          {"restart_best", k.restart_best},
          {"evaluations", k.evaluations}};
}

}  // namespace annulus
