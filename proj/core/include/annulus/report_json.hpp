#pragma once

// JSON encodings of the library's result types. Objects use sorted keys and
// shortest round-trip number formatting, so equal results give equal text.

#include "annulus/annulus_classes.hpp"
#include "annulus/matrix_io.hpp"
#include "annulus/vn_engine.hpp"

namespace annulus {

json vector_to_json(const Vector& v);
json laurent_to_json(const LaurentPolynomial& f);
LaurentPolynomial laurent_from_json(const json& doc);
json budget_to_json(const VnBudget& b);
json certificate_to_json(const VnCertificate& c);
json class_verdict_to_json(const ClassVerdict& v);
/// {"<class>": {"verdict", "margin", "witness"}, ..., "chain_consistent": bool}
json membership_to_json(const MembershipReport& rep);
json spectral_test_to_json(const SpectralTestResult& s);
json k_search_to_json(const KSearchResult& k);

}  // namespace annulus
