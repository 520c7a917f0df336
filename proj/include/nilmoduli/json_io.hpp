#pragma once

#include "nilmoduli/hermitian.hpp"
#include "nilmoduli/moduli.hpp"

#include <json.hpp>

#include <string>

namespace nilmoduli {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "nilmoduli/1";

Json to_json(const Mat6& m);
/// 6 rows of 6 numbers, or 36 numbers row-major. Throws InvalidParams.
Mat6 mat6_from_json(const Json& j);

Json to_json(const CanonicalForm& f);
/// {"algebra": "h6", "params": {"a": 2, "b": 3}} or a bare parameter object when
/// `alg` is given. Throws InvalidForm / Unsupported.
CanonicalForm form_from_json(const Json& j, std::optional<Builtin> alg = std::nullopt);

Json to_json(const Metric& m);
/// {"algebra": "h5", "matrix": [[...]]}; a bare matrix needs `alg`.
Metric metric_from_json(const Json& j, std::optional<Builtin> alg = std::nullopt);

Json to_json(const Automorphism& a);
Json to_json(const Witness& w);
Json to_json(const Canonicalization& c);
Json to_json(const GroupDescriptor& d);
Json to_json(const VerifyReport& r);
Json to_json(const Residuals& r);
Json to_json(const Solution& s);
Json to_json(const SolutionSet& s);
Json to_json(const H2Candidate& c);
Json to_json(const H9Hermitian& h);
Json to_json(const SearchResult& s);

/// 17 significant digits, C locale.
std::string format_double(double v);
/// FNV-1a of the compact dump, 16 hex digits.
std::string digest(const Json& j);

}  // namespace nilmoduli
