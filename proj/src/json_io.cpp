#include "nilmoduli/json_io.hpp"

#include "nilmoduli/errors.hpp"

#include <charconv>
#include <cstdio>

namespace nilmoduli {

Json to_json(const Mat6& m) {
    Json rows = Json::array();
    for (int i = 0; i < 6; ++i) {
        Json row = Json::array();
        for (int j = 0; j < 6; ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Mat6 mat6_from_json(const Json& j) {
    Mat6 m;
    auto num = [](const Json& v) {
        if (!v.is_number()) throw InvalidParams("matrix entries must be numbers");
        return v.get<double>();
    };
    if (!j.is_array()) throw InvalidParams("matrix must be an array");
    if (j.size() == 36) {
        for (int k = 0; k < 36; ++k) m(k / 6, k % 6) = num(j[k]);
    } else if (j.size() == 6) {
        for (int i = 0; i < 6; ++i) {
            if (!j[i].is_array() || j[i].size() != 6) throw InvalidParams("matrix rows must have 6 entries");
            for (int c = 0; c < 6; ++c) m(i, c) = num(j[i][c]);
        }
    } else {
        throw InvalidParams("matrix must have 6 rows or 36 entries");
    }
    return m;
}

Json to_json(const CanonicalForm& f) {
    Json p = Json::object();
    for (const auto& [n, v] : form_params(f)) p[n] = v;
    return {{"algebra", to_string(form_algebra(f))}, {"params", p}};
}

CanonicalForm form_from_json(const Json& j, std::optional<Builtin> alg) {
    if (!j.is_object()) throw InvalidForm("form must be a JSON object");
    Json params = j;
    if (j.contains("params")) {
        params = j.at("params");
        if (j.contains("algebra")) {
            const Builtin b = builtin_from_string(j.at("algebra").get<std::string>());
            auto norm = [](Builtin x) { return x == Builtin::h9hat ? Builtin::h9 : x; };
            if (alg && norm(*alg) != norm(b))
                throw AlgebraMismatch("form is tagged " + to_string(b) + " but algebra " + to_string(*alg) +
                                      " was requested");
            alg = b;
        }
    }
    if (!alg) throw InvalidForm("form needs an algebra tag");
    if (!params.is_object()) throw InvalidForm("form parameters must be an object");
    std::vector<std::pair<std::string, double>> kv;
    for (const auto& [k, v] : params.items()) {
        if (!v.is_number()) throw InvalidForm("parameter " + k + " must be a number");
        kv.emplace_back(k, v.get<double>());
    }
    const CanonicalForm f = make_form(*alg == Builtin::h9hat ? Builtin::h9 : *alg, kv);
    validate(f);
    return f;
}

Json to_json(const Metric& m) { return {{"algebra", to_string(m.algebra)}, {"matrix", to_json(m.g)}}; }

Metric metric_from_json(const Json& j, std::optional<Builtin> alg) {
    Metric m;
    if (j.is_object()) {
        if (j.contains("algebra")) {
            const Builtin b = builtin_from_string(j.at("algebra").get<std::string>());
            if (alg && *alg != b) throw AlgebraMismatch("metric is tagged " + to_string(b));
            alg = b;
        }
        if (!j.contains("matrix")) throw InvalidParams("metric object needs a \"matrix\" field");
        m.g = mat6_from_json(j.at("matrix"));
    } else {
        m.g = mat6_from_json(j);
    }
    if (!alg) throw InvalidParams("metric needs an algebra");
    m.algebra = *alg;
    return m;
}

Json to_json(const Automorphism& a) {
    Json j = {{"algebra", to_string(a.algebra)}, {"matrix", to_json(a.matrix)}};
    j["component"] = a.component ? Json(*a.component) : Json(nullptr);
    return j;
}

Json to_json(const Witness& w) { return {{"automorphism", to_json(w.phi)}, {"residual", w.residual}}; }

Json to_json(const Canonicalization& c) {
    return {{"form", to_json(c.form)}, {"witness", to_json(c.witness)},
            {"canonical", is_canonical(c.form)}};
}

Json to_json(const GroupDescriptor& d) {
    Json gens = Json::array();
    for (const auto& g : d.generators) gens.push_back(to_json(g));
    Json iso = Json::array();
    for (const auto& x : d.isotropy_algebra) iso.push_back(to_json(x));
    return {{"name", d.name},
            {"continuous_dim", d.continuous_dim},
            {"finite_order", d.finite_order},
            {"generators", gens},
            {"isotropy_algebra", iso},
            {"case", d.case_label},
            {"notes", d.notes},
            {"source_claim",
             {{"name", d.reference_name},
              {"continuous_dim", d.reference_continuous_dim},
              {"finite_order", d.reference_finite_order},
              {"agrees", d.reference_continuous_dim == d.continuous_dim && d.reference_finite_order == d.finite_order}}}};
}

Json to_json(const VerifyReport& r) {
    return {{"generators_ok", r.generators_ok},
            {"generator_defect", r.generator_defect},
            {"closure_ok", r.closure_ok},
            {"generated_elements", r.generated_elements},
            {"components_generated", r.components_generated},
            {"dimension_ok", r.dimension_ok},
            {"computed_dim", r.computed_dim},
            {"coverage_ok", r.coverage_ok},
            {"coverage_found", r.coverage_found},
            {"coverage_uncovered", r.coverage_uncovered},
            {"components_observed", r.components_observed},
            {"pass", r.pass()}};
}

Json to_json(const Residuals& r) {
    return {{"nijenhuis", r.nijenhuis}, {"compatibility", r.compatibility}, {"involution", r.involution}};
}

namespace {
Json flat(const Mat6& m) {
    Json a = Json::array();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) a.push_back(m(i, j));
    return a;
}
}  // namespace

Json to_json(const Solution& s) {
    return {{"branch", to_string(s.triple.branch)}, {"a", s.triple.a},
            {"b", s.triple.b},                      {"c", s.triple.c},
            {"signs", s.triple.signs},              {"J", flat(s.J)},
            {"residuals", to_json(s.residuals)}};
}

Json to_json(const SolutionSet& s) {
    Json j = {{"branch", to_string(s.branch)}, {"includes_negation", s.includes_negation}};
    if (s.is_sphere()) {
        j["kind"] = "sphere";
        j["solutions"] = Json::array();
    } else {
        j["kind"] = "finite";
        Json arr = Json::array();
        for (const auto& x : s.finite()) arr.push_back(to_json(x));
        j["solutions"] = arr;
    }
    return j;
}

Json to_json(const H2Candidate& c) {
    return {{"branch", "J"},
            {"a", c.triple.a},
            {"b", c.triple.b},
            {"c", c.triple.c},
            {"J", flat(c.J)},
            {"verified", c.verified},
            {"abelian", c.abelian},
            {"equation_residual", c.equation_residual},
            {"residuals", to_json(c.residuals)}};
}

Json to_json(const H9Hermitian& h) {
    return {{"form", to_json(CanonicalForm(h.form))},
            {"metric", to_json(h.g)},
            {"automorphism", to_json(h.phi)},
            {"J", flat(h.J)},
            {"residuals", to_json(h.residuals)}};
}

Json to_json(const SearchResult& s) {
    Json j = {{"found", s.J.has_value()},
              {"best_residual", s.best_residual},
              {"best_start", s.best_start},
              {"starts", s.starts},
              {"none_threshold", kSearchNoneThreshold}};
    j["verdict"] = s.J ? "found" : "no solution found within budget";
    if (s.J) j["J"] = flat(*s.J);
    return j;
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

std::string digest(const Json& j) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nilmoduli
