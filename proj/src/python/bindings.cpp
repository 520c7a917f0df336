#include "nilmoduli/errors.hpp"
#include "nilmoduli/json_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nilmoduli;

namespace {

LieAlgebra algebra_of(const std::string& s) {
    if (!s.empty() && (s.front() == '(' || s.find(',') != std::string::npos)) return parse_salamon(s);
    return working_algebra(builtin_from_string(s));
}

CanonicalForm form_of(const std::string& text) { return form_from_json(Json::parse(text)); }

std::string describe(const std::string& s) {
    const bool custom = s.find(',') != std::string::npos;
    const LieAlgebra L = custom ? parse_salamon(s) : builtin(builtin_from_string(s));
    Json out = {{"salamon", render_salamon(L)},
                {"nilpotency_step", nilpotency_step(L)},
                {"jacobi_residual", jacobi_residual(L)},
                {"derivation_dim", derivation_algebra(L).dim}};
    if (!custom) out["component_count"] = component_count(builtin_from_string(s));
    return out.dump();
}

std::string hermitian(const std::string& text) {
    const CanonicalForm f = form_of(text);
    Json out = {{"form", to_json(f)}};
    if (const auto* x = std::get_if<H5Form>(&f)) {
        const HermitianSolutions s = h5_hermitian_solutions(*x);
        out["J1"] = to_json(s.j1);
        out["J2"] = to_json(s.j2);
    } else if (const auto* x = std::get_if<H4Form>(&f)) {
        const HermitianSolutions s = h4_hermitian_solutions(*x);
        out["J1"] = to_json(s.j1);
        out["J2"] = to_json(s.j2);
    } else if (const auto* x = std::get_if<H6Form>(&f)) {
        out["solutions"] = Json::array();
        for (const auto& s : h6_hermitian_solutions(*x)) out["solutions"].push_back(to_json(s));
    } else if (const auto* x = std::get_if<H2Form>(&f)) {
        out["candidates"] = Json::array();
        for (const auto& c : h2_hermitian_candidates(*x)) out["candidates"].push_back(to_json(c));
    } else {
        throw Unsupported("h9 metrics have no closed form; use hermitian_search");
    }
    return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<NotSPD>(m, "NotSPD", base.ptr());
    py::register_exception<CanonicalizationFailed>(m, "CanonicalizationFailed", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    m.attr("SCHEMA") = kSchema;
    m.attr("SEARCH_NONE_THRESHOLD") = kSearchNoneThreshold;

    m.def("describe", &describe);
    m.def("jacobi_residual", [](const std::string& a) { return jacobi_residual(algebra_of(a)); });
    m.def("nilpotency_step", [](const std::string& a) { return nilpotency_step(algebra_of(a)); });
    m.def("derivation_dim", [](const std::string& a) { return derivation_algebra(algebra_of(a)).dim; });
    m.def("nijenhuis_residual", [](const std::string& a, const Mat6& J) { return nijenhuis_residual(algebra_of(a), J); });
    m.def("is_automorphism", [](const std::string& a, const Mat6& M, double tol) {
        return is_automorphism(algebra_of(a), M, tol);
    }, py::arg("algebra"), py::arg("matrix"), py::arg("tol") = 1e-9);
    m.def("random_automorphism", [](const std::string& a, std::uint64_t seed, std::optional<int> comp) {
        return random_automorphism(builtin_from_string(a), seed, comp).matrix;
    }, py::arg("algebra"), py::arg("seed"), py::arg("component") = py::none());
    m.def("pullback_metric", [](const Mat6& g, const Mat6& phi) { return pullback_metric(g, phi); });

    m.def("realize", [](const std::string& form) { return realize(form_of(form)); });
    m.def("canonicalize", [](const std::string& a, const Mat6& g) {
        return to_json(canonicalize(builtin_from_string(a), g)).dump();
    });
    m.def("isometry_group", [](const std::string& form) { return to_json(isometry_group(form_of(form))).dump(); });
    m.def("verify_isometry_group", [](const std::string& form, std::uint64_t seed, int starts) {
        const CanonicalForm f = form_of(form);
        return to_json(verify_isometry_group(f, isometry_group(f), {seed, starts})).dump();
    }, py::arg("form"), py::arg("seed") = 0, py::arg("starts") = 12);
    m.def("hermitian", &hermitian);
    m.def("hermitian_search", [](const std::string& a, const Mat6& g, double tol, int budget, std::uint64_t seed) {
        return to_json(hermitian_search(algebra_of(a), g, tol, budget, seed)).dump();
    }, py::arg("algebra"), py::arg("metric"), py::arg("tol") = 1e-8, py::arg("budget") = 64, py::arg("seed") = 0);
}
