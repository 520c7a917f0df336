#pragma once

#include "nilmoduli/json_io.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace nilmoduli::tools {

using Rng = std::mt19937_64;

/// One row of an isometry table: a case predicate and a sampler of forms satisfying it.
struct CaseSampler {
    std::string label;
    std::string predicate;
    std::function<CanonicalForm(Rng&)> sample;
};

std::vector<CaseSampler> isometry_cases();

/// Random valid form of the given algebra (canonical position unless stated).
CanonicalForm random_form(Builtin alg, Rng& rng);

/// Machine-readable isometry and Hermitian tables from fixed parameter grids.
Json build_tables();

struct SuiteOutcome {
    std::string name;
    int passed = 0;
    int total = 0;
    Json first_failure;  // null when everything passed
    bool ok() const { return passed == total; }
};

/// suite: all | algebra | moduli | hermitian. `mutate` flips one structure-constant sign
/// in the algebras used by the checks, which must make the run fail.
std::vector<SuiteOutcome> run_suites(const std::string& suite, std::uint64_t seed, bool mutate = false);

}  // namespace nilmoduli::tools
