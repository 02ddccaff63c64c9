#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mac {

struct IdentityCheck {
    std::string name;
    int dim = 0;
    int n = 0;
    double relative_error = 0.0;
    bool passed = false;
};

// Evaluates the exact discrete identities (summation by parts for both
// Laplacians, divergence/gradient and the upwind divergence; the upwind-average
// form of the flux; zero total upwind divergence; Delta_M = sum_i d_M d_E) on
// random fields for (d, n) in {(2,4), (2,8), (3,4)}.
std::vector<IdentityCheck> operator_identity_suite(std::uint64_t seed, double tolerance = 1e-12);

} // namespace mac
