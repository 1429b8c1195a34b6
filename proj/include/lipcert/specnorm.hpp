#pragma once

#include <cstdint>
#include <optional>

#include "lipcert/linops.hpp"
#include "lipcert/relu.hpp"

namespace lipcert {

struct PowerIterConfig {
    std::size_t iterations = 100;
    std::size_t polish_iterations = 20;
    std::uint64_t seed = 0x5EED;
    // Early stop once successive estimates agree to this relative tolerance;
    // disabled by default so runs use the full iteration count.
    std::optional<double> rel_tol;
};

// Largest singular value of R*A where R is the 0/1 diagonal given by `mask`,
// estimated by power iteration on A^T R A without forming the product. The
// estimate is the largest Rayleigh value seen across all iterates, so it never
// exceeds the true norm. An all-zero mask gives exactly 0.
double masked_spectral_norm(const LinearOperator& op, const ReluMask& mask,
                            const PowerIterConfig& config = {});

// Full operator norm: every mask bit set.
double spectral_norm(const LinearOperator& op, const PowerIterConfig& config = {});

// Exact largest singular value of R*A through a dense eigensolve of the Gram
// matrix on the smaller side. Materializes the operator; refuses above `cap`
// entries. Independent of the power-iteration path.
double dense_spectral_norm(const LinearOperator& op, const ReluMask& mask,
                           std::size_t cap = kDefaultMaterializeCap);
double dense_spectral_norm(const LinearOperator& op, std::size_t cap = kDefaultMaterializeCap);

}  // namespace lipcert
