#pragma once

#include <cstdint>
#include <string>

#include "lipcert/domains.hpp"
#include "lipcert/relu.hpp"
#include "lipcert/specnorm.hpp"

namespace lipcert {

struct BoundConfig {
    PowerIterConfig power;
    // Relative cushion multiplied into every spectral-norm term; compensates
    // for power iteration approaching the true norm from below.
    double spectral_slack = 1e-4;
    std::size_t row_batch = 128;
};

enum class BoundMethod { naive, rbar, nested, lower };

std::string method_name(BoundMethod method);
BoundMethod method_from_name(const std::string& name);

// One layer's local-Lipschitz estimates over a fixed domain. The upper bounds
// tighten left to right and the sampled value sits below all of them:
// naive >= rbar >= nested >= lower (up to 1e-6 relative).
struct BoundReport {
    double epsilon = 0.0;
    double naive = 0.0;
    double rbar = 0.0;
    double nested = 0.0;
    double lower = 0.0;
    std::size_t segments = 0;
    double spectral_slack = 0.0;
};

// ||A||, valid for any domain.
double naive_bound(const LinearOperator& op, const BoundConfig& cfg = {});

// ||Rbar A|| where Rbar keeps the coordinates whose bounding-vertex entry is
// strictly positive.
double rbar_bound(const LinearOperator& op, const VectorF& bias, const PerturbationDomain& dom,
                  const BoundConfig& cfg = {});

struct NestedResult {
    double value = 0.0;
    BreakpointSchedule schedule;
};

// Sum over breakpoint segments of delta_i * ||R_i A||; the schedule is
// returned for diagnostics.
NestedResult nested_bound(const LinearOperator& op, const VectorF& bias,
                          const PerturbationDomain& dom, const BoundConfig& cfg = {});

enum class RmaxMode { auto_select, exhaustive, sampled };

struct RmaxResult {
    double value = 0.0;
    bool exhaustive = false;  // true: over-approximation; false: under-approximation
    std::size_t masks_considered = 0;
};

// Diagnostic mask-enumeration bound. Exhaustive mode maximizes the dense norm
// over all 2^m masks (never below the reachable-mask maximum); sampled mode
// maximizes over the masks hit by random domain points (never above it).
RmaxResult rmax_bound_enumerated(const DenseOperator& op, const VectorF& bias,
                                 const PerturbationDomain& dom, std::size_t samples = 1000,
                                 std::size_t exhaustive_dim_cap = 12,
                                 RmaxMode mode = RmaxMode::auto_select, std::uint64_t seed = 0);

// Max of ||relu(Ax+b) - relu(b)|| / ||x|| over random points on the domain's
// epsilon-sphere. Deterministic for a fixed seed.
double lower_bound_sampled(const LinearOperator& op, const VectorF& bias,
                           const PerturbationDomain& dom, std::size_t n_samples = 10000,
                           std::uint64_t seed = 0);

BoundReport bound_report(const LinearOperator& op, const VectorF& bias,
                         const PerturbationDomain& dom, const BoundConfig& cfg = {},
                         std::size_t n_samples = 10000, std::uint64_t seed = 0);

}  // namespace lipcert
