#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lipcert/bounds.hpp"

namespace lipcert {

enum class OracleQuantity {
    full_spectral_norm,
    rbar_spectral_norm,
    lipschitz_vs_naive,
    lipschitz_vs_rbar,
    lipschitz_vs_nested,
    rbar_vs_rmax,
    rmax_sampled_vs_exhaustive,
};

std::string quantity_name(OracleQuantity quantity);

enum class OracleRelation { oracle_leq_certified, oracle_eq_certified, certified_leq_oracle };

// One ground-truth comparison. `tolerance` is an absolute cushion; pass holds
// exactly when the declared relation does within it.
struct OracleReport {
    OracleQuantity quantity = OracleQuantity::full_spectral_norm;
    double oracle_value = 0.0;
    double certified_value = 0.0;
    OracleRelation relation = OracleRelation::oracle_leq_certified;
    double tolerance = 0.0;
    bool pass = false;
};

bool relation_holds(const OracleReport& report);

// Statistical lower bound on the layer's local Lipschitz constant: max ratio
// over n sampled points, half on the domain's epsilon-sphere and half in the
// interior.
double sampled_local_lipschitz(const LinearOperator& op, const VectorF& bias,
                               const PerturbationDomain& dom, std::size_t n, std::uint64_t seed);

// Cross-checks one instance against every oracle route: dense vs matrix-free
// spectral norms (full and Rbar masks), the sampled Lipschitz value against
// all three upper bounds, and the mask-enumeration bound against rbar.
std::vector<OracleReport> verify_instance(const LinearOperator& op, const VectorF& bias,
                                          const PerturbationDomain& dom,
                                          const BoundConfig& cfg = {},
                                          std::size_t n_samples = 2000, std::uint64_t seed = 1);

// Deterministic generated test instance; index walks through norm, nonneg,
// bias-scale, and epsilon families, with periodic special regimes (conv
// operators, all-positive bias, exactly duplicated crossings, near-zero bias).
struct OracleInstance {
    std::shared_ptr<const LinearOperator> op;
    VectorF bias;
    PerturbationDomain dom;
    std::string description;
};

OracleInstance make_instance(std::uint64_t seed, std::size_t index);

}  // namespace lipcert
