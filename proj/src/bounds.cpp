#include "lipcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lipcert/random.hpp"

namespace lipcert {

std::string method_name(BoundMethod method) {
    switch (method) {
        case BoundMethod::naive: return "naive";
        case BoundMethod::rbar: return "rbar";
        case BoundMethod::nested: return "nested";
        case BoundMethod::lower: return "lower";
    }
    return "?";
}

BoundMethod method_from_name(const std::string& name) {
    if (name == "naive") return BoundMethod::naive;
    if (name == "rbar") return BoundMethod::rbar;
    if (name == "nested") return BoundMethod::nested;
    if (name == "lower") return BoundMethod::lower;
    throw InvalidInputError("unknown bound method: " + name);
}

namespace {

void check_bias(const LinearOperator& op, const VectorF& bias) {
    if (bias.size() != op.rows())
        throw InvalidInputError("bound: bias length does not match operator rows");
}

double slacked(double sigma, const BoundConfig& cfg) {
    return sigma * (1.0 + cfg.spectral_slack);
}

}  // namespace

double naive_bound(const LinearOperator& op, const BoundConfig& cfg) {
    return slacked(spectral_norm(op, cfg.power), cfg);
}

double rbar_bound(const LinearOperator& op, const VectorF& bias, const PerturbationDomain& dom,
                  const BoundConfig& cfg) {
    check_bias(op, bias);
    BoundingVertex bv = bounding_vector(op, bias, dom, cfg.row_batch);
    ReluMask rbar = mask_of(bv.ybar);
    return slacked(masked_spectral_norm(op, rbar, cfg.power), cfg);
}

NestedResult nested_bound(const LinearOperator& op, const VectorF& bias,
                          const PerturbationDomain& dom, const BoundConfig& cfg) {
    check_bias(op, bias);
    BoundingVertex bv = bounding_vector(op, bias, dom, cfg.row_batch);
    NestedResult result;
    result.schedule = breakpoint_schedule(bv);
    const std::size_t q = result.schedule.segments();
    std::vector<double> sigmas(q, 0.0);
    parallel_for(q, [&](std::size_t i) {
        sigmas[i] = masked_spectral_norm(op, result.schedule.masks[i], cfg.power);
    });
    double acc = 0.0;
    for (std::size_t i = 0; i < q; ++i) acc += result.schedule.deltas[i] * slacked(sigmas[i], cfg);
    result.value = acc;
    return result;
}

RmaxResult rmax_bound_enumerated(const DenseOperator& op, const VectorF& bias,
                                 const PerturbationDomain& dom, std::size_t samples,
                                 std::size_t exhaustive_dim_cap, RmaxMode mode,
                                 std::uint64_t seed) {
    check_bias(op, bias);
    validate(dom);
    const std::size_t m = op.rows();

    bool exhaustive;
    switch (mode) {
        case RmaxMode::exhaustive:
            if (m > exhaustive_dim_cap)
                throw CapacityError("rmax_bound_enumerated: " + std::to_string(m) +
                                    " rows exceed the exhaustive cap of " +
                                    std::to_string(exhaustive_dim_cap));
            exhaustive = true;
            break;
        case RmaxMode::sampled: exhaustive = false; break;
        case RmaxMode::auto_select:
        default: exhaustive = m <= exhaustive_dim_cap; break;
    }

    RmaxResult result;
    result.exhaustive = exhaustive;
    if (exhaustive) {
        const std::size_t total = std::size_t{1} << m;
        result.masks_considered = total;
        for (std::size_t bits = 1; bits < total; ++bits) {
            ReluMask mask(m);
            for (std::size_t i = 0; i < m; ++i) mask.bits[i] = (bits >> i) & 1 ? 1 : 0;
            result.value = std::max(result.value, dense_spectral_norm(op, mask));
        }
        return result;
    }

    if (dom.epsilon <= 0.0)
        throw InvalidInputError("rmax_bound_enumerated: sampled mode needs epsilon > 0");
    Rng rng(seed);
    std::map<std::vector<char>, double> seen;
    for (std::size_t s = 0; s < samples; ++s) {
        VectorF x = rng.sphere_point(op.cols(), dom.norm, dom.epsilon, dom.nonneg);
        VectorF y = op.apply(x);
        for (std::size_t i = 0; i < m; ++i) y[i] += bias[i];
        ReluMask mask = mask_of(y);
        auto [it, fresh] = seen.emplace(mask.bits, 0.0);
        if (fresh) it->second = dense_spectral_norm(op, mask);
        result.value = std::max(result.value, it->second);
    }
    result.masks_considered = seen.size();
    return result;
}

double lower_bound_sampled(const LinearOperator& op, const VectorF& bias,
                           const PerturbationDomain& dom, std::size_t n_samples,
                           std::uint64_t seed) {
    check_bias(op, bias);
    validate(dom);
    if (dom.epsilon <= 0.0)
        throw InvalidInputError("lower_bound_sampled: epsilon must be positive");

    const VectorF relu_b = apply_relu(bias);
    Rng rng(seed);
    VectorF y(op.rows());
    double best = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        VectorF x = rng.sphere_point(op.cols(), dom.norm, dom.epsilon, dom.nonneg);
        op.apply_into(x, y);
        double num = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            double z = y[i] + bias[i];
            double d = (z > 0.0 ? z : 0.0) - relu_b[i];
            num += d * d;
        }
        double den = norm2(x);
        if (den > 0.0) best = std::max(best, std::sqrt(num) / den);
    }
    return best;
}

BoundReport bound_report(const LinearOperator& op, const VectorF& bias,
                         const PerturbationDomain& dom, const BoundConfig& cfg,
                         std::size_t n_samples, std::uint64_t seed) {
    BoundReport report;
    report.epsilon = dom.epsilon;
    report.spectral_slack = cfg.spectral_slack;
    report.naive = naive_bound(op, cfg);
    report.rbar = rbar_bound(op, bias, dom, cfg);
    NestedResult nested = nested_bound(op, bias, dom, cfg);
    report.nested = nested.value;
    report.segments = nested.schedule.segments();
    report.lower = lower_bound_sampled(op, bias, dom, n_samples, seed);
    return report;
}

}  // namespace lipcert
