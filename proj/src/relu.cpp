#include "lipcert/relu.hpp"

#include <algorithm>
#include <cmath>

namespace lipcert {

std::size_t ReluMask::count() const {
    std::size_t c = 0;
    for (char b : bits)
        if (b) ++c;
    return c;
}

bool ReluMask::is_subset_of(const ReluMask& other) const {
    if (bits.size() != other.bits.size())
        throw InvalidInputError("ReluMask::is_subset_of: size mismatch");
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] && !other.bits[i]) return false;
    return true;
}

VectorF ReluMask::apply(const VectorF& y) const {
    if (y.size() != bits.size()) throw InvalidInputError("ReluMask::apply: size mismatch");
    VectorF out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = bits[i] ? y[i] : 0.0;
    return out;
}

ReluMask mask_of(const VectorF& y) {
    ReluMask m(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) m.bits[i] = y[i] > 0.0 ? 1 : 0;
    return m;
}

VectorF apply_relu(const VectorF& y) {
    VectorF out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] > 0.0 ? y[i] : 0.0;
    return out;
}

BreakpointSchedule breakpoint_schedule(const BoundingVertex& bv, double merge_tol) {
    const VectorF& b = bv.bias_ref;
    const VectorF& l = bv.l;
    if (b.size() != l.size())
        throw InvalidInputError("breakpoint_schedule: bias and bounding vector sizes differ");

    std::vector<double> cand;
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (b[j] < 0.0 && l[j] > 0.0) {
            double beta = -b[j] / l[j];
            if (beta < 1.0) cand.push_back(beta);
        }
    }
    std::sort(cand.begin(), cand.end());

    BreakpointSchedule sched;
    // Merge clusters of near-identical candidates, keeping the largest member
    // so the segment endpoint sits at or past every crossing it absorbed.
    std::size_t i = 0;
    while (i < cand.size()) {
        std::size_t j = i;
        while (j + 1 < cand.size() && cand[j + 1] - cand[j] <= merge_tol) ++j;
        sched.betas.push_back(cand[j]);
        i = j + 1;
    }
    sched.betas.push_back(1.0);

    double prev = 0.0;
    for (double beta : sched.betas) {
        VectorF y(b.size());
        for (std::size_t k = 0; k < b.size(); ++k) y[k] = b[k] + beta * l[k];
        sched.masks.push_back(mask_of(y));
        sched.deltas.push_back(beta - prev);
        prev = beta;
    }
    return sched;
}

}  // namespace lipcert
