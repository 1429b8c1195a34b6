#pragma once

#include <vector>

#include "lipcert/common.hpp"
#include "lipcert/domains.hpp"

namespace lipcert {

// Diagonal 0/1 selection matrix, stored as its diagonal. A bit is set exactly
// when the corresponding coordinate is strictly positive (the convention used
// throughout: a coordinate sitting at zero contributes nothing either way).
struct ReluMask {
    std::vector<char> bits;

    ReluMask() = default;
    explicit ReluMask(std::size_t m, bool value = false) : bits(m, value ? 1 : 0) {}

    std::size_t size() const { return bits.size(); }
    bool test(std::size_t i) const { return bits[i] != 0; }
    void set(std::size_t i, bool v) { bits[i] = v ? 1 : 0; }

    std::size_t count() const;
    bool none() const { return count() == 0; }
    bool is_subset_of(const ReluMask& other) const;
    bool operator==(const ReluMask& other) const { return bits == other.bits; }

    // Zeroes the coordinates whose bit is clear.
    VectorF apply(const VectorF& y) const;
};

ReluMask mask_of(const VectorF& y);
VectorF apply_relu(const VectorF& y);

// Piecewise mask schedule along beta in (0,1]: segment i covers
// (betas[i-1], betas[i]] with beta_0 = 0, and carries the mask of b + beta_i*l.
// Masks only gain bits as i increases.
struct BreakpointSchedule {
    std::vector<double> betas;      // strictly increasing, last == 1
    std::vector<ReluMask> masks;    // one per segment
    std::vector<double> deltas;     // betas[i] - betas[i-1]

    std::size_t segments() const { return betas.size(); }
};

// Breakpoints where b + beta*l crosses zero per coordinate (b < 0, l > 0,
// crossing strictly inside (0,1)); near-duplicates within `merge_tol` are
// merged. An empty candidate set yields the single segment [0,1].
BreakpointSchedule breakpoint_schedule(const BoundingVertex& bv, double merge_tol = 1e-12);

}  // namespace lipcert
