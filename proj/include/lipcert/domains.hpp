#pragma once

#include <string>

#include "lipcert/common.hpp"
#include "lipcert/linops.hpp"

namespace lipcert {

enum class Norm { L1, L2, Linf };

std::string norm_name(Norm norm);
double norm_of(const VectorF& v, Norm norm);

// Perturbation set: the radius-epsilon ball of the chosen norm, optionally
// intersected with the non-negative orthant. The zero vector always belongs.
struct PerturbationDomain {
    Norm norm = Norm::L2;
    double epsilon = 0.0;
    bool nonneg = false;
};

void validate(const PerturbationDomain& dom);

// Upper vertex of the axis-aligned region enclosing the affine image of the
// domain. Per coordinate, l[i] is the maximum of row_i . x over the domain
// (always >= 0 since 0 is in the domain) and ybar = bias + l.
struct BoundingVertex {
    VectorF l;
    VectorF ybar;
    VectorF bias_ref;
};

// Row-wise sharp maximum of a . x over the domain:
//   L1   -> epsilon * max_j |a_j|
//   L2   -> epsilon * ||a||_2
//   Linf -> epsilon * sum_j |a_j|
// with `a` replaced by its positive part when the domain is non-negative.
double row_support_value(const VectorF& row, const PerturbationDomain& dom);

// Bounding vertex for op/bias over the domain. Rows are extracted in batches
// of `row_batch` (adjoint applications) so conv operators are never formed.
BoundingVertex bounding_vector(const LinearOperator& op, const VectorF& bias,
                               const PerturbationDomain& dom, std::size_t row_batch = 128);

}  // namespace lipcert
