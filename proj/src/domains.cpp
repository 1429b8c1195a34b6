#include "lipcert/domains.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lipcert {

std::string norm_name(Norm norm) {
    switch (norm) {
        case Norm::L1: return "l1";
        case Norm::L2: return "l2";
        case Norm::Linf: return "linf";
    }
    return "?";
}

double norm_of(const VectorF& v, Norm norm) {
    switch (norm) {
        case Norm::L1: return norm1(v);
        case Norm::L2: return norm2(v);
        case Norm::Linf: return norm_inf(v);
    }
    return 0.0;
}

void validate(const PerturbationDomain& dom) {
    if (!(dom.epsilon >= 0.0) || !std::isfinite(dom.epsilon))
        throw InvalidInputError("PerturbationDomain: epsilon must be finite and >= 0");
}

double row_support_value(const VectorF& row, const PerturbationDomain& dom) {
    double acc = 0.0;
    switch (dom.norm) {
        case Norm::L1:
            for (double a : row) {
                const double v = dom.nonneg ? std::max(a, 0.0) : std::abs(a);
                acc = std::max(acc, v);
            }
            break;
        case Norm::L2:
            for (double a : row) {
                const double v = dom.nonneg ? std::max(a, 0.0) : a;
                acc += v * v;
            }
            acc = std::sqrt(acc);
            break;
        case Norm::Linf:
            for (double a : row) acc += dom.nonneg ? std::max(a, 0.0) : std::abs(a);
            break;
    }
    return dom.epsilon * acc;
}

BoundingVertex bounding_vector(const LinearOperator& op, const VectorF& bias,
                               const PerturbationDomain& dom, std::size_t row_batch) {
    validate(dom);
    const std::size_t m = op.rows();
    if (bias.size() != m) {
        std::ostringstream oss;
        oss << "bounding_vector: bias has length " << bias.size() << ", expected " << m;
        throw InvalidInputError(oss.str());
    }
    if (row_batch == 0) row_batch = 1;

    BoundingVertex bv;
    bv.l.assign(m, 0.0);
    bv.bias_ref = bias;
    for (std::size_t start = 0; start < m; start += row_batch) {
        const std::size_t stop = std::min(m, start + row_batch);
        std::vector<std::size_t> indices(stop - start);
        for (std::size_t k = 0; k < indices.size(); ++k) indices[k] = start + k;
        const std::vector<VectorF> rows = extract_rows(op, indices);
        for (std::size_t k = 0; k < rows.size(); ++k)
            bv.l[start + k] = row_support_value(rows[k], dom);
    }
    bv.ybar.resize(m);
    for (std::size_t i = 0; i < m; ++i) bv.ybar[i] = bias[i] + bv.l[i];
    return bv;
}

}  // namespace lipcert
