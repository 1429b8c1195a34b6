#pragma once

#include <memory>

#include "lipcert/linops.hpp"
#include "lipcert/random.hpp"

namespace lipcert::testing {

inline DenseOperator random_dense(Rng& rng, std::size_t m, std::size_t n) {
    return DenseOperator(m, n, rng.normal_vector(m * n));
}

inline Conv2dOperator random_conv(Rng& rng, std::size_t cin, std::size_t h, std::size_t w,
                                  std::size_t cout, std::size_t k, std::size_t stride,
                                  std::size_t pad) {
    return Conv2dOperator(TensorShape{cin, h, w}, rng.normal_vector(cout * cin * k * k), cout, k,
                          k, stride, stride, pad, pad);
}

}  // namespace lipcert::testing
