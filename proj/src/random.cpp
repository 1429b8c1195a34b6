#include "lipcert/random.hpp"

#include <cmath>

namespace lipcert {

VectorF Rng::normal_vector(std::size_t n, double scale) {
    VectorF v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = scale * normal();
    return v;
}

VectorF Rng::sphere_point(std::size_t n, Norm norm, double epsilon, bool nonneg) {
    if (n == 0) throw InvalidInputError("sphere_point: dimension must be positive");
    if (epsilon <= 0.0) throw InvalidInputError("sphere_point: epsilon must be positive");
    VectorF v(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) {
            double g = normal();
            v[i] = nonneg ? std::abs(g) : g;
        }
        double r = norm_of(v, norm);
        if (r > 0.0) {
            for (double& x : v) x *= epsilon / r;
            return v;
        }
    }
}

VectorF Rng::ball_point(std::size_t n, Norm norm, double epsilon, bool nonneg) {
    VectorF v = sphere_point(n, norm, epsilon, nonneg);
    double r = uniform();
    for (double& x : v) x *= r;
    return v;
}

}  // namespace lipcert
