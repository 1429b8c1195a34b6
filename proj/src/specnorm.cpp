#include "lipcert/specnorm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "lipcert/random.hpp"

namespace lipcert {

namespace {

void check_mask(const LinearOperator& op, const ReluMask& mask) {
    if (mask.size() != op.rows())
        throw InvalidInputError("masked_spectral_norm: mask size does not match operator rows");
}

}  // namespace

double masked_spectral_norm(const LinearOperator& op, const ReluMask& mask,
                            const PowerIterConfig& config) {
    check_mask(op, mask);
    if (mask.none()) return 0.0;

    const std::size_t m = op.rows();
    const std::size_t n = op.cols();

    Rng rng(config.seed);
    VectorF v = rng.normal_vector(n);
    double vn = norm2(v);
    while (vn == 0.0) {
        v = rng.normal_vector(n);
        vn = norm2(v);
    }
    for (double& x : v) x /= vn;

    VectorF w(m), u(n);
    double best = 0.0;
    double prev = -1.0;
    const std::size_t total = config.iterations + config.polish_iterations;
    for (std::size_t it = 0; it < total; ++it) {
        op.apply_into(v, w);
        for (std::size_t i = 0; i < m; ++i)
            if (!mask.test(i)) w[i] = 0.0;
        // ||RAv|| with ||v|| = 1 never exceeds the true norm.
        double sigma = norm2(w);
        best = std::max(best, sigma);
        if (config.rel_tol && prev >= 0.0 && std::abs(sigma - prev) <= *config.rel_tol * sigma)
            break;
        prev = sigma;
        op.apply_adjoint_into(w, u);
        double un = norm2(u);
        if (un == 0.0) break;
        for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / un;
    }
    return best;
}

double spectral_norm(const LinearOperator& op, const PowerIterConfig& config) {
    return masked_spectral_norm(op, ReluMask(op.rows(), true), config);
}

double dense_spectral_norm(const LinearOperator& op, const ReluMask& mask, std::size_t cap) {
    check_mask(op, mask);
    if (mask.none()) return 0.0;

    const std::size_t m = op.rows();
    const std::size_t n = op.cols();
    VectorF entries = materialize(op, cap).entries();
    for (std::size_t i = 0; i < m; ++i) {
        if (!mask.test(i)) std::fill_n(entries.begin() + static_cast<std::ptrdiff_t>(i * n), n, 0.0);
    }

    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> a(entries.data(), static_cast<Eigen::Index>(m),
                               static_cast<Eigen::Index>(n));
    // Gram matrix on the smaller side keeps the eigensolve cheap.
    Eigen::MatrixXd gram;
    if (m <= n)
        gram = a * a.transpose();
    else
        gram = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    double lam = solver.eigenvalues().maxCoeff();
    return std::sqrt(std::max(lam, 0.0));
}

double dense_spectral_norm(const LinearOperator& op, std::size_t cap) {
    return dense_spectral_norm(op, ReluMask(op.rows(), true), cap);
}

}  // namespace lipcert
