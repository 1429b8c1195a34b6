#include "lipcert/linops.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace lipcert {

namespace {

void require_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        std::ostringstream oss;
        oss << what << ": vector has length " << got << ", expected " << want;
        throw InvalidInputError(oss.str());
    }
}

}  // namespace

VectorF LinearOperator::apply(const VectorF& x) const {
    require_length(x.size(), cols(), "apply");
    VectorF y(rows(), 0.0);
    apply_into(x, y);
    return y;
}

VectorF LinearOperator::apply_adjoint(const VectorF& y) const {
    require_length(y.size(), rows(), "apply_adjoint");
    VectorF x(cols(), 0.0);
    apply_adjoint_into(y, x);
    return x;
}

void LinearOperator::extract_row_into(std::size_t i, std::span<double> out) const {
    VectorF basis(rows(), 0.0);
    basis[i] = 1.0;
    apply_adjoint_into(basis, out);
}

DenseOperator::DenseOperator(std::size_t m, std::size_t n, VectorF entries_row_major)
    : m_(m), n_(n), a_(std::move(entries_row_major)) {
    if (a_.size() != m_ * n_) {
        std::ostringstream oss;
        oss << "DenseOperator: " << a_.size() << " entries for a " << m_ << "x" << n_
            << " operator";
        throw InvalidInputError(oss.str());
    }
}

DenseOperator DenseOperator::identity(std::size_t n) {
    VectorF a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
    return DenseOperator(n, n, std::move(a));
}

DenseOperator DenseOperator::diagonal(const VectorF& d) {
    const std::size_t n = d.size();
    VectorF a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = d[i];
    return DenseOperator(n, n, std::move(a));
}

void DenseOperator::apply_into(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < m_; ++i) {
        const double* row = a_.data() + i * n_;
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void DenseOperator::apply_adjoint_into(std::span<const double> y, std::span<double> x) const {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
        const double yi = y[i];
        if (yi == 0.0) continue;
        const double* row = a_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j) x[j] += row[j] * yi;
    }
}

void DenseOperator::extract_row_into(std::size_t i, std::span<double> out) const {
    std::memcpy(out.data(), a_.data() + i * n_, n_ * sizeof(double));
}

Conv2dOperator::Conv2dOperator(TensorShape in_shape, VectorF kernel, std::size_t out_channels,
                               std::size_t kernel_h, std::size_t kernel_w, std::size_t stride_h,
                               std::size_t stride_w, std::size_t pad_h, std::size_t pad_w)
    : in_shape_(std::move(in_shape)),
      k_(std::move(kernel)),
      cout_(out_channels),
      kh_(kernel_h),
      kw_(kernel_w),
      sh_(stride_h),
      sw_(stride_w),
      ph_(pad_h),
      pw_(pad_w) {
    if (in_shape_.rank() != 3)
        throw InvalidInputError("Conv2dOperator: input shape must be [C,H,W]");
    cin_ = in_shape_.dims[0];
    h_ = in_shape_.dims[1];
    w_ = in_shape_.dims[2];
    if (sh_ == 0 || sw_ == 0) throw InvalidInputError("Conv2dOperator: stride must be positive");
    if (kh_ == 0 || kw_ == 0 || cout_ == 0)
        throw InvalidInputError("Conv2dOperator: kernel dims must be positive");
    if (k_.size() != cout_ * cin_ * kh_ * kw_)
        throw InvalidInputError("Conv2dOperator: kernel entry count mismatch");
    if (h_ + 2 * ph_ < kh_ || w_ + 2 * pw_ < kw_)
        throw InvalidInputError("Conv2dOperator: kernel larger than padded input");
    hout_ = (h_ + 2 * ph_ - kh_) / sh_ + 1;
    wout_ = (w_ + 2 * pw_ - kw_) / sw_ + 1;
    out_shape_ = TensorShape{cout_, hout_, wout_};
}

void Conv2dOperator::apply_into(std::span<const double> x, std::span<double> y) const {
    for (std::size_t co = 0; co < cout_; ++co) {
        for (std::size_t ho = 0; ho < hout_; ++ho) {
            for (std::size_t wo = 0; wo < wout_; ++wo) {
                double acc = 0.0;
                for (std::size_t ci = 0; ci < cin_; ++ci) {
                    const double* kslice = k_.data() + ((co * cin_ + ci) * kh_) * kw_;
                    for (std::size_t r = 0; r < kh_; ++r) {
                        // padded coordinate; skip taps that fall outside the input
                        const std::ptrdiff_t hi =
                            static_cast<std::ptrdiff_t>(ho * sh_ + r) -
                            static_cast<std::ptrdiff_t>(ph_);
                        if (hi < 0 || hi >= static_cast<std::ptrdiff_t>(h_)) continue;
                        for (std::size_t s = 0; s < kw_; ++s) {
                            const std::ptrdiff_t wi =
                                static_cast<std::ptrdiff_t>(wo * sw_ + s) -
                                static_cast<std::ptrdiff_t>(pw_);
                            if (wi < 0 || wi >= static_cast<std::ptrdiff_t>(w_)) continue;
                            acc += kslice[r * kw_ + s] *
                                   x[(ci * h_ + static_cast<std::size_t>(hi)) * w_ +
                                     static_cast<std::size_t>(wi)];
                        }
                    }
                }
                y[(co * hout_ + ho) * wout_ + wo] = acc;
            }
        }
    }
}

void Conv2dOperator::apply_adjoint_into(std::span<const double> y, std::span<double> x) const {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t co = 0; co < cout_; ++co) {
        for (std::size_t ho = 0; ho < hout_; ++ho) {
            for (std::size_t wo = 0; wo < wout_; ++wo) {
                const double g = y[(co * hout_ + ho) * wout_ + wo];
                if (g == 0.0) continue;
                for (std::size_t ci = 0; ci < cin_; ++ci) {
                    const double* kslice = k_.data() + ((co * cin_ + ci) * kh_) * kw_;
                    for (std::size_t r = 0; r < kh_; ++r) {
                        const std::ptrdiff_t hi =
                            static_cast<std::ptrdiff_t>(ho * sh_ + r) -
                            static_cast<std::ptrdiff_t>(ph_);
                        if (hi < 0 || hi >= static_cast<std::ptrdiff_t>(h_)) continue;
                        for (std::size_t s = 0; s < kw_; ++s) {
                            const std::ptrdiff_t wi =
                                static_cast<std::ptrdiff_t>(wo * sw_ + s) -
                                static_cast<std::ptrdiff_t>(pw_);
                            if (wi < 0 || wi >= static_cast<std::ptrdiff_t>(w_)) continue;
                            x[(ci * h_ + static_cast<std::size_t>(hi)) * w_ +
                              static_cast<std::size_t>(wi)] += kslice[r * kw_ + s] * g;
                        }
                    }
                }
            }
        }
    }
}

std::vector<VectorF> extract_rows(const LinearOperator& op,
                                  const std::vector<std::size_t>& row_indices) {
    const std::size_t m = op.rows();
    for (std::size_t i : row_indices) {
        if (i >= m) {
            std::ostringstream oss;
            oss << "extract_rows: index " << i << " out of range [0," << m << ")";
            throw InvalidInputError(oss.str());
        }
    }
    std::vector<VectorF> rows(row_indices.size());
    parallel_for(row_indices.size(), [&](std::size_t k) {
        rows[k].assign(op.cols(), 0.0);
        op.extract_row_into(row_indices[k], rows[k]);
    });
    return rows;
}

DenseOperator materialize(const LinearOperator& op, std::size_t cap_entries) {
    const std::size_t m = op.rows();
    const std::size_t n = op.cols();
    if (n != 0 && m > cap_entries / n) {
        std::ostringstream oss;
        oss << "materialize: " << m << "x" << n << " = " << m * n
            << " entries exceeds cap " << cap_entries;
        throw CapacityError(oss.str());
    }
    VectorF a(m * n, 0.0);
    VectorF basis(n, 0.0);
    VectorF col(m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        basis[j] = 1.0;
        op.apply_into(basis, col);
        basis[j] = 0.0;
        for (std::size_t i = 0; i < m; ++i) a[i * n + j] = col[i];
    }
    return DenseOperator(m, n, std::move(a));
}

}  // namespace lipcert
