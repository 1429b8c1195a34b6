#pragma once

#include <memory>
#include <span>
#include <vector>

#include "lipcert/common.hpp"

namespace lipcert {

// Matrix-free m x n linear map. Dense layers store their entries; convolution
// layers apply the kernel directly and never form the matrix unless asked to
// materialize. Operators are immutable after construction and safe to share
// across threads.
class LinearOperator {
  public:
    virtual ~LinearOperator() = default;

    virtual std::size_t rows() const = 0;
    virtual std::size_t cols() const = 0;

    // y = A x. Spans must already have the right lengths.
    virtual void apply_into(std::span<const double> x, std::span<double> y) const = 0;
    // x = A^T y.
    virtual void apply_adjoint_into(std::span<const double> y, std::span<double> x) const = 0;

    VectorF apply(const VectorF& x) const;
    VectorF apply_adjoint(const VectorF& y) const;

    // Row i as a length-n vector, i.e. A^T e_i.
    virtual void extract_row_into(std::size_t i, std::span<double> out) const;
};

class DenseOperator final : public LinearOperator {
  public:
    DenseOperator(std::size_t m, std::size_t n, VectorF entries_row_major);

    static DenseOperator identity(std::size_t n);
    static DenseOperator diagonal(const VectorF& d);

    std::size_t rows() const override { return m_; }
    std::size_t cols() const override { return n_; }
    const VectorF& entries() const { return a_; }
    double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    void apply_into(std::span<const double> x, std::span<double> y) const override;
    void apply_adjoint_into(std::span<const double> y, std::span<double> x) const override;
    void extract_row_into(std::size_t i, std::span<double> out) const override;

  private:
    std::size_t m_, n_;
    VectorF a_;  // row-major, m*n entries
};

// 2-D convolution over a [Cin,H,W] input, kernel [Cout,Cin,kh,kw], zero
// padding and stride only. Output is [Cout,Hout,Wout] flattened row-major.
class Conv2dOperator final : public LinearOperator {
  public:
    Conv2dOperator(TensorShape in_shape, VectorF kernel, std::size_t out_channels,
                   std::size_t kernel_h, std::size_t kernel_w, std::size_t stride_h,
                   std::size_t stride_w, std::size_t pad_h, std::size_t pad_w);

    std::size_t rows() const override { return out_shape_.count(); }
    std::size_t cols() const override { return in_shape_.count(); }
    const TensorShape& in_shape() const { return in_shape_; }
    const TensorShape& out_shape() const { return out_shape_; }
    std::size_t out_channels() const { return cout_; }
    std::size_t kernel_h() const { return kh_; }
    std::size_t kernel_w() const { return kw_; }
    std::size_t stride_h() const { return sh_; }
    std::size_t stride_w() const { return sw_; }
    std::size_t pad_h() const { return ph_; }
    std::size_t pad_w() const { return pw_; }
    const VectorF& kernel() const { return k_; }

    void apply_into(std::span<const double> x, std::span<double> y) const override;
    void apply_adjoint_into(std::span<const double> y, std::span<double> x) const override;

  private:
    TensorShape in_shape_;   // [Cin,H,W]
    TensorShape out_shape_;  // [Cout,Hout,Wout]
    VectorF k_;              // [Cout,Cin,kh,kw] row-major
    std::size_t cin_, h_, w_;
    std::size_t cout_, hout_, wout_;
    std::size_t kh_, kw_, sh_, sw_, ph_, pw_;
};

inline constexpr std::size_t kDefaultMaterializeCap = std::size_t{1} << 26;

// Rows A^T e_i for each requested index, via batched adjoint applications.
// Output order matches `row_indices`; batches may run in parallel.
std::vector<VectorF> extract_rows(const LinearOperator& op,
                                  const std::vector<std::size_t>& row_indices);

// Dense matrix equal to the operator's action on all basis vectors (built by
// forward application, so it is an independent route from extract_rows).
DenseOperator materialize(const LinearOperator& op,
                          std::size_t cap_entries = kDefaultMaterializeCap);

}  // namespace lipcert
