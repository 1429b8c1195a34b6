#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lipcert {

// All runtime computation is done in double precision; model files store
// float32 and are widened on load.
using VectorF = std::vector<double>;

// Rejected input (bad dimensions, invalid arguments).
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested work exceeds a configured size cap.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model manifest or weight file failed to load/validate.
struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape of a flattened tensor, row-major over dims (e.g. [C,H,W]).
struct TensorShape {
    std::vector<std::size_t> dims;

    TensorShape() = default;
    TensorShape(std::initializer_list<std::size_t> d) : dims(d) { validate(); }
    explicit TensorShape(std::vector<std::size_t> d) : dims(std::move(d)) { validate(); }

    std::size_t count() const {
        std::size_t c = 1;
        for (std::size_t d : dims) c *= d;
        return c;
    }
    std::size_t rank() const { return dims.size(); }
    bool operator==(const TensorShape& o) const { return dims == o.dims; }

    std::string str() const;

  private:
    void validate() const {
        for (std::size_t d : dims)
            if (d == 0) throw InvalidInputError("TensorShape: all dims must be >= 1");
    }
};

double dot(const VectorF& u, const VectorF& v);
double norm2(const VectorF& v);
double norm1(const VectorF& v);
double norm_inf(const VectorF& v);

// Worker thread limit: min(hardware_concurrency, LIPCERT_THREADS). At least 1.
std::size_t worker_thread_cap();

// Runs fn(i) for i in [0, count). May use up to worker_thread_cap() threads;
// callers get determinism by writing into per-index slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace lipcert
