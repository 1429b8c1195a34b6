#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lipcert/network.hpp"

namespace lipcert {

// Sorted ascending, endpoints inclusive. A single point collapses to `start`.
struct EpsilonGrid {
    enum class Scale { log, linear };

    double start = 0.1;
    double stop = 10.0;
    Scale scale = Scale::log;
    std::size_t points = 5;

    std::vector<double> values() const;

    // "start:stop:scale:points", e.g. "0.1:10:log:5".
    static EpsilonGrid parse(const std::string& text);
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitCapacityError = 3;

struct BoundCommand {
    std::string model_path;
    std::string x0_path = "zeros";  // literal "zeros" or a float32 vector file
    EpsilonGrid grid;
    std::vector<BoundMethod> methods = {BoundMethod::naive, BoundMethod::rbar, BoundMethod::nested,
                                        BoundMethod::lower};
    std::optional<std::size_t> layer;  // absent: whole-network mode
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
    double spectral_slack = 1e-4;
    std::string out_path;  // empty: CSV to `out`
};

struct VerifyCommand {
    std::optional<std::string> model_path;  // verify this model's affine layers instead
    std::size_t instances = 200;
    std::uint64_t seed = 42;
    std::size_t samples = 2000;
    double spectral_slack = 1e-4;
};

struct DescribeCommand {
    std::string model_path;
};

// CSV rows `epsilon,scope,method,value,seconds` in (epsilon, scope, method)
// order; identical flags and seeds reproduce every byte except seconds.
int run_bound(const BoundCommand& cmd, std::ostream& out, std::ostream& err);

// One line per verified instance on `out`, pass/fail counts on `err`.
int run_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err);

// One line per layer: kind, shapes, parameter count, operator dims, label.
int run_describe(const DescribeCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace lipcert
