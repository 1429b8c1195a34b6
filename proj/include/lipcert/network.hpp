#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lipcert/bounds.hpp"
#include "lipcert/linops.hpp"

namespace lipcert {

enum class LayerKind { affine_relu_dense, affine_relu_conv, affine_dense, maxpool2d, flatten };

std::string layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

struct Layer {
    LayerKind kind = LayerKind::flatten;
    std::shared_ptr<const LinearOperator> op;  // affine kinds only
    VectorF bias0;                             // raw bias, length rows()
    TensorShape in_shape;
    TensorShape out_shape;
    std::size_t window_h = 0, window_w = 0;  // maxpool only
    std::size_t stride_h = 0, stride_w = 0;
    std::string label;  // e.g. "conv5-6", "maxpool2", "FC-10"

    bool is_affine() const {
        return kind == LayerKind::affine_relu_dense || kind == LayerKind::affine_relu_conv ||
               kind == LayerKind::affine_dense;
    }
    std::size_t param_count() const;
};

struct NetworkModel {
    std::string name;
    TensorShape input_shape;
    std::vector<Layer> layers;
};

// Hex digest used by the manifest's optional per-layer checksum; computed
// over the weight bytes immediately followed by the bias bytes.
std::string sha256_hex(const void* data, std::size_t size);

// Loads a JSON manifest plus the raw little-endian float32 weight/bias files
// it references (paths relative to the manifest). Validates the shape chain
// and any checksums; failures throw LoadError naming the offending layer.
NetworkModel load_model(const std::string& manifest_path);

// Operator plus bias re-expressed about a nominal input: b = b0 + A x0.
struct AffineLayer {
    std::shared_ptr<const LinearOperator> op;
    VectorF bias;
};

AffineLayer recenter(const Layer& layer, const VectorF& x0);

VectorF layer_forward(const Layer& layer, const VectorF& x);
VectorF network_forward(const NetworkModel& model, const VectorF& x);

// Global 2-norm Lipschitz constant of a maxpool layer: 1 when windows cannot
// overlap, otherwise sqrt of the max number of windows sharing a coordinate.
double maxpool_lipschitz(const Layer& layer);

// What actually produced a layer's constant in a trace: the requested bound
// method for affine-ReLU layers, the plain operator norm for the final affine
// layer, a fixed constant for pooling and flatten.
enum class LayerMethod { naive, rbar, nested, operator_norm, fixed };

std::string layer_method_name(LayerMethod method);

struct PropagationRecord {
    std::size_t layer_index = 0;
    double epsilon_in = 0.0;
    PerturbationDomain domain;
    double L_upper = 0.0;
    LayerMethod method = LayerMethod::fixed;
    VectorF nominal_in;
};

struct PropagationTrace {
    std::vector<PropagationRecord> records;
    double product_bound = 1.0;
};

// Layer-by-layer bound propagation: each affine-ReLU layer is recentered at
// the running nominal, bounded by `method` over an L2 ball of the running
// epsilon (restricted to the non-negative orthant when the previous layer
// ended in a ReLU), and the epsilon for the next layer is epsilon * L.
PropagationTrace propagate(const NetworkModel& model, const VectorF& x0, double epsilon,
                           BoundMethod method, const BoundConfig& cfg = {});

// End-to-end statistical lower bound: max of ||f(x0+d) - f(x0)|| / ||d|| over
// random d on the L2 epsilon-sphere.
double network_lower_bound_sampled(const NetworkModel& model, const VectorF& x0, double epsilon,
                                   std::size_t n_samples = 10000, std::uint64_t seed = 0);

// Raw little-endian float32 vector file; `expected` element count enforced.
VectorF load_vector_f32(const std::string& path, std::size_t expected);

}  // namespace lipcert
