#include "lipcert/network.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "lipcert/random.hpp"

namespace lipcert {

namespace fs = std::filesystem;
using nlohmann::json;

std::string layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::affine_relu_dense: return "affine_relu_dense";
        case LayerKind::affine_relu_conv: return "affine_relu_conv";
        case LayerKind::affine_dense: return "affine_dense";
        case LayerKind::maxpool2d: return "maxpool2d";
        case LayerKind::flatten: return "flatten";
    }
    return "?";
}

LayerKind layer_kind_from_name(const std::string& name) {
    if (name == "affine_relu_dense") return LayerKind::affine_relu_dense;
    if (name == "affine_relu_conv") return LayerKind::affine_relu_conv;
    if (name == "affine_dense") return LayerKind::affine_dense;
    if (name == "maxpool2d") return LayerKind::maxpool2d;
    if (name == "flatten") return LayerKind::flatten;
    throw LoadError("unknown layer kind: " + name);
}

std::size_t Layer::param_count() const {
    switch (kind) {
        case LayerKind::affine_relu_conv: {
            auto* conv = dynamic_cast<const Conv2dOperator*>(op.get());
            return conv->kernel().size() + conv->out_channels();
        }
        case LayerKind::affine_relu_dense:
        case LayerKind::affine_dense: return op->rows() * op->cols() + op->rows();
        default: return 0;
    }
}

std::string sha256_hex(const void* data, std::size_t size) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, data, size);
    EVP_DigestFinal_ex(ctx, digest, &digest_len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * digest_len);
    for (unsigned int i = 0; i < digest_len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

namespace {

[[noreturn]] void layer_error(std::size_t index, const std::string& what) {
    throw LoadError("layer " + std::to_string(index) + ": " + what);
}

std::vector<unsigned char> read_file_bytes(const fs::path& path, std::size_t layer_index) {
    std::ifstream in(path, std::ios::binary);
    if (!in) layer_error(layer_index, "cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

VectorF floats_from_bytes(const std::vector<unsigned char>& bytes, std::size_t expected,
                          const std::string& what, std::size_t layer_index) {
    if (bytes.size() != expected * 4)
        layer_error(layer_index, what + " holds " + std::to_string(bytes.size() / 4) +
                                     " float32 values, expected " + std::to_string(expected));
    VectorF out(expected);
    for (std::size_t i = 0; i < expected; ++i) {
        std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i]) |
                          static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8 |
                          static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16 |
                          static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24;
        out[i] = static_cast<double>(std::bit_cast<float>(u));
    }
    return out;
}

std::vector<std::size_t> size_array(const json& node, const char* key, std::size_t arity,
                                    std::size_t layer_index) {
    if (!node.contains(key)) layer_error(layer_index, std::string("missing key '") + key + "'");
    const json& arr = node[key];
    if (!arr.is_array() || arr.size() != arity)
        layer_error(layer_index,
                    std::string("'") + key + "' must be an array of " + std::to_string(arity));
    std::vector<std::size_t> out;
    for (const json& v : arr) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            layer_error(layer_index, std::string("'") + key + "' entries must be integers >= 0");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

std::string string_field(const json& node, const char* key, std::size_t layer_index) {
    if (!node.contains(key) || !node[key].is_string())
        layer_error(layer_index, std::string("missing string key '") + key + "'");
    return node[key].get<std::string>();
}

std::size_t count_field(const json& node, const char* key, std::size_t layer_index) {
    if (!node.contains(key) || !node[key].is_number_integer() || node[key].get<long long>() <= 0)
        layer_error(layer_index, std::string("missing positive integer key '") + key + "'");
    return node[key].get<std::size_t>();
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

NetworkModel load_model(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw LoadError("cannot open manifest " + manifest_path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError("manifest " + manifest_path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("input_shape") || !doc.contains("layers"))
        throw LoadError("manifest " + manifest_path + ": need 'input_shape' and 'layers'");

    NetworkModel model;
    model.name = doc.value("name", std::string{});

    {
        std::vector<std::size_t> dims;
        for (const json& v : doc["input_shape"]) {
            if (!v.is_number_integer() || v.get<long long>() <= 0)
                throw LoadError("manifest " + manifest_path + ": bad input_shape");
            dims.push_back(v.get<std::size_t>());
        }
        model.input_shape = TensorShape{dims};
    }

    const json& layers = doc["layers"];
    if (!layers.is_array() || layers.empty())
        throw LoadError("manifest " + manifest_path + ": 'layers' must be a non-empty array");

    const fs::path base = fs::path(manifest_path).parent_path();
    TensorShape current = model.input_shape;

    for (std::size_t idx = 0; idx < layers.size(); ++idx) {
        const json& node = layers[idx];
        if (!node.is_object()) layer_error(idx, "layer entry must be an object");
        Layer layer;
        layer.kind = layer_kind_from_name(string_field(node, "kind", idx));
        layer.in_shape = current;

        if (layer.is_affine()) {
            const std::string weights_file = string_field(node, "weights_file", idx);
            const std::string bias_file = string_field(node, "bias_file", idx);
            auto weight_bytes = read_file_bytes(base / weights_file, idx);
            auto bias_bytes = read_file_bytes(base / bias_file, idx);

            if (node.contains("sha256")) {
                std::vector<unsigned char> all = weight_bytes;
                all.insert(all.end(), bias_bytes.begin(), bias_bytes.end());
                const std::string want = lowercase(node["sha256"].get<std::string>());
                const std::string got = sha256_hex(all.data(), all.size());
                if (want != got)
                    layer_error(idx, "checksum mismatch: manifest " + want + ", files " + got);
            }

            if (layer.kind == LayerKind::affine_relu_conv) {
                if (current.rank() != 3)
                    layer_error(idx, "conv layer needs a rank-3 input, got " + current.str());
                const std::size_t cout = count_field(node, "out_channels", idx);
                const auto kernel = size_array(node, "kernel", 2, idx);
                const auto stride = size_array(node, "stride", 2, idx);
                const auto padding = size_array(node, "padding", 2, idx);
                const std::size_t cin = current.dims[0];
                VectorF weights = floats_from_bytes(
                    weight_bytes, cout * cin * kernel[0] * kernel[1], "weights file", idx);
                std::shared_ptr<const Conv2dOperator> conv;
                try {
                    conv = std::make_shared<Conv2dOperator>(current, std::move(weights), cout,
                                                            kernel[0], kernel[1], stride[0],
                                                            stride[1], padding[0], padding[1]);
                } catch (const InvalidInputError& e) {
                    layer_error(idx, e.what());
                }
                VectorF channel_bias = floats_from_bytes(bias_bytes, cout, "bias file", idx);
                const std::size_t per_channel = conv->out_shape().count() / cout;
                layer.bias0.resize(conv->out_shape().count());
                for (std::size_t c = 0; c < cout; ++c)
                    std::fill_n(layer.bias0.begin() + static_cast<std::ptrdiff_t>(c * per_channel),
                                per_channel, channel_bias[c]);
                layer.out_shape = conv->out_shape();
                layer.label = "conv" + std::to_string(conv->kernel_h()) + "-" + std::to_string(cout);
                layer.op = std::move(conv);
            } else {
                const std::size_t m = count_field(node, "out_features", idx);
                const std::size_t n = current.count();
                VectorF weights = floats_from_bytes(weight_bytes, m * n, "weights file", idx);
                layer.bias0 = floats_from_bytes(bias_bytes, m, "bias file", idx);
                layer.op = std::make_shared<DenseOperator>(m, n, std::move(weights));
                layer.out_shape = TensorShape{{m}};
                layer.label = "FC-" + std::to_string(m);
            }
        } else if (layer.kind == LayerKind::maxpool2d) {
            if (current.rank() != 3)
                layer_error(idx, "maxpool layer needs a rank-3 input, got " + current.str());
            const auto window = size_array(node, "window", 2, idx);
            const auto stride = size_array(node, "stride", 2, idx);
            if (window[0] == 0 || window[1] == 0 || stride[0] == 0 || stride[1] == 0)
                layer_error(idx, "maxpool window and stride must be positive");
            if (current.dims[1] < window[0] || current.dims[2] < window[1])
                layer_error(idx, "maxpool window exceeds input " + current.str());
            layer.window_h = window[0];
            layer.window_w = window[1];
            layer.stride_h = stride[0];
            layer.stride_w = stride[1];
            const std::size_t hout = (current.dims[1] - window[0]) / stride[0] + 1;
            const std::size_t wout = (current.dims[2] - window[1]) / stride[1] + 1;
            layer.out_shape = TensorShape{{current.dims[0], hout, wout}};
            layer.label = "maxpool" + std::to_string(window[0]);
        } else {
            layer.out_shape = TensorShape{{current.count()}};
            layer.label = "flatten";
        }

        current = layer.out_shape;
        model.layers.push_back(std::move(layer));
    }
    return model;
}

AffineLayer recenter(const Layer& layer, const VectorF& x0) {
    if (!layer.is_affine())
        throw InvalidInputError("recenter: layer '" + layer.label + "' is not affine");
    VectorF b = layer.op->apply(x0);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += layer.bias0[i];
    return AffineLayer{layer.op, std::move(b)};
}

namespace {

VectorF maxpool_forward(const Layer& layer, const VectorF& x) {
    const std::size_t c = layer.in_shape.dims[0];
    const std::size_t h = layer.in_shape.dims[1];
    const std::size_t w = layer.in_shape.dims[2];
    const std::size_t hout = layer.out_shape.dims[1];
    const std::size_t wout = layer.out_shape.dims[2];
    VectorF out(layer.out_shape.count());
    std::size_t o = 0;
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double* plane = x.data() + ch * h * w;
        for (std::size_t oh = 0; oh < hout; ++oh) {
            for (std::size_t ow = 0; ow < wout; ++ow) {
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t dh = 0; dh < layer.window_h; ++dh)
                    for (std::size_t dw = 0; dw < layer.window_w; ++dw)
                        best = std::max(best, plane[(oh * layer.stride_h + dh) * w +
                                                    (ow * layer.stride_w + dw)]);
                out[o++] = best;
            }
        }
    }
    return out;
}

}  // namespace

VectorF layer_forward(const Layer& layer, const VectorF& x) {
    if (x.size() != layer.in_shape.count())
        throw InvalidInputError("layer_forward: input size " + std::to_string(x.size()) +
                                " does not match " + layer.in_shape.str());
    switch (layer.kind) {
        case LayerKind::affine_relu_dense:
        case LayerKind::affine_relu_conv: {
            VectorF y = layer.op->apply(x);
            for (std::size_t i = 0; i < y.size(); ++i) {
                y[i] += layer.bias0[i];
                if (y[i] < 0.0) y[i] = 0.0;
            }
            return y;
        }
        case LayerKind::affine_dense: {
            VectorF y = layer.op->apply(x);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += layer.bias0[i];
            return y;
        }
        case LayerKind::maxpool2d: return maxpool_forward(layer, x);
        case LayerKind::flatten: return x;
    }
    throw InvalidInputError("layer_forward: bad layer kind");
}

VectorF network_forward(const NetworkModel& model, const VectorF& x) {
    if (x.size() != model.input_shape.count())
        throw InvalidInputError("network_forward: input size does not match " +
                                model.input_shape.str());
    VectorF v = x;
    for (const Layer& layer : model.layers) v = layer_forward(layer, v);
    return v;
}

double maxpool_lipschitz(const Layer& layer) {
    if (layer.kind != LayerKind::maxpool2d)
        throw InvalidInputError("maxpool_lipschitz: not a maxpool layer");
    if (layer.stride_h >= layer.window_h && layer.stride_w >= layer.window_w) return 1.0;
    const std::size_t ch = (layer.window_h + layer.stride_h - 1) / layer.stride_h;
    const std::size_t cw = (layer.window_w + layer.stride_w - 1) / layer.stride_w;
    return std::sqrt(static_cast<double>(ch * cw));
}

std::string layer_method_name(LayerMethod method) {
    switch (method) {
        case LayerMethod::naive: return "naive";
        case LayerMethod::rbar: return "rbar";
        case LayerMethod::nested: return "nested";
        case LayerMethod::operator_norm: return "operator_norm";
        case LayerMethod::fixed: return "fixed";
    }
    return "?";
}

double network_lower_bound_sampled(const NetworkModel& model, const VectorF& x0, double epsilon,
                                   std::size_t n_samples, std::uint64_t seed) {
    if (x0.size() != model.input_shape.count())
        throw InvalidInputError("network_lower_bound_sampled: x0 size does not match " +
                                model.input_shape.str());
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InvalidInputError("network_lower_bound_sampled: epsilon must be finite and positive");

    const VectorF f0 = network_forward(model, x0);
    Rng rng(seed);
    double best = 0.0;
    VectorF x(x0.size());
    for (std::size_t s = 0; s < n_samples; ++s) {
        VectorF d = rng.sphere_point(x0.size(), Norm::L2, epsilon, false);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0[i] + d[i];
        VectorF f = network_forward(model, x);
        double num = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            double v = f[i] - f0[i];
            num += v * v;
        }
        double den = norm2(d);
        if (den > 0.0) best = std::max(best, std::sqrt(num) / den);
    }
    return best;
}

VectorF load_vector_f32(const std::string& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open vector file " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() != expected * 4)
        throw LoadError("vector file " + path + " holds " + std::to_string(bytes.size() / 4) +
                        " float32 values, expected " + std::to_string(expected));
    VectorF out(expected);
    for (std::size_t i = 0; i < expected; ++i) {
        std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i]) |
                          static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8 |
                          static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16 |
                          static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24;
        out[i] = static_cast<double>(std::bit_cast<float>(u));
    }
    return out;
}

PropagationTrace propagate(const NetworkModel& model, const VectorF& x0, double epsilon,
                           BoundMethod method, const BoundConfig& cfg) {
    if (x0.size() != model.input_shape.count())
        throw InvalidInputError("propagate: x0 size does not match " + model.input_shape.str());
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InvalidInputError("propagate: epsilon must be finite and positive");
    if (method == BoundMethod::lower)
        throw InvalidInputError("propagate: method must be an upper bound");

    PropagationTrace trace;
    VectorF nominal = x0;
    double eps = epsilon;
    bool prev_relu = false;

    for (std::size_t k = 0; k < model.layers.size(); ++k) {
        const Layer& layer = model.layers[k];
        PropagationRecord rec;
        rec.layer_index = k;
        rec.epsilon_in = eps;
        rec.nominal_in = nominal;
        rec.domain = PerturbationDomain{Norm::L2, eps, prev_relu};

        switch (layer.kind) {
            case LayerKind::affine_relu_dense:
            case LayerKind::affine_relu_conv: {
                AffineLayer aff = recenter(layer, nominal);
                switch (method) {
                    case BoundMethod::naive:
                        rec.L_upper = naive_bound(*aff.op, cfg);
                        rec.method = LayerMethod::naive;
                        break;
                    case BoundMethod::rbar:
                        rec.L_upper = rbar_bound(*aff.op, aff.bias, rec.domain, cfg);
                        rec.method = LayerMethod::rbar;
                        break;
                    default:
                        rec.L_upper = nested_bound(*aff.op, aff.bias, rec.domain, cfg).value;
                        rec.method = LayerMethod::nested;
                        break;
                }
                prev_relu = true;
                break;
            }
            case LayerKind::affine_dense:
                rec.L_upper = naive_bound(*layer.op, cfg);
                rec.method = LayerMethod::operator_norm;
                prev_relu = false;
                break;
            case LayerKind::maxpool2d:
                rec.L_upper = maxpool_lipschitz(layer);
                rec.method = LayerMethod::fixed;
                break;
            case LayerKind::flatten:
                rec.L_upper = 1.0;
                rec.method = LayerMethod::fixed;
                break;
        }

        nominal = layer_forward(layer, nominal);
        eps *= rec.L_upper;
        trace.product_bound *= rec.L_upper;
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

}  // namespace lipcert
