// Generates the model fixtures used by the tests: small hand-built layers,
// a mixed-sign conv layer, and random-weight networks shaped like the usual
// MNIST/CIFAR-10 LeNet-style stacks.

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "lipcert/network.hpp"
#include "lipcert/random.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using lipcert::Rng;
using lipcert::VectorF;

namespace {

std::vector<unsigned char> f32_bytes(const VectorF& v) {
    std::vector<unsigned char> bytes;
    bytes.reserve(v.size() * 4);
    for (double d : v) {
        const std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(d));
        bytes.push_back(static_cast<unsigned char>(u & 0xff));
        bytes.push_back(static_cast<unsigned char>((u >> 8) & 0xff));
        bytes.push_back(static_cast<unsigned char>((u >> 16) & 0xff));
        bytes.push_back(static_cast<unsigned char>((u >> 24) & 0xff));
    }
    return bytes;
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        std::cerr << "mkfixtures: cannot write " << path << "\n";
        std::exit(1);
    }
}

// Writes the weight/bias files for one affine layer and fills in the manifest
// entry's file names and checksum.
void emit_affine(const fs::path& dir, const std::string& stem, std::size_t idx, const VectorF& w,
                 const VectorF& b, json& layer) {
    const auto wb = f32_bytes(w);
    const auto bb = f32_bytes(b);
    const std::string wfile = stem + "_w" + std::to_string(idx) + ".bin";
    const std::string bfile = stem + "_b" + std::to_string(idx) + ".bin";
    write_bytes(dir / wfile, wb);
    write_bytes(dir / bfile, bb);
    auto all = wb;
    all.insert(all.end(), bb.begin(), bb.end());
    layer["weights_file"] = wfile;
    layer["bias_file"] = bfile;
    layer["sha256"] = lipcert::sha256_hex(all.data(), all.size());
}

void write_manifest(const fs::path& dir, const std::string& name, json doc) {
    std::ofstream out(dir / (name + ".json"));
    out << doc.dump(2) << "\n";
    if (!out) {
        std::cerr << "mkfixtures: cannot write manifest " << name << "\n";
        std::exit(1);
    }
}

json dense_layer(const char* kind, std::size_t out_features) {
    json layer;
    layer["kind"] = kind;
    layer["out_features"] = out_features;
    return layer;
}

json conv_layer(std::size_t out_channels, std::size_t k, std::size_t stride, std::size_t pad) {
    json layer;
    layer["kind"] = "affine_relu_conv";
    layer["out_channels"] = out_channels;
    layer["kernel"] = json::array({k, k});
    layer["stride"] = json::array({stride, stride});
    layer["padding"] = json::array({pad, pad});
    return layer;
}

json maxpool_layer(std::size_t window, std::size_t stride) {
    json layer;
    layer["kind"] = "maxpool2d";
    layer["window"] = json::array({window, window});
    layer["stride"] = json::array({stride, stride});
    return layer;
}

void make_identity(const fs::path& dir) {
    json layer = dense_layer("affine_relu_dense", 2);
    emit_affine(dir, "identity", 0, {1.0, 0.0, 0.0, 1.0}, {10.0, 10.0}, layer);
    json doc;
    doc["name"] = "identity";
    doc["input_shape"] = json::array({2});
    doc["layers"] = json::array({layer});
    write_manifest(dir, "identity", doc);
}

void make_diag21(const fs::path& dir) {
    json layer = dense_layer("affine_relu_dense", 2);
    emit_affine(dir, "diag21", 0, {2.0, 0.0, 0.0, 1.0}, {-1.0, 0.0}, layer);
    json doc;
    doc["name"] = "diag21";
    doc["input_shape"] = json::array({2});
    doc["layers"] = json::array({layer});
    write_manifest(dir, "diag21", doc);
}

// One 3x3 pad-1 conv with per-channel biases chosen so that for tiny epsilon
// only the deliberately weak channel 0 stays active, while for large epsilon
// every crossing lands near beta = 0 and the full-mask segment dominates.
void make_convmix(const fs::path& dir) {
    Rng rng(1101);
    const std::size_t cin = 2, cout = 4, k = 3;
    const double scales[4] = {0.25, 1.0, 1.0, 1.0};
    VectorF w;
    w.reserve(cout * cin * k * k);
    for (std::size_t c = 0; c < cout; ++c) {
        VectorF block = rng.normal_vector(cin * k * k, scales[c] / std::sqrt(18.0));
        w.insert(w.end(), block.begin(), block.end());
    }
    VectorF b = {0.6, -0.8, -1.2, -2.0};
    json layer = conv_layer(cout, k, 1, 1);
    emit_affine(dir, "convmix", 0, w, b, layer);
    json doc;
    doc["name"] = "convmix";
    doc["input_shape"] = json::array({2, 12, 12});
    doc["layers"] = json::array({layer});
    write_manifest(dir, "convmix", doc);
}

void make_threelayer(const fs::path& dir) {
    Rng rng(1301);
    json layers = json::array();

    json l0 = dense_layer("affine_relu_dense", 12);
    emit_affine(dir, "threelayer", 0, rng.normal_vector(12 * 6, 1.0 / std::sqrt(6.0)),
                rng.normal_vector(12, 0.5), l0);
    layers.push_back(l0);

    json l1 = dense_layer("affine_relu_dense", 10);
    emit_affine(dir, "threelayer", 1, rng.normal_vector(10 * 12, 1.0 / std::sqrt(12.0)),
                rng.normal_vector(10, 0.5), l1);
    layers.push_back(l1);

    json l2 = dense_layer("affine_dense", 4);
    emit_affine(dir, "threelayer", 2, rng.normal_vector(4 * 10, 1.0 / std::sqrt(10.0)),
                rng.normal_vector(4, 0.5), l2);
    layers.push_back(l2);

    json doc;
    doc["name"] = "threelayer";
    doc["input_shape"] = json::array({6});
    doc["layers"] = layers;
    write_manifest(dir, "threelayer", doc);
}

void make_mnist(const fs::path& dir) {
    Rng rng(2001);
    json layers = json::array();

    json l0 = conv_layer(6, 5, 1, 0);
    emit_affine(dir, "mnist", 0, rng.normal_vector(6 * 1 * 5 * 5, 1.0 / 5.0),
                rng.normal_vector(6, 0.5), l0);
    layers.push_back(l0);
    layers.push_back(maxpool_layer(2, 2));

    json l2 = conv_layer(16, 5, 1, 0);
    emit_affine(dir, "mnist", 2, rng.normal_vector(16 * 6 * 5 * 5, 1.0 / std::sqrt(150.0)),
                rng.normal_vector(16, 0.5), l2);
    layers.push_back(l2);
    layers.push_back(maxpool_layer(2, 2));

    json l4 = dense_layer("affine_relu_dense", 120);
    emit_affine(dir, "mnist", 4, rng.normal_vector(120 * 256, 1.0 / 16.0),
                rng.normal_vector(120, 0.5), l4);
    layers.push_back(l4);

    json l5 = dense_layer("affine_relu_dense", 84);
    emit_affine(dir, "mnist", 5, rng.normal_vector(84 * 120, 1.0 / std::sqrt(120.0)),
                rng.normal_vector(84, 0.5), l5);
    layers.push_back(l5);

    json l6 = dense_layer("affine_dense", 10);
    emit_affine(dir, "mnist", 6, rng.normal_vector(10 * 84, 1.0 / std::sqrt(84.0)),
                rng.normal_vector(10, 0.5), l6);
    layers.push_back(l6);

    json doc;
    doc["name"] = "mnist-net";
    doc["input_shape"] = json::array({1, 28, 28});
    doc["layers"] = layers;
    write_manifest(dir, "mnist-net", doc);

    VectorF x0(28 * 28);
    for (double& v : x0) v = rng.uniform();
    write_bytes(dir / "mnist-x0.bin", f32_bytes(x0));
}

void make_cifar10(const fs::path& dir) {
    Rng rng(3001);
    json layers = json::array();
    const struct {
        std::size_t cout, cin;
    } convs[4] = {{32, 3}, {32, 32}, {64, 32}, {64, 64}};

    std::size_t idx = 0;
    for (int block = 0; block < 2; ++block) {
        for (int rep = 0; rep < 2; ++rep) {
            const auto& c = convs[2 * block + rep];
            json layer = conv_layer(c.cout, 3, 1, 1);
            emit_affine(dir, "cifar10", idx, rng.normal_vector(c.cout * c.cin * 9, 1.0 / (3.0 * std::sqrt(static_cast<double>(c.cin)))),
                        rng.normal_vector(c.cout, 0.5), layer);
            layers.push_back(layer);
            ++idx;
        }
        layers.push_back(maxpool_layer(2, 2));
        ++idx;
    }

    json l6 = dense_layer("affine_relu_dense", 512);
    emit_affine(dir, "cifar10", idx++, rng.normal_vector(512 * 4096, 1.0 / 64.0),
                rng.normal_vector(512, 0.5), l6);
    layers.push_back(l6);

    json l7 = dense_layer("affine_dense", 10);
    emit_affine(dir, "cifar10", idx, rng.normal_vector(10 * 512, 1.0 / std::sqrt(512.0)),
                rng.normal_vector(10, 0.5), l7);
    layers.push_back(l7);

    json doc;
    doc["name"] = "cifar10-net";
    doc["input_shape"] = json::array({3, 32, 32});
    doc["layers"] = layers;
    write_manifest(dir, "cifar10-net", doc);
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures");
    fs::create_directories(dir);
    make_identity(dir);
    make_diag21(dir);
    make_convmix(dir);
    make_threelayer(dir);
    make_mnist(dir);
    make_cifar10(dir);
    std::cout << "fixtures written to " << dir.string() << "\n";
    return 0;
}
