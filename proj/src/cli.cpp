#include "lipcert/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lipcert/oracle.hpp"

namespace lipcert {

namespace {

void check_grid(const EpsilonGrid& grid) {
    if (!(grid.start > 0.0) || !std::isfinite(grid.start))
        throw InvalidInputError("grid: start must be finite and positive");
    if (!(grid.stop >= grid.start) || !std::isfinite(grid.stop))
        throw InvalidInputError("grid: stop must be >= start");
    if (grid.points == 0) throw InvalidInputError("grid: need at least one point");
}

std::string fmt_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_seconds(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<double> EpsilonGrid::values() const {
    check_grid(*this);
    std::vector<double> out;
    if (points == 1) {
        out.push_back(start);
        return out;
    }
    for (std::size_t i = 0; i < points; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(points - 1);
        out.push_back(scale == Scale::log ? start * std::pow(stop / start, t)
                                          : start + t * (stop - start));
    }
    out.back() = stop;
    return out;
}

EpsilonGrid EpsilonGrid::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::string piece;
    std::istringstream in(text);
    while (std::getline(in, piece, ':')) parts.push_back(piece);
    if (parts.size() != 4)
        throw InvalidInputError("grid '" + text + "': expected start:stop:scale:points");

    EpsilonGrid grid;
    try {
        grid.start = std::stod(parts[0]);
        grid.stop = std::stod(parts[1]);
        grid.points = std::stoul(parts[3]);
    } catch (const std::exception&) {
        throw InvalidInputError("grid '" + text + "': unparsable number");
    }
    if (parts[2] == "log")
        grid.scale = Scale::log;
    else if (parts[2] == "linear")
        grid.scale = Scale::linear;
    else
        throw InvalidInputError("grid '" + text + "': scale must be log or linear");
    check_grid(grid);
    return grid;
}

namespace {

std::vector<BoundMethod> canonical_methods(const std::vector<BoundMethod>& requested) {
    std::vector<BoundMethod> out;
    for (BoundMethod m : {BoundMethod::naive, BoundMethod::rbar, BoundMethod::nested,
                          BoundMethod::lower}) {
        if (std::find(requested.begin(), requested.end(), m) != requested.end()) out.push_back(m);
    }
    if (out.empty()) throw InvalidInputError("no bound methods requested");
    return out;
}

VectorF nominal_input(const BoundCommand& cmd, const NetworkModel& model) {
    if (cmd.x0_path == "zeros") return VectorF(model.input_shape.count(), 0.0);
    return load_vector_f32(cmd.x0_path, model.input_shape.count());
}

int run_bound_inner(const BoundCommand& cmd, std::ostream& csv) {
    NetworkModel model = load_model(cmd.model_path);
    VectorF x0 = nominal_input(cmd, model);
    std::vector<BoundMethod> methods = canonical_methods(cmd.methods);
    std::vector<double> grid = cmd.grid.values();

    BoundConfig cfg;
    cfg.spectral_slack = cmd.spectral_slack;

    std::string scope;
    // Layer mode: the nominal and orthant flag the layer would see during
    // propagation, with epsilon taken directly from the grid.
    std::shared_ptr<const LinearOperator> layer_op;
    VectorF layer_bias;
    bool layer_nonneg = false;
    if (cmd.layer) {
        const std::size_t k = *cmd.layer;
        if (k >= model.layers.size())
            throw InvalidInputError("layer " + std::to_string(k) + " out of range; model has " +
                                    std::to_string(model.layers.size()) + " layers");
        const Layer& layer = model.layers[k];
        if (layer.kind != LayerKind::affine_relu_dense && layer.kind != LayerKind::affine_relu_conv)
            throw InvalidInputError("layer " + std::to_string(k) + " (" + layer.label +
                                    ") is not an affine-ReLU layer");
        VectorF nominal = x0;
        bool prev_relu = false;
        for (std::size_t i = 0; i < k; ++i) {
            const Layer& before = model.layers[i];
            nominal = layer_forward(before, nominal);
            if (before.is_affine())
                prev_relu = before.kind != LayerKind::affine_dense;
        }
        AffineLayer aff = recenter(layer, nominal);
        layer_op = aff.op;
        layer_bias = std::move(aff.bias);
        layer_nonneg = prev_relu;
        scope = std::to_string(k);
    } else {
        scope = "net";
    }

    csv << "epsilon,scope,method,value,seconds\n";
    for (double eps : grid) {
        for (BoundMethod method : methods) {
            auto t0 = std::chrono::steady_clock::now();
            double value = 0.0;
            if (cmd.layer) {
                PerturbationDomain dom{Norm::L2, eps, layer_nonneg};
                switch (method) {
                    case BoundMethod::naive: value = naive_bound(*layer_op, cfg); break;
                    case BoundMethod::rbar: value = rbar_bound(*layer_op, layer_bias, dom, cfg); break;
                    case BoundMethod::nested:
                        value = nested_bound(*layer_op, layer_bias, dom, cfg).value;
                        break;
                    case BoundMethod::lower:
                        value = lower_bound_sampled(*layer_op, layer_bias, dom, cmd.samples,
                                                    cmd.seed);
                        break;
                }
            } else {
                if (method == BoundMethod::lower)
                    value = network_lower_bound_sampled(model, x0, eps, cmd.samples, cmd.seed);
                else
                    value = propagate(model, x0, eps, method, cfg).product_bound;
            }
            csv << fmt_value(eps) << ',' << scope << ',' << method_name(method) << ','
                << fmt_value(value) << ',' << fmt_seconds(seconds_since(t0)) << '\n';
        }
    }
    return kExitOk;
}

}  // namespace

int run_bound(const BoundCommand& cmd, std::ostream& out, std::ostream& err) {
    try {
        if (!cmd.out_path.empty()) {
            std::ofstream file(cmd.out_path);
            if (!file) throw InvalidInputError("cannot open output file " + cmd.out_path);
            return run_bound_inner(cmd, file);
        }
        return run_bound_inner(cmd, out);
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitCapacityError;
    } catch (const InvalidInputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const LoadError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

namespace {

struct InstanceOutcome {
    bool pass = true;
    std::string failures;
};

InstanceOutcome run_reports(const std::vector<OracleReport>& reports) {
    InstanceOutcome outcome;
    for (const OracleReport& r : reports) {
        if (!r.pass) {
            outcome.pass = false;
            outcome.failures += " [" + quantity_name(r.quantity) +
                                " oracle=" + fmt_value(r.oracle_value) +
                                " certified=" + fmt_value(r.certified_value) + "]";
        }
    }
    return outcome;
}

}  // namespace

int run_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err) {
    try {
        BoundConfig cfg;
        cfg.spectral_slack = cmd.spectral_slack;
        std::size_t passed = 0, failed = 0;

        if (cmd.model_path) {
            NetworkModel model = load_model(*cmd.model_path);
            VectorF nominal(model.input_shape.count(), 0.0);
            bool prev_relu = false;
            for (std::size_t k = 0; k < model.layers.size(); ++k) {
                const Layer& layer = model.layers[k];
                if (layer.is_affine()) {
                    AffineLayer aff = recenter(layer, nominal);
                    PerturbationDomain dom{Norm::L2, 1.0, prev_relu};
                    auto reports =
                        verify_instance(*aff.op, aff.bias, dom, cfg, cmd.samples, cmd.seed + k);
                    InstanceOutcome outcome = run_reports(reports);
                    (outcome.pass ? passed : failed) += 1;
                    out << "layer " << k << ": " << (outcome.pass ? "PASS" : "FAIL")
                        << outcome.failures << " (" << layer.label << ")\n";
                    prev_relu = layer.kind != LayerKind::affine_dense;
                }
                nominal = layer_forward(layer, nominal);
            }
        } else {
            for (std::size_t i = 0; i < cmd.instances; ++i) {
                OracleInstance inst = make_instance(cmd.seed, i);
                auto reports =
                    verify_instance(*inst.op, inst.bias, inst.dom, cfg, cmd.samples, cmd.seed + i);
                InstanceOutcome outcome = run_reports(reports);
                (outcome.pass ? passed : failed) += 1;
                out << "instance " << i << ": " << (outcome.pass ? "PASS" : "FAIL")
                    << outcome.failures << " (" << inst.description << ")\n";
            }
        }

        err << "verify: " << passed << " passed, " << failed << " failed\n";
        return failed == 0 ? kExitOk : kExitVerifyFailed;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitCapacityError;
    } catch (const InvalidInputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const LoadError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

int run_describe(const DescribeCommand& cmd, std::ostream& out, std::ostream& err) {
    try {
        NetworkModel model = load_model(cmd.model_path);
        for (std::size_t k = 0; k < model.layers.size(); ++k) {
            const Layer& layer = model.layers[k];
            out << "[" << k << "] " << layer_kind_name(layer.kind) << " in=" << layer.in_shape.str()
                << " out=" << layer.out_shape.str() << " params=" << layer.param_count();
            if (layer.is_affine())
                out << " op=" << layer.op->rows() << "x" << layer.op->cols();
            out << " " << layer.label << "\n";
        }
        return kExitOk;
    } catch (const LoadError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const InvalidInputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

}  // namespace lipcert
