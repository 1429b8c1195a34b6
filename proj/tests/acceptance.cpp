// Acceptance gate: one line per criterion, nonzero exit if any fail.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lipcert/cli.hpp"
#include "lipcert/oracle.hpp"
#include "lipcert/random.hpp"

using namespace lipcert;

namespace fs = std::filesystem;

namespace {

std::string fixture(const char* name) {
    return std::string(LIPCERT_FIXTURES_DIR) + "/" + name;
}

// a <= b up to 1e-6 relative slack.
bool leq_rel(double a, double b) {
    return a <= b + 1e-6 * std::max(std::abs(a), std::abs(b));
}

struct Criterion {
    int number = 0;
    std::string label;
    double time_limit = 0.0;  // seconds; 0 = unlimited
    std::function<bool(std::string&)> body;
};

bool criterion_chain(std::string& detail) {
    for (std::size_t i = 0; i < 200; ++i) {
        OracleInstance inst = make_instance(7, i);
        BoundReport rep = bound_report(*inst.op, inst.bias, inst.dom, {}, 5000, 7 + i);
        if (!leq_rel(rep.rbar, rep.naive) || !leq_rel(rep.nested, rep.rbar) ||
            !leq_rel(rep.lower, rep.nested)) {
            std::ostringstream msg;
            msg << "instance " << i << " (" << inst.description << "): naive=" << rep.naive
                << " rbar=" << rep.rbar << " nested=" << rep.nested << " lower=" << rep.lower;
            detail = msg.str();
            return false;
        }
    }
    return true;
}

bool criterion_oracle_norms(std::string& detail) {
    Rng rng(0xACCE55);
    PowerIterConfig power;
    power.iterations = 2000;
    for (std::size_t i = 0; i < 100; ++i) {
        std::size_t m = 1 + rng.index(64);
        std::size_t n = 1 + rng.index(64);
        DenseOperator op(m, n, rng.normal_vector(m * n));
        ReluMask mask(m);
        if (i % 3 == 0) {
            mask = ReluMask(m, true);
        } else {
            for (std::size_t r = 0; r < m; ++r) mask.set(r, rng.uniform() < 0.7);
            if (mask.none()) mask.set(rng.index(m), true);
        }
        double oracle = dense_spectral_norm(op, mask);
        double estimate = masked_spectral_norm(op, mask, power);
        if (std::abs(estimate - oracle) > 1e-6 * std::max(1e-12, oracle)) {
            std::ostringstream msg;
            msg << "instance " << i << " (" << m << "x" << n << ", " << mask.count()
                << " active rows): dense=" << oracle << " power=" << estimate
                << " relerr=" << std::abs(estimate - oracle) / oracle;
            detail = msg.str();
            return false;
        }
    }
    return true;
}

bool criterion_hand_instance(std::string& detail) {
    DenseOperator op = DenseOperator::diagonal({2.0, 1.0});
    VectorF bias = {-1.0, 0.0};
    PerturbationDomain dom{Norm::L2, 1.0, false};
    BoundConfig cfg;
    cfg.spectral_slack = 0.0;

    BoundingVertex bv = bounding_vector(op, bias, dom);
    NestedResult nested = nested_bound(op, bias, dom, cfg);
    double rbar = rbar_bound(op, bias, dom, cfg);
    double naive = naive_bound(op, cfg);

    std::ostringstream msg;
    bool ok = true;
    if (std::abs(bv.l[0] - 2.0) > 1e-9 || std::abs(bv.l[1] - 1.0) > 1e-9) {
        msg << "l=(" << bv.l[0] << "," << bv.l[1] << ") want (2,1); ";
        ok = false;
    }
    if (nested.schedule.betas.size() != 2 || std::abs(nested.schedule.betas[0] - 0.5) > 1e-9 ||
        std::abs(nested.schedule.betas[1] - 1.0) > 1e-9) {
        msg << "breakpoints want [0.5,1]; ";
        ok = false;
    }
    if (std::abs(nested.value - 1.5) > 1e-9) {
        msg << "nested=" << nested.value << " want 1.5; ";
        ok = false;
    }
    if (std::abs(rbar - 2.0) > 1e-9) {
        msg << "rbar=" << rbar << " want 2; ";
        ok = false;
    }
    if (std::abs(naive - 2.0) > 1e-9) {
        msg << "naive=" << naive << " want 2; ";
        ok = false;
    }
    detail = msg.str();
    return ok;
}

bool criterion_epsilon_sweep(std::string& detail) {
    NetworkModel model = load_model(fixture("convmix.json"));
    AffineLayer layer = recenter(model.layers[0], VectorF(model.input_shape.count(), 0.0));
    BoundConfig cfg;
    double naive = naive_bound(*layer.op, cfg);

    EpsilonGrid grid;
    grid.start = 1e-3;
    grid.stop = 1e3;
    grid.points = 20;
    std::vector<double> nested;
    for (double eps : grid.values()) {
        PerturbationDomain dom{Norm::L2, eps, false};
        nested.push_back(nested_bound(*layer.op, layer.bias, dom, cfg).value);
    }

    std::ostringstream msg;
    for (std::size_t i = 1; i < nested.size(); ++i) {
        if (nested[i] < nested[i - 1] - 1e-12 * nested[i - 1]) {
            msg << "nested decreased between grid points " << i - 1 << " and " << i << " ("
                << nested[i - 1] << " -> " << nested[i] << ")";
            detail = msg.str();
            return false;
        }
    }
    if (nested.back() < 0.99 * naive) {
        msg << "nested(1e3)=" << nested.back() << " < 0.99*naive=" << 0.99 * naive;
        detail = msg.str();
        return false;
    }
    if (nested.front() > 0.9 * naive) {
        msg << "nested(1e-3)=" << nested.front() << " > 0.9*naive=" << 0.9 * naive;
        detail = msg.str();
        return false;
    }
    return true;
}

bool criterion_linops(std::string& detail) {
    Rng rng(0xC0DEC);
    for (std::size_t i = 0; i < 50; ++i) {
        // First 30 iterations sweep the full kernel/stride/padding grid; the
        // rest wrap around with fresh random geometry.
        std::size_t k = 1 + i % 5;
        std::size_t stride = 1 + (i / 5) % 2;
        std::size_t pad = (i / 10) % 3;
        std::size_t cin = 1 + rng.index(3);
        std::size_t cout = 1 + rng.index(3);
        std::size_t h = 5 + rng.index(3);
        std::size_t w = 5 + rng.index(3);
        Conv2dOperator conv(TensorShape{{cin, h, w}}, rng.normal_vector(cout * cin * k * k), cout,
                            k, k, stride, stride, pad, pad);

        std::ostringstream where;
        where << "conv cin=" << cin << " " << h << "x" << w << " cout=" << cout << " k=" << k
              << " s=" << stride << " p=" << pad;

        std::size_t hout = (h + 2 * pad - k) / stride + 1;
        std::size_t wout = (w + 2 * pad - k) / stride + 1;
        if (conv.out_shape() != TensorShape{{cout, hout, wout}}) {
            detail = where.str() + ": output shape mismatch";
            return false;
        }

        VectorF u = rng.normal_vector(conv.cols());
        VectorF v = rng.normal_vector(conv.rows());
        VectorF au = conv.apply(u);
        VectorF atv(conv.cols());
        conv.apply_adjoint_into(v, atv);
        if (std::abs(dot(au, v) - dot(u, atv)) > 1e-9 * (norm2(au) * norm2(v) + 1.0)) {
            detail = where.str() + ": adjoint identity violated";
            return false;
        }

        DenseOperator dense = materialize(conv);
        VectorF via_dense = dense.apply(u);
        for (std::size_t j = 0; j < au.size(); ++j) {
            if (std::abs(au[j] - via_dense[j]) > 1e-10) {
                detail = where.str() + ": materialization differs from direct apply";
                return false;
            }
        }

        std::vector<std::size_t> idx = {0, conv.rows() / 2, conv.rows() - 1};
        std::vector<VectorF> rows = extract_rows(conv, idx);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            for (std::size_t c = 0; c < conv.cols(); ++c) {
                if (std::abs(rows[r][c] - dense.at(idx[r], c)) > 1e-12) {
                    detail = where.str() + ": extracted row differs from materialization";
                    return false;
                }
            }
        }
    }
    return true;
}

bool criterion_network(std::string& detail) {
    NetworkModel model = load_model(fixture("mnist-net.json"));
    VectorF x0(model.input_shape.count(), 0.0);
    for (double eps : {0.01, 1.0, 100.0}) {
        double upper = propagate(model, x0, eps, BoundMethod::nested).product_bound;
        double lower = network_lower_bound_sampled(model, x0, eps, 10000, 33);
        if (upper < lower) {
            std::ostringstream msg;
            msg << "eps=" << eps << ": certified " << upper << " < sampled " << lower;
            detail = msg.str();
            return false;
        }
    }
    return true;
}

bool criterion_rmax(std::string& detail) {
    Rng rng(0xB0A7);
    for (std::size_t i = 0; i < 50; ++i) {
        std::size_t m = 1 + rng.index(10);
        std::size_t n = 1 + rng.index(10);
        DenseOperator op(m, n, rng.normal_vector(m * n));
        VectorF bias = rng.normal_vector(m, i % 3 == 0 ? 0.05 : 1.0);
        PerturbationDomain dom{static_cast<Norm>(i % 3), 0.5 + rng.uniform(), i % 2 == 1};

        RmaxResult ex = rmax_bound_enumerated(op, bias, dom, 0, 10, RmaxMode::exhaustive);
        RmaxResult sm = rmax_bound_enumerated(op, bias, dom, 500, 10, RmaxMode::sampled, 3 + i);
        double rbar = rbar_bound(op, bias, dom);
        std::ostringstream msg;
        if (sm.value > ex.value + 1e-12) {
            msg << "instance " << i << ": sampled rmax " << sm.value << " > exhaustive "
                << ex.value;
            detail = msg.str();
            return false;
        }
        if (rbar < sm.value - 1e-9) {
            msg << "instance " << i << ": rbar " << rbar << " < sampled rmax " << sm.value;
            detail = msg.str();
            return false;
        }
    }
    return true;
}

bool criterion_determinism(std::string& detail) {
    fs::path dir = fs::temp_directory_path() / "lipcert_acceptance";
    fs::create_directories(dir);

    auto run = [&](const std::string& args, const fs::path& out) {
        std::string cmd = std::string(LIPCERT_CLI_PATH) + " " + args + " --out " + out.string() +
                          " >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    };
    auto strip_seconds = [](const fs::path& path) {
        std::ifstream in(path);
        std::string text, line;
        while (std::getline(in, line)) {
            text += line.substr(0, line.rfind(','));
            text += '\n';
        }
        return text;
    };

    const std::string net_args =
        "bound --model " + fixture("threelayer.json") + " --net --grid 0.5:2:log:3 --seed 11";
    const std::string layer_args = "bound --model " + fixture("diag21.json") +
                                   " --layer 0 --grid 0.25:4:log:4 --seed 12 --samples 2000";

    if (!run(net_args, dir / "net_a.csv") || !run(net_args, dir / "net_b.csv") ||
        !run(layer_args, dir / "layer_a.csv") || !run(layer_args, dir / "layer_b.csv")) {
        detail = "CLI invocation failed";
        return false;
    }
    if (strip_seconds(dir / "net_a.csv") != strip_seconds(dir / "net_b.csv")) {
        detail = "network-mode CSVs differ beyond the seconds column";
        return false;
    }
    if (strip_seconds(dir / "layer_a.csv") != strip_seconds(dir / "layer_b.csv")) {
        detail = "layer-mode CSVs differ beyond the seconds column";
        return false;
    }
    std::string head;
    std::ifstream in(dir / "net_a.csv");
    std::getline(in, head);
    if (head != "epsilon,scope,method,value,seconds") {
        detail = "unexpected CSV header: " + head;
        return false;
    }
    return true;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "bound chain naive >= rbar >= nested >= lower on 200 instances", 60.0,
         criterion_chain},
        {2, "power iteration vs dense eigensolver, 100 instances up to 64x64", 30.0,
         criterion_oracle_norms},
        {3, "hand instance diag(2,1), bias (-1,0)", 0.0, criterion_hand_instance},
        {4, "nested bound epsilon sweep on the conv fixture", 120.0, criterion_epsilon_sweep},
        {5, "conv adjoint/materialization invariants, 50 configurations", 60.0, criterion_linops},
        {6, "network propagation dominates the end-to-end sampled bound", 600.0,
         criterion_network},
        {7, "mask enumeration bracket on 50 instances", 0.0, criterion_rmax},
        {8, "CSV output reproducible modulo the seconds column", 0.0, criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && c.time_limit > 0.0 && elapsed > c.time_limit) {
            ok = false;
            std::ostringstream msg;
            msg << "exceeded time limit of " << c.time_limit << "s";
            detail = msg.str();
        }
        std::printf("criterion %d: %s — %s (%.2fs)%s%s\n", c.number, ok ? "PASS" : "FAIL",
                    c.label.c_str(), elapsed, detail.empty() ? "" : " :: ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
