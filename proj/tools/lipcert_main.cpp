#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lipcert/cli.hpp"

namespace {

std::vector<lipcert::BoundMethod> parse_methods(const std::string& text) {
    std::vector<lipcert::BoundMethod> methods;
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ',')) {
        if (!piece.empty()) methods.push_back(lipcert::method_from_name(piece));
    }
    if (methods.empty()) throw lipcert::InvalidInputError("--methods: empty list");
    return methods;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified local Lipschitz bounds for affine-ReLU layers and networks"};
    app.require_subcommand(1);

    lipcert::BoundCommand bound_cmd;
    std::string grid_text = "0.1:10:log:5";
    std::string methods_text = "naive,rbar,nested,lower";
    long long layer_index = -1;
    bool net_mode = false;
    CLI::App* bound = app.add_subcommand("bound", "Sweep bounds over an epsilon grid, emit CSV");
    bound->add_option("--model", bound_cmd.model_path, "Model manifest path")->required();
    bound->add_option("--x0", bound_cmd.x0_path, "Nominal input file, or 'zeros'");
    bound->add_option("--grid", grid_text, "Epsilon grid start:stop:scale:points");
    bound->add_option("--methods", methods_text, "Comma list from naive,rbar,nested,lower");
    bound->add_option("--layer", layer_index, "Single-layer mode: bound this layer index");
    bound->add_flag("--net", net_mode, "Whole-network mode: propagated products");
    bound->add_option("--samples", bound_cmd.samples, "Samples for the lower bound");
    bound->add_option("--seed", bound_cmd.seed, "Sampling seed");
    bound->add_option("--spectral-slack", bound_cmd.spectral_slack,
                      "Relative slack applied to each spectral norm");
    bound->add_option("--out", bound_cmd.out_path, "CSV output path (default stdout)");

    lipcert::VerifyCommand verify_cmd;
    std::string verify_model;
    CLI::App* verify = app.add_subcommand("verify", "Cross-check bounds against brute-force oracles");
    verify->add_option("--model", verify_model, "Verify this model's affine layers instead");
    verify->add_option("--instances", verify_cmd.instances, "Generated instance count");
    verify->add_option("--seed", verify_cmd.seed, "Instance generator seed");
    verify->add_option("--samples", verify_cmd.samples, "Samples per oracle estimate");
    verify->add_option("--spectral-slack", verify_cmd.spectral_slack,
                       "Relative slack applied to each spectral norm");

    lipcert::DescribeCommand describe_cmd;
    CLI::App* describe = app.add_subcommand("describe", "Print per-layer model summary");
    describe->add_option("--model", describe_cmd.model_path, "Model manifest path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return lipcert::kExitInputError;
    }

    try {
        if (bound->parsed()) {
            if (net_mode == (layer_index >= 0)) {
                std::cerr << "error: choose exactly one of --layer K or --net\n";
                return lipcert::kExitInputError;
            }
            if (layer_index >= 0) bound_cmd.layer = static_cast<std::size_t>(layer_index);
            bound_cmd.grid = lipcert::EpsilonGrid::parse(grid_text);
            bound_cmd.methods = parse_methods(methods_text);
            return lipcert::run_bound(bound_cmd, std::cout, std::cerr);
        }
        if (verify->parsed()) {
            if (!verify_model.empty()) verify_cmd.model_path = verify_model;
            return lipcert::run_verify(verify_cmd, std::cout, std::cerr);
        }
        return lipcert::run_describe(describe_cmd, std::cout, std::cerr);
    } catch (const lipcert::InvalidInputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lipcert::kExitInputError;
    }
}
