// poissonbath_cli.cpp — Command-line front end: <tool> <subcommand> --config path.json [--out dir] [--validate-only]

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "poissonbath/experiment.hpp"

namespace ex = poissonbath::experiment;

namespace {

int fail(const std::exception& e) {
    std::cerr << ex::error_record(e).dump() << '\n';
    return ex::exit_code_for(e);
}

int execute(ex::Kind kind, const std::string& config_path, const std::string& out, bool validate_only) {
    try {
        const ex::json cfg = ex::load_config(config_path);
        const std::filesystem::path base = std::filesystem::path(config_path).parent_path();
        if (validate_only) {
            ex::validate_config(kind, cfg, base.empty() ? "." : base);
            std::cout << ex::json{{"status", "valid"}, {"experiment", ex::to_string(kind)}}.dump() << '\n';
            return ex::ok;
        }
        const auto dir = ex::output_dir(cfg, kind, out.empty() ? std::nullopt : std::optional<std::filesystem::path>(out));
        const auto [summary, code] = ex::run_experiment(kind, cfg, dir, base.empty() ? "." : base);
        std::cout << ex::json{{"status", code == ex::ok ? "ok" : "failed"},
                              {"experiment", ex::to_string(kind)},
                              {"output", dir.string()},
                              {"exit_code", code}}
                         .dump()
                  << '\n';
        return code;
    } catch (const std::exception& e) {
        return fail(e);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson-noise open quantum system experiments"};
    app.require_subcommand(1);

    std::string config, out;
    bool validate_only = false;
    int code = ex::ok;

    for (const auto& [name, kind] : ex::kind_names()) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
        sub->add_option("--config", config, "experiment configuration (JSON)")->required();
        sub->add_option("--out", out, "output directory (overrides the config's \"output\")");
        sub->add_flag("--validate-only", validate_only, "parse and check the configuration without running it");
        sub->callback([&, k = kind] { code = execute(k, config, out, validate_only); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return ex::config_parse_error;
    }
    return code;
}
