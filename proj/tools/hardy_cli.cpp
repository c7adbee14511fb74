#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "hardy/commands.hpp"
#include "hardy/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Weighted Hardy inequality checks"};
    std::string command, config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    app.add_option("command", command, "classify | transforms | verify | identities | sharpness | minimize | report");
    app.add_option("--config", config_path, "configuration file ([weight], [params], [run] sections)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for random corpora");
    app.add_option("--tol", tol, "relative pass tolerance");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hardy::kExitUsage;
    }

    hardy::RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "usage error: cannot read config " << config_path << "\n";
                return hardy::kExitUsage;
            }
            std::stringstream text;
            text << in.rdbuf();
            cfg = hardy::parse_config(text.str());
        }
    } catch (const hardy::ConfigError& e) {
        for (const auto& v : e.violations()) std::cerr << "invalid configuration: " << v << "\n";
        return hardy::kExitUsage;
    }
    if (!command.empty()) {
        cfg.command = hardy::command_from_string(command);
        if (!cfg.command) {
            std::cerr << "usage error: unknown command '" << command << "'\n";
            return hardy::kExitUsage;
        }
    }
    if (!out_dir.empty()) cfg.out = out_dir;
    if (seed) cfg.seed = *seed;
    if (tol) cfg.tol = *tol;
    return hardy::run_command(cfg, std::cout, std::cerr);
}
