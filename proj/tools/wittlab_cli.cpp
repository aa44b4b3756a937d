#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wittlab/run.hpp"

namespace {

int run_config(const std::string& config_path, const std::string& out_path, uint64_t seed,
               int verbosity, const std::string& expect_family) {
    wittlab::json config;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config: " << config_path << "\n";
            return 2;
        }
        in >> config;
    } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    }
    if (!expect_family.empty() && config.contains("command")) {
        std::string cmd = config.at("command").get<std::string>();
        bool match = cmd.rfind(expect_family, 0) == 0;
        if (!match) {
            std::cerr << "config command '" << cmd << "' does not belong to subcommand '"
                      << expect_family << "'\n";
            return 2;
        }
    }
    auto res = wittlab::run(config, seed, verbosity);
    std::string text = res.bundle.dump(2);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << text << "\n";
    } else {
        std::cout << text << "\n";
    }
    if (verbosity >= 1) {
        std::cerr << (res.ok ? "all assertions passed" : "ASSERTION FAILURES") << "\n";
    }
    return res.ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Witt-vector arithmetic, deformed exponentials, framed group laws "
                 "and Kummer isogeny checks"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path, out_path;
    uint64_t seed = 0;
    int verbosity = 0;
    app.add_option("--config", config_path, "JSON config file")->required(false);
    app.add_option("--out", out_path, "write the result bundle here instead of stdout");
    app.add_option("--seed", seed, "seed for deterministic sampling");
    app.add_option("--verbosity", verbosity, "0 = bundle only, 1 = summary, 2 = timing");

    std::string family;
    for (const char* name : {"witt", "exp", "tower", "kummer", "tprime"}) {
        auto* sub = app.add_subcommand(name, std::string("run a ") + name + ".* config");
        sub->callback([&family, name] { family = name; });
    }

    CLI11_PARSE(app, argc, argv);

    if (config_path.empty()) {
        std::cerr << app.help() << "\n";
        return 2;
    }
    return run_config(config_path, out_path, seed, verbosity, family);
}
