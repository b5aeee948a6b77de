#include <cstdio>

#include "CLI11.hpp"
#include "mscbf/run_config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mscbf: spectral simulator for the slow-fast stochastic convective "
                 "Brinkman-Forchheimer system"};
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = -1;
    app.add_option("config", config_path, "key=value run configuration file")->required();
    app.add_option("--out", out_dir, "output directory override");
    auto* seed_opt = app.add_option("--seed", seed, "master seed override");
    app.add_option("--workers", workers, "worker count override (0 = all cores)");
    CLI11_PARSE(app, argc, argv);

    mscbf::ConfigParse parsed = mscbf::parse_config_file(config_path);
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) std::fprintf(stderr, "config error: %s\n", e.c_str());
        return 2;
    }
    if (!out_dir.empty()) parsed.config.out_dir = out_dir;
    if (seed_opt->count() > 0) parsed.config.seed = seed;
    if (workers >= 0) parsed.config.workers = workers;
    return mscbf::run_configured_experiment(parsed.config);
}
