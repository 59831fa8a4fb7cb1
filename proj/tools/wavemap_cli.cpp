#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "wavemap/wavemap.h"

int main(int argc, char** argv) {
    CLI::App app{"wavemap: forced wave maps into the sphere on a null lattice"};
    app.require_subcommand(1);
    std::string config, out = "out";
    int threads = 0;
    unsigned long long seed = 0;
    bool seed_given = false;

    const char* commands[][2] = {{"solve", "solve the Cauchy problem and write solution.csv, diagnostics.json"},
                                 {"verify-estimates", "run the randomized inequality suites"},
                                 {"scatter", "compute scattering data and the defect series"},
                                 {"converge", "refinement study against an oracle or the finest level"}};
    for (auto& c : commands) {
        auto* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option_function<unsigned long long>(
            "--seed", [&](const unsigned long long& s) { seed = s, seed_given = true; }, "RNG seed (u64)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : WM_CONFIG_ERROR;
    }

    std::unique_ptr<wm_context, decltype(&wm_destroy)> ctx(wm_create(), wm_destroy);
    if (!ctx) return WM_INTERNAL;
    const std::string command = app.get_subcommands().front()->get_name();
    int rc = wm_load_config(ctx.get(), config.c_str());
    if (rc == WM_OK && threads > 0) rc = wm_set_threads(ctx.get(), threads);
    if (rc == WM_OK && seed_given) rc = wm_set_seed(ctx.get(), seed);
    if (rc == WM_OK) rc = wm_run(ctx.get(), command.c_str(), out.c_str());
    if (rc != WM_OK) std::fprintf(stderr, "wavemap %s: %s: %s\n", command.c_str(), wm_status_name(rc), wm_last_error(ctx.get()));
    return rc;
}
