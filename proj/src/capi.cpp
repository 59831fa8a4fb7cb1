#include "wavemap/wavemap.h"

#include <cstdlib>
#include <optional>
#include <string>

#include <spdlog/spdlog.h>

#include "app/runner.hpp"
#include "wavemap/error.hpp"

struct wm_context {
    std::optional<wavemap::app::RunConfig> config;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    std::string error;
};

namespace {

template <class F>
int guarded(wm_context* ctx, F&& body) {
    if (!ctx) return WM_INTERNAL;
    ctx->error.clear();
    try {
        body();
        return WM_OK;
    } catch (const wavemap::Error& e) {
        ctx->error = e.what();
        return static_cast<int>(e.status());
    } catch (const std::exception& e) {
        ctx->error = e.what();
        return WM_INTERNAL;
    } catch (...) {
        ctx->error = "unknown failure";
        return WM_INTERNAL;
    }
}

void init_logging() {
    static const bool done = [] {
        spdlog::set_level(spdlog::level::warn);
        if (const char* lvl = std::getenv("WAVEMAP_LOG"); lvl && *lvl)
            spdlog::set_level(spdlog::level::from_str(lvl));
        return true;
    }();
    (void)done;
}

} // namespace

extern "C" {

wm_context* wm_create(void) {
    init_logging();
    try {
        return new wm_context();
    } catch (...) {
        return nullptr;
    }
}

void wm_destroy(wm_context* ctx) { delete ctx; }

int wm_load_config(wm_context* ctx, const char* path) {
    return guarded(ctx, [&] {
        if (!path) wavemap::fail(wavemap::Status::ConfigError, "no configuration path");
        ctx->config = wavemap::app::load_config(path);
    });
}

int wm_load_config_json(wm_context* ctx, const char* text) {
    return guarded(ctx, [&] {
        if (!text) wavemap::fail(wavemap::Status::ConfigError, "no configuration text");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            wavemap::fail(wavemap::Status::ConfigError, std::string("config: malformed JSON: ") + e.what());
        }
        ctx->config = wavemap::app::parse_config(j, ".");
    });
}

int wm_set_threads(wm_context* ctx, int threads) {
    return guarded(ctx, [&] {
        if (threads < 1) wavemap::fail(wavemap::Status::ConfigError, "threads must be at least 1");
        ctx->threads = threads;
    });
}

int wm_set_seed(wm_context* ctx, unsigned long long seed) {
    return guarded(ctx, [&] { ctx->seed = seed; });
}

int wm_run(wm_context* ctx, const char* command, const char* out_dir) {
    return guarded(ctx, [&] {
        if (!ctx->config) wavemap::fail(wavemap::Status::ConfigError, "no configuration loaded");
        if (!command || !out_dir) wavemap::fail(wavemap::Status::ConfigError, "command and output directory required");
        auto c = *ctx->config;
        if (ctx->threads) c.threads = *ctx->threads;
        if (ctx->seed) c.seed = *ctx->seed;
        wavemap::app::run_command(c, command, out_dir);
    });
}

const char* wm_last_error(const wm_context* ctx) { return ctx ? ctx->error.c_str() : "null context"; }

const char* wm_status_name(int code) {
    if (code < 0 || code > WM_IO_ERROR) return "Unknown";
    return wavemap::status_name(static_cast<wavemap::Status>(code));
}

const char* wm_version(void) { return "0.1.0"; }

int wm_set_log_level(const char* level) {
    init_logging();
    if (!level) return WM_CONFIG_ERROR;
    auto l = spdlog::level::from_str(level);
    if (l == spdlog::level::off && std::string(level) != "off") return WM_CONFIG_ERROR;
    spdlog::set_level(l);
    return WM_OK;
}

} // extern "C"
