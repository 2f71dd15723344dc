// Command-line front end. Builds a JSON run config from --config plus flag overrides and
// hands it to the shared library; exit codes 0 ok, 2 invalid config, 3 numerical guard.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ym/ym.h"

namespace {

using json = nlohmann::json;

int exit_code(ym_status s) {
    switch (s) {
        case YM_OK: return 0;
        case YM_ERR_ARGUMENT:
        case YM_ERR_CONFIG: return 2;
        case YM_ERR_NUMERIC: return 3;
        default: return 1;
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wilson-loop and area-law computations"};
    std::string config_path, command, kappa, out, format;
    std::optional<std::uint64_t> seed;
    std::optional<int> cutoff, resolution, samples, ode_steps, workers;
    bool strict = false;
    app.add_option("--config", config_path, "JSON run config file");
    app.add_option("--command", command, "area|abelian|limit|potential|mc|grid_check|holonomy|duality");
    app.add_option("--seed", seed, "RNG seed (required for mc and grid_check)");
    app.add_option("--kappa", kappa, "kappa value or comma-separated list");
    app.add_option("--cutoff", cutoff, "basis cutoff R_max");
    app.add_option("--resolution", resolution, "surface quadrature resolution");
    app.add_option("--samples", samples, "Monte Carlo sample count");
    app.add_option("--ode-steps", ode_steps, "RK4 steps per unit parameter length");
    app.add_option("--workers", workers, "worker threads (0 = all cores)");
    app.add_option("--out", out, "output path (default stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--strict", strict, "turn numerical warnings into errors (exit 3)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    json cfg = json::object();
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot open config " << config_path << "\n";
                return 2;
            }
            cfg = json::parse(in);
            if (!cfg.is_object()) throw std::invalid_argument("config file must hold a JSON object");
        }
        if (!command.empty()) cfg["command"] = command;
        if (seed) cfg["seed"] = *seed;
        if (!kappa.empty()) cfg["kappa"] = parse_list(kappa);
        if (cutoff) cfg["cutoff"] = *cutoff;
        if (resolution) cfg["resolution"] = *resolution;
        if (samples) cfg["samples"] = *samples;
        if (ode_steps) cfg["ode_steps"] = *ode_steps;
        if (workers) cfg["workers"] = *workers;
        if (!out.empty()) cfg["out"] = out;
        if (!format.empty()) cfg["format"] = format;
        if (strict) cfg["strict"] = true;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (!cfg.contains("workers")) cfg["workers"] = 0;

    const bool as_json = cfg.value("format", std::string("csv")) == "json";
    char* result = nullptr;
    const std::string text = cfg.dump();
    const ym_status st = as_json ? ym_run(text.c_str(), &result) : ym_run_csv(text.c_str(), &result);
    if (st != YM_OK) {
        std::cerr << "error: " << ym_last_error() << "\n";
        return exit_code(st);
    }
    std::string body(result);
    ym_free_string(result);
    if (as_json) body += "\n";

    const std::string path = cfg.value("out", std::string());
    if (path.empty()) {
        std::cout << body;
    } else {
        std::ofstream f(path);
        if (!f) {
            std::cerr << "error: cannot write " << path << "\n";
            return 2;
        }
        f << body;
    }
    return 0;
}
