#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ym/grid.hpp"
#include "ym/lie_algebra.hpp"
#include "ym/surface.hpp"

namespace ym {

using json = nlohmann::json;

// {"type": "rectangle", "R": 1, "T": 1, "axes": [0, 1], "origin": [0,0,0,0]}
// {"type": "tilted_plane", "theta": 0.5}
// {"type": "spherical_cap", "radius": 1, "polar_angle": 0.5}
// {"type": "cylinder", "length": 1, "radius": 1, "angle": 1}
// {"type": "polynomial", "coeffs": [M0, M1, M2, M3]}  (M_i nested arrays, entry (j,k) of s^j t^k)
// {"type": "folded"} | {"type": "point", "x": [..]}
// {"type": "reparametrized", "base": {...}, "power": 2}
// {"type": "subpatch", "base": {...}, "s0": 0, "s1": 1, "t0": 0, "t1": 1}
SurfaceParam surface_from_json(const json& j);

// {"group": "SU", "n": 2}
LieBasis basis_from_json(const json& j);

// {"builtin": "su2_poly_a"} or {"group": {...}, "terms": [{"j":1,"alpha":0,"c":1.0,"e":[1,0,0,0]}]}
ConnectionField connection_from_json(const json& j);

struct RunConfig {
    std::string command;
    json surface = {{"type", "rectangle"}, {"R", 1.0}, {"T", 1.0}};
    json group = {{"group", "SU"}, {"n", 2}};
    std::vector<json> groups;  // cmd_limit / cmd_potential rows; defaults to a standard set
    std::vector<double> kappa{5.0, 10.0, 20.0};
    int cutoff = 4;
    int resolution = 96;
    int samples = 1000;
    int ode_steps = 32;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string out;
    std::string format = "csv";
    bool strict = false;
    int n_grid = 16;
    std::vector<int> ns;  // grid_check default {2,3,5}; holonomy default {4,8,16}
    int trials = 100;
    std::string variance = "real";
    std::string completion = "kernel";
    int w_nodes = 4096;
    std::vector<double> R{0.0, 1.0, 2.0, 3.0, 4.0};
    json connection = {{"builtin", "su2_poly_a"}};

    void validate() const;  // throws ConfigError
    json to_json() const;
    static RunConfig from_json(const json& j);  // unknown keys are rejected
};

const std::vector<std::string>& command_names();

// {"command", "config", "columns", "rows", "warnings"}; throws ConfigError / NumericalGuardError.
json run_command(const RunConfig& cfg);

// CSV with the config echo as a leading comment line.
std::string result_to_csv(const json& result);

}  // namespace ym
