#include "ym/descriptors.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <boost/math/constants/constants.hpp>

#include "ym/common.hpp"
#include "ym/functionals.hpp"
#include "ym/limits.hpp"
#include "ym/measure.hpp"

namespace ym {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
T require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
    return get_or<T>(j, key, T{});
}

Vec4 vec4_from(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ConfigError("expected an array of 4 numbers");
    Vec4 v{};
    for (int i = 0; i < 4; ++i) v[i] = j[i].get<double>();
    return v;
}

}  // namespace

SurfaceParam surface_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("surface descriptor must be an object");
    const std::string type = require<std::string>(j, "type");
    if (type == "rectangle") {
        const double R = get_or(j, "R", 1.0), T = get_or(j, "T", 1.0);
        if (!(R >= 0) || !(T >= 0)) throw ConfigError("rectangle sides must be nonnegative");
        std::vector<int> axes = get_or(j, "axes", std::vector<int>{0, 1});
        if (axes.size() != 2 || axes[0] == axes[1] || axes[0] < 0 || axes[0] > 3 || axes[1] < 0 ||
            axes[1] > 3) {
            throw ConfigError("rectangle axes must be two distinct indices in 0..3");
        }
        const Vec4 origin = j.contains("origin") ? vec4_from(j["origin"]) : Vec4{0, 0, 0, 0};
        return make_rectangle(R, T, axes[0], axes[1], origin);
    }
    if (type == "tilted_plane") return make_tilted_plane(get_or(j, "theta", 0.0));
    if (type == "spherical_cap") {
        const double r = get_or(j, "radius", 1.0), a = get_or(j, "polar_angle", 0.5);
        if (!(r > 0) || !(a > 0) || !(a <= kPi)) throw ConfigError("spherical cap needs radius > 0, 0 < angle <= pi");
        return make_spherical_cap(r, a);
    }
    if (type == "cylinder") {
        return make_cylinder_patch(get_or(j, "length", 1.0), get_or(j, "radius", 1.0), get_or(j, "angle", 1.0));
    }
    if (type == "polynomial") {
        const json& c = j.at("coeffs");
        if (!c.is_array() || c.size() != 4) throw ConfigError("polynomial chart needs 4 coefficient matrices");
        std::array<Eigen::MatrixXd, 4> m;
        for (int i = 0; i < 4; ++i) {
            const json& rows = c[i];
            if (!rows.is_array() || rows.empty()) throw ConfigError("coefficient matrix must be nonempty");
            const std::size_t cols = rows[0].size();
            m[i].resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != cols) throw ConfigError("ragged coefficient matrix");
                for (std::size_t k = 0; k < cols; ++k) m[i](r, k) = rows[r][k].get<double>();
            }
        }
        return make_polynomial_chart(m);
    }
    if (type == "folded") return make_folded();
    if (type == "point") return make_point(j.contains("x") ? vec4_from(j["x"]) : Vec4{0, 0, 0, 0});
    if (type == "reparametrized") {
        const double p = get_or(j, "power", 2.0);
        if (!(p > 0)) throw ConfigError("reparametrization power must be positive");
        return make_reparametrized(surface_from_json(j.at("base")), p);
    }
    if (type == "subpatch") {
        const double s0 = get_or(j, "s0", 0.0), s1 = get_or(j, "s1", 1.0);
        const double t0 = get_or(j, "t0", 0.0), t1 = get_or(j, "t1", 1.0);
        if (!(0 <= s0 && s0 < s1 && s1 <= 1 && 0 <= t0 && t0 < t1 && t1 <= 1)) {
            throw ConfigError("subpatch bounds must satisfy 0 <= s0 < s1 <= 1 and 0 <= t0 < t1 <= 1");
        }
        return make_subpatch(surface_from_json(j.at("base")), s0, s1, t0, t1);
    }
    throw ConfigError("unknown surface type: " + type);
}

LieBasis basis_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("group descriptor must be an object");
    try {
        const GroupKind kind = parse_group_kind(require<std::string>(j, "group"));
        const int n = get_or(j, "n", kind == GroupKind::U1 ? 1 : 2);
        return build_basis(kind, n);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ConnectionField connection_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("connection descriptor must be an object");
    if (j.contains("builtin")) {
        try {
            return builtin_connection(j["builtin"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    ConnectionField c(basis_from_json(j.at("group")));
    for (const json& t : j.value("terms", json::array())) {
        const int comp = require<int>(t, "j"), alpha = require<int>(t, "alpha");
        if (comp < 1 || comp > 3) throw ConfigError("connection term component must be 1..3");
        if (alpha < 0 || alpha >= c.basis.algebra_dim()) throw ConfigError("connection term alpha out of range");
        const std::vector<int> e = get_or(t, "e", std::vector<int>{0, 0, 0, 0});
        if (e.size() != 4) throw ConfigError("connection term exponent needs 4 entries");
        std::array<int, 4> ex{};
        for (int i = 0; i < 4; ++i) {
            if (e[i] < 0) throw ConfigError("negative exponent");
            ex[i] = e[i];
        }
        c.add_term(comp, alpha, require<double>(t, "c"), ex);
    }
    return c;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"area", "abelian", "limit", "potential",
                                                "mc", "grid_check", "holonomy", "duality"};
    return names;
}

void RunConfig::validate() const {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
        throw ConfigError("unknown command: '" + command + "'");
    }
    if (kappa.empty()) throw ConfigError("kappa list must be nonempty");
    for (double k : kappa) {
        if (!(k > 0) || !std::isfinite(k)) throw ConfigError("kappa values must be positive");
    }
    if (cutoff < 0 || cutoff > 12) throw ConfigError("cutoff must lie in 0..12");
    if (resolution < 2 || resolution > 4096) throw ConfigError("resolution must lie in 2..4096");
    if (samples < 2) throw ConfigError("samples must be >= 2");
    if (ode_steps < 1) throw ConfigError("ode_steps must be >= 1");
    if (workers < 0) throw ConfigError("workers must be >= 0 (0 = all cores)");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (n_grid < 2) throw ConfigError("n_grid must be >= 2");
    for (int n : ns) {
        if (n < 1) throw ConfigError("grid sizes must be >= 1");
    }
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (w_nodes < 1) throw ConfigError("w_nodes must be >= 1");
    for (double r : R) {
        if (!(r >= 0)) throw ConfigError("R values must be nonnegative");
    }
    parse_variance(variance);
    parse_completion(completion);
    if ((command == "mc" || command == "grid_check") && !seed) {
        throw ConfigError("command '" + command + "' is stochastic and needs a seed");
    }
}

json RunConfig::to_json() const {
    json j;
    j["command"] = command;
    j["surface"] = surface;
    j["group"] = group;
    j["groups"] = groups;
    j["kappa"] = kappa;
    j["cutoff"] = cutoff;
    j["resolution"] = resolution;
    j["samples"] = samples;
    j["ode_steps"] = ode_steps;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["workers"] = workers;
    j["out"] = out;
    j["format"] = format;
    j["strict"] = strict;
    j["n_grid"] = n_grid;
    j["ns"] = ns;
    j["trials"] = trials;
    j["variance"] = variance;
    j["completion"] = completion;
    j["w_nodes"] = w_nodes;
    j["R"] = R;
    j["connection"] = connection;
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    static const std::set<std::string> known{
        "command", "surface", "group", "groups", "kappa", "cutoff", "resolution", "samples",
        "ode_steps", "seed", "workers", "out", "format", "strict", "n_grid", "ns", "trials",
        "variance", "completion", "w_nodes", "R", "connection"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw ConfigError("unknown config key: '" + k + "'");
    }
    RunConfig c;
    c.command = get_or<std::string>(j, "command", "");
    if (j.contains("surface")) c.surface = j["surface"];
    if (j.contains("group")) c.group = j["group"];
    if (j.contains("groups")) c.groups = get_or(j, "groups", std::vector<json>{});
    if (j.contains("kappa")) {
        c.kappa = j["kappa"].is_array() ? get_or(j, "kappa", std::vector<double>{})
                                        : std::vector<double>{get_or(j, "kappa", 0.0)};
    }
    c.cutoff = get_or(j, "cutoff", c.cutoff);
    c.resolution = get_or(j, "resolution", c.resolution);
    c.samples = get_or(j, "samples", c.samples);
    c.ode_steps = get_or(j, "ode_steps", c.ode_steps);
    if (j.contains("seed") && !j["seed"].is_null()) {
        if (!j["seed"].is_number_integer()) throw ConfigError("seed must be an unsigned integer");
        if (j["seed"].is_number_unsigned()) {
            c.seed = j["seed"].get<std::uint64_t>();
        } else {
            const auto v = j["seed"].get<std::int64_t>();
            if (v < 0) throw ConfigError("seed must be nonnegative");
            c.seed = static_cast<std::uint64_t>(v);
        }
    }
    c.workers = get_or(j, "workers", c.workers);
    c.out = get_or(j, "out", c.out);
    c.format = get_or(j, "format", c.format);
    c.strict = get_or(j, "strict", c.strict);
    c.n_grid = get_or(j, "n_grid", c.n_grid);
    c.ns = get_or(j, "ns", c.ns);
    c.trials = get_or(j, "trials", c.trials);
    c.variance = get_or(j, "variance", c.variance);
    c.completion = get_or(j, "completion", c.completion);
    c.w_nodes = get_or(j, "w_nodes", c.w_nodes);
    if (j.contains("R")) {
        c.R = j["R"].is_array() ? get_or(j, "R", std::vector<double>{})
                                : std::vector<double>{get_or(j, "R", 0.0)};
    }
    if (j.contains("connection")) c.connection = j["connection"];
    return c;
}

namespace {

std::vector<LieBasis> group_list(const RunConfig& cfg) {
    std::vector<json> g = cfg.groups;
    if (g.empty()) {
        g = {{{"group", "U1"}, {"n", 1}}, {{"group", "SU"}, {"n", 2}}, {{"group", "SU"}, {"n", 3}},
             {{"group", "SO"}, {"n", 3}}};
    }
    std::vector<LieBasis> out;
    for (const json& x : g) out.push_back(basis_from_json(x));
    return out;
}

int group_n(const LieBasis& b) { return b.kind == GroupKind::U1 ? 1 : b.matrix_dim; }

json cmd_area(const RunConfig& cfg, Diagnostics& diag) {
    const SurfaceParam S = surface_from_json(cfg.surface);
    const AreaResult a = area_detail(S, cfg.resolution, QuadratureRule::gauss_legendre);
    json r;
    r["columns"] = {"kappa", "area", "rho_01", "rho_02", "rho_03", "rho_12", "rho_13", "rho_23",
                    "heat_kernel_area", "heat_ratio"};
    r["rows"] = json::array();
    for (double k : cfg.kappa) {
        const double h = heat_kernel_area(S, k, cfg.resolution, QuadratureRule::midpoint, cfg.workers, &diag);
        json row = {k, a.area};
        for (double v : a.per_pair) row.push_back(v);
        row.push_back(h);
        row.push_back(a.area > 0 ? h / (2.0 * kPi * a.area) : 0.0);
        r["rows"].push_back(row);
    }
    return r;
}

json cmd_abelian(const RunConfig& cfg, Diagnostics& diag) {
    const SurfaceParam S = surface_from_json(cfg.surface);
    const double A = area(S, cfg.resolution, QuadratureRule::gauss_legendre);
    const double target = std::exp(-A / 8.0);
    json r;
    r["columns"] = {"kappa", "nu_norm2", "value", "target", "rel_dev"};
    r["rows"] = json::array();
    for (double k : cfg.kappa) {
        if (k / cfg.resolution > 1.0) {
            diag.warn("abelian: kappa/resolution > 1 under-resolves the kernel width 2/kappa");
        }
        const double n2 = nu_surface(S, k, cfg.resolution).norm2(cfg.workers);
        const double v = std::exp(-n2 / (2.0 * k * k));
        r["rows"].push_back({k, n2, v, target, (v - target) / target});
    }
    return r;
}

json cmd_limit(const RunConfig& cfg) {
    const SurfaceParam S = surface_from_json(cfg.surface);
    const double A = area(S, cfg.resolution, QuadratureRule::gauss_legendre);
    json r;
    r["columns"] = {"group", "n", "area", "limit", "closed_form", "potential_slope"};
    r["rows"] = json::array();
    for (const LieBasis& b : group_list(cfg)) {
        const AreaLawResult a = area_law_limit(A, b);
        r["rows"].push_back({group_kind_name(b.kind), group_n(b), A, a.value,
                             area_law_closed_form(b.kind, group_n(b), A), quark_potential(1.0, b)});
    }
    return r;
}

json cmd_potential(const RunConfig& cfg) {
    json r;
    r["columns"] = {"group", "n", "R", "V", "V_ratio", "V_closed_form"};
    r["rows"] = json::array();
    for (const LieBasis& b : group_list(cfg)) {
        for (double R : cfg.R) {
            r["rows"].push_back({group_kind_name(b.kind), group_n(b), R, quark_potential(R, b),
                                 quark_potential(R, b, PotentialMode::ratio),
                                 quark_potential_closed_form(b.kind, group_n(b), R)});
        }
    }
    return r;
}

json cmd_mc(const RunConfig& cfg, Diagnostics& diag) {
    const SurfaceParam S = surface_from_json(cfg.surface);
    const LieBasis basis = basis_from_json(cfg.group);
    const double A = area(S, cfg.resolution, QuadratureRule::gauss_legendre);
    const double limit = area_law_limit(A, basis).value;
    json r;
    r["columns"] = {"kappa", "cutoff", "samples", "mean_re", "mean_im", "stderr", "mean_Y", "stderr_Y",
                    "kappa_limit", "abelian_closed_form", "clipped_tail"};
    r["rows"] = json::array();
    for (double k : cfg.kappa) {
        MeasureConfig m;
        m.kappa = k;
        m.cutoff = cfg.cutoff;
        m.algebra = basis;
        m.variance = parse_variance(cfg.variance);
        m.completion = parse_completion(cfg.completion);
        m.seed = *cfg.seed;
        m.w_nodes = cfg.w_nodes;
        m.workers = cfg.workers;
        if (k / cfg.n_grid > 2.0) diag.warn("mc: n_grid coarse relative to the kernel width 2/kappa");
        const MCEstimate e = mc_expectation(S, m, cfg.samples, cfg.n_grid, cfg.ode_steps);
        if (e.clipped_tail > 1e-8) diag.warn("mc: tail covariance had negative eigenvalues (clipped)");
        const json closed = basis.kind == GroupKind::U1 ? json(abelian_closed_form(S, k, cfg.n_grid, cfg.workers))
                                                        : json(nullptr);
        r["rows"].push_back({k, cfg.cutoff, cfg.samples, e.mean.real(), e.mean.imag(), e.stderr_, e.mean_Y,
                             e.stderr_Y, limit, closed, e.clipped_tail});
    }
    return r;
}

json cmd_grid_check(const RunConfig& cfg) {
    const std::vector<int> ns = cfg.ns.empty() ? std::vector<int>{2, 3, 5} : cfg.ns;
    json r;
    r["columns"] = {"n", "trials", "edges", "audit", "max_deviation"};
    r["rows"] = json::array();
    for (int n : ns) {
        const GridZn g = build_grid(n);
        const std::string audit = audit_grid(g);
        std::mt19937_64 rng(stream_seed(*cfg.seed, static_cast<std::uint64_t>(n)));
        double worst = 0.0;
        for (int t = 0; t < cfg.trials; ++t) {
            worst = std::max(worst, grid_identity_check(random_su2_edge_field(n, rng)).deviation);
        }
        r["rows"].push_back({n, cfg.trials, g.traversal.size(), audit.empty() ? "ok" : audit, worst});
    }
    return r;
}

json cmd_holonomy(const RunConfig& cfg) {
    const SurfaceParam S = surface_from_json(cfg.surface);
    const ConnectionField conn = connection_from_json(cfg.connection);
    const std::vector<int> ns = cfg.ns.empty() ? std::vector<int>{4, 8, 16} : cfg.ns;
    const auto rows = holonomy_convergence(conn, S, ns, cfg.ode_steps);
    json r;
    r["columns"] = {"n", "error", "ratio_to_previous"};
    r["rows"] = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const json ratio = i == 0 || rows[i].error == 0.0 ? json(nullptr) : json(rows[i - 1].error / rows[i].error);
        r["rows"].push_back({rows[i].n, rows[i].error, ratio});
    }
    return r;
}

json cmd_duality(const RunConfig& cfg) {
    const SurfaceParam S = surface_from_json(cfg.surface);
    const LieBasis basis = basis_from_json(cfg.group);
    const DualAreaLawReport rep = dual_area_law(S, basis, cfg.kappa, cfg.resolution, cfg.workers);
    json r;
    r["columns"] = {"kappa", "F_norm2", "Fbar_norm2", "inner", "cos_theta", "theta", "kappa2_inner",
                    "lk_estimate", "limit"};
    r["rows"] = json::array();
    for (const DualRow& row : rep.rows) {
        const DualityResult& d = row.duality;
        r["rows"].push_back({row.kappa, d.F_norm2, d.Fbar_norm2, d.inner, d.cos_theta, d.theta, row.kappa2_inner,
                             d.lk_estimate, rep.limit.value});
    }
    return r;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    if (v.is_number_float()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
    }
    return v.dump();
}

}  // namespace

json run_command(const RunConfig& cfg) {
    cfg.validate();
    Diagnostics diag;
    diag.strict = cfg.strict;
    json body;
    try {
        if (cfg.command == "area") body = cmd_area(cfg, diag);
        else if (cfg.command == "abelian") body = cmd_abelian(cfg, diag);
        else if (cfg.command == "limit") body = cmd_limit(cfg);
        else if (cfg.command == "potential") body = cmd_potential(cfg);
        else if (cfg.command == "mc") body = cmd_mc(cfg, diag);
        else if (cfg.command == "grid_check") body = cmd_grid_check(cfg);
        else if (cfg.command == "holonomy") body = cmd_holonomy(cfg);
        else if (cfg.command == "duality") body = cmd_duality(cfg);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("descriptor error: ") + e.what());
    }
    json r;
    r["command"] = cfg.command;
    r["config"] = cfg.to_json();
    r["columns"] = body["columns"];
    r["rows"] = body["rows"];
    r["warnings"] = diag.warnings;
    return r;
}

std::string result_to_csv(const json& result) {
    std::ostringstream os;
    os << "# config: " << result.at("config").dump() << "\n";
    for (const auto& w : result.value("warnings", json::array())) os << "# warning: " << w.get<std::string>() << "\n";
    const json& cols = result.at("columns");
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << csv_cell(cols[i]);
    os << "\n";
    for (const json& row : result.at("rows")) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << "\n";
    }
    return os.str();
}

}  // namespace ym
