#include "ym/ym.h"

#include <cstring>
#include <new>
#include <string>

#include "ym/common.hpp"
#include "ym/descriptors.hpp"
#include "ym/limits.hpp"
#include "ym/measure.hpp"

struct ym_basis {
    ym::LieBasis basis;
};

struct ym_surface {
    ym::SurfaceParam surface;
};

namespace {

thread_local std::string g_last_error;

template <class F>
ym_status guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return YM_OK;
    } catch (const ym::ConfigError& e) {
        g_last_error = e.what();
        return YM_ERR_CONFIG;
    } catch (const ym::NumericalGuardError& e) {
        g_last_error = e.what();
        return YM_ERR_NUMERIC;
    } catch (const nlohmann::json::exception& e) {
        g_last_error = e.what();
        return YM_ERR_CONFIG;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return YM_ERR_CONFIG;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return YM_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return YM_ERR_INTERNAL;
    }
}

ym_status null_arg(const char* what) {
    g_last_error = std::string("null argument: ") + what;
    return YM_ERR_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(::operator new(s.size() + 1));
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

ym::RunConfig parse_config(const char* text) {
    return ym::RunConfig::from_json(nlohmann::json::parse(text));
}

}  // namespace

extern "C" {

const char* ym_version(void) { return "1.0.0"; }

const char* ym_last_error(void) { return g_last_error.c_str(); }

void ym_free_string(char* s) { ::operator delete(s); }

ym_status ym_run(const char* config_json, char** result_json) {
    if (!config_json) return null_arg("config_json");
    if (!result_json) return null_arg("result_json");
    *result_json = nullptr;
    return guarded([&] { *result_json = dup_string(ym::run_command(parse_config(config_json)).dump(2)); });
}

ym_status ym_run_csv(const char* config_json, char** result_csv) {
    if (!config_json) return null_arg("config_json");
    if (!result_csv) return null_arg("result_csv");
    *result_csv = nullptr;
    return guarded(
        [&] { *result_csv = dup_string(ym::result_to_csv(ym::run_command(parse_config(config_json)))); });
}

const char* ym_command_names(void) {
    static const std::string names = [] {
        std::string s;
        for (const auto& n : ym::command_names()) s += n + "\n";
        return s;
    }();
    return names.c_str();
}

ym_status ym_basis_create(const char* group, int n, ym_basis** out) {
    if (!group) return null_arg("group");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = new ym_basis{ym::build_basis(ym::parse_group_kind(group), n)}; });
}

void ym_basis_destroy(ym_basis* b) { delete b; }

ym_status ym_basis_dims(const ym_basis* b, int* matrix_dim, int* algebra_dim) {
    if (!b) return null_arg("basis");
    if (matrix_dim) *matrix_dim = b->basis.matrix_dim;
    if (algebra_dim) *algebra_dim = b->basis.algebra_dim();
    return YM_OK;
}

ym_status ym_area_law_limit(const ym_basis* b, double area, double* value) {
    if (!b) return null_arg("basis");
    if (!value) return null_arg("value");
    return guarded([&] { *value = ym::area_law_limit(area, b->basis).value; });
}

ym_status ym_quark_potential(const ym_basis* b, double R, double* value) {
    if (!b) return null_arg("basis");
    if (!value) return null_arg("value");
    return guarded([&] { *value = ym::quark_potential(R, b->basis); });
}

ym_status ym_surface_create(const char* descriptor_json, ym_surface** out) {
    if (!descriptor_json) return null_arg("descriptor_json");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        *out = new ym_surface{ym::surface_from_json(nlohmann::json::parse(descriptor_json))};
    });
}

void ym_surface_destroy(ym_surface* s) { delete s; }

ym_status ym_surface_area(const ym_surface* s, int resolution, double* area) {
    if (!s) return null_arg("surface");
    if (!area) return null_arg("area");
    return guarded([&] { *area = ym::area(s->surface, resolution, ym::QuadratureRule::gauss_legendre); });
}

ym_status ym_abelian_wilson(const ym_surface* s, double kappa, int resolution, double* value) {
    if (!s) return null_arg("surface");
    if (!value) return null_arg("value");
    return guarded([&] { *value = ym::abelian_closed_form(s->surface, kappa, resolution); });
}

}  // extern "C"
