#include "ym/surface.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>

namespace ym {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kFdStep = 1e-6;
constexpr std::array<std::pair<int, int>, kPairCount> kPairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

Vec4 axpy(const Vec4& x, double a, const Vec4& y) {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r[i] = x[i] + a * y[i];
    return r;
}

double dist2(const Vec4& a, const Vec4& b) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// det of the Gram matrix of (ds, dt) in R^4.
double metric_det(const Vec4& ds, const Vec4& dt) {
    double E = 0, F = 0, G = 0;
    for (int i = 0; i < 4; ++i) {
        E += ds[i] * ds[i];
        F += ds[i] * dt[i];
        G += dt[i] * dt[i];
    }
    return E * G - F * F;
}

}  // namespace

SurfaceParam::SurfaceParam(std::string name, Eval eval, Deriv deriv)
    : name_(std::move(name)), eval_(std::move(eval)), deriv_(std::move(deriv)) {}

SurfacePoint SurfaceParam::at(double s, double t) const {
    SurfacePoint p;
    p.x = eval_(s, t);
    if (deriv_) {
        std::tie(p.ds, p.dt) = deriv_(s, t);
    } else {
        const Vec4 sp = eval_(s + kFdStep, t), sm = eval_(s - kFdStep, t);
        const Vec4 tp = eval_(s, t + kFdStep), tm = eval_(s, t - kFdStep);
        for (int i = 0; i < 4; ++i) {
            p.ds[i] = (sp[i] - sm[i]) / (2 * kFdStep);
            p.dt[i] = (tp[i] - tm[i]) / (2 * kFdStep);
        }
    }
    for (int i = 0; i < 4; ++i) {
        if (!std::isfinite(p.x[i]) || !std::isfinite(p.ds[i]) || !std::isfinite(p.dt[i])) {
            throw std::runtime_error("surface evaluation produced a non-finite value");
        }
    }
    return p;
}

SurfaceParam make_rectangle(double R, double T, int axis_s, int axis_t, const Vec4& origin) {
    if (axis_s == axis_t || axis_s < 0 || axis_s > 3 || axis_t < 0 || axis_t > 3) {
        throw ConfigError("rectangle axes must be two distinct indices in 0..3");
    }
    Vec4 es{}, et{};
    es[axis_s] = R;
    et[axis_t] = T;
    std::ostringstream name;
    name << "rectangle(" << R << "x" << T << ")";
    return SurfaceParam(
        name.str(), [=](double s, double t) { return axpy(axpy(origin, s, es), t, et); },
        [=](double, double) { return std::make_pair(es, et); });
}

SurfaceParam make_tilted_plane(double theta) {
    const double c = std::cos(theta), sn = std::sin(theta);
    return SurfaceParam(
        "tilted_plane", [=](double s, double t) { return Vec4{s, t * c, t * sn, 0.0}; },
        [=](double, double) { return std::make_pair(Vec4{1, 0, 0, 0}, Vec4{0, c, sn, 0}); });
}

SurfaceParam make_spherical_cap(double radius, double polar_angle) {
    const double r = radius, al = polar_angle;
    return SurfaceParam(
        "spherical_cap",
        [=](double s, double t) {
            const double th = al * s, ph = 2 * kPi * t;
            return Vec4{r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph),
                        r * std::cos(th), 0.0};
        },
        [=](double s, double t) {
            const double th = al * s, ph = 2 * kPi * t;
            Vec4 ds{r * al * std::cos(th) * std::cos(ph), r * al * std::cos(th) * std::sin(ph),
                    -r * al * std::sin(th), 0.0};
            Vec4 dt{-r * 2 * kPi * std::sin(th) * std::sin(ph), r * 2 * kPi * std::sin(th) * std::cos(ph),
                    0.0, 0.0};
            return std::make_pair(ds, dt);
        });
}

SurfaceParam make_cylinder_patch(double length, double radius, double angle) {
    const double L = length, r = radius, b = angle;
    return SurfaceParam(
        "cylinder_patch",
        [=](double s, double t) { return Vec4{L * s, r * std::cos(b * t), r * std::sin(b * t), 0.0}; },
        [=](double, double t) {
            return std::make_pair(Vec4{L, 0, 0, 0},
                                  Vec4{0, -r * b * std::sin(b * t), r * b * std::cos(b * t), 0});
        });
}

SurfaceParam make_polynomial_chart(const std::array<Eigen::MatrixXd, 4>& coeffs) {
    auto poly = [coeffs](double s, double t, int ds_order, int dt_order) {
        Vec4 out{};
        for (int i = 0; i < 4; ++i) {
            const Eigen::MatrixXd& c = coeffs[i];
            double sum = 0.0;
            for (int j = 0; j < c.rows(); ++j) {
                for (int k = 0; k < c.cols(); ++k) {
                    if (c(j, k) == 0.0) continue;
                    if (j < ds_order || k < dt_order) continue;
                    const double fj = ds_order ? j : 1.0;
                    const double fk = dt_order ? k : 1.0;
                    sum += c(j, k) * fj * fk * std::pow(s, j - ds_order) * std::pow(t, k - dt_order);
                }
            }
            out[i] = sum;
        }
        return out;
    };
    return SurfaceParam(
        "polynomial_chart", [poly](double s, double t) { return poly(s, t, 0, 0); },
        [poly](double s, double t) { return std::make_pair(poly(s, t, 1, 0), poly(s, t, 0, 1)); });
}

SurfaceParam make_folded() {
    return SurfaceParam(
        "folded",
        [](double s, double t) {
            if (s <= 0.5) return Vec4{2 * s, t, 0.0, 0.0};
            const double u = 2 * s - 1;
            return Vec4{1.0, t, u, t * u};
        },
        [](double s, double t) {
            if (s <= 0.5) return std::make_pair(Vec4{2, 0, 0, 0}, Vec4{0, 1, 0, 0});
            return std::make_pair(Vec4{0, 0, 2, 2 * t}, Vec4{0, 1, 0, 2 * s - 1});
        });
}

SurfaceParam make_point(const Vec4& x) {
    return SurfaceParam(
        "point", [x](double, double) { return x; },
        [](double, double) { return std::make_pair(Vec4{}, Vec4{}); });
}

SurfaceParam make_reparametrized(const SurfaceParam& base, double power) {
    if (!(power > 0)) throw ConfigError("reparametrization power must be positive");
    return SurfaceParam(
        base.name() + "_reparametrized",
        [base, power](double s, double t) { return base(std::pow(s, power), t); },
        [base, power](double s, double t) {
            const SurfacePoint p = base.at(std::pow(s, power), t);
            const double f = power * std::pow(s, power - 1);
            Vec4 ds;
            for (int i = 0; i < 4; ++i) ds[i] = f * p.ds[i];
            return std::make_pair(ds, p.dt);
        });
}

SurfaceParam make_subpatch(const SurfaceParam& base, double s0, double s1, double t0, double t1) {
    return SurfaceParam(
        base.name() + "_subpatch",
        [=](double s, double t) { return base(s0 + (s1 - s0) * s, t0 + (t1 - t0) * t); },
        [=](double s, double t) {
            const SurfacePoint p = base.at(s0 + (s1 - s0) * s, t0 + (t1 - t0) * t);
            Vec4 ds, dt;
            for (int i = 0; i < 4; ++i) {
                ds[i] = (s1 - s0) * p.ds[i];
                dt[i] = (t1 - t0) * p.dt[i];
            }
            return std::make_pair(ds, dt);
        });
}

double JacobianSet::det(int a, int b) const {
    if (a == b) return 0.0;
    const int lo = std::min(a, b), hi = std::max(a, b);
    for (int k = 0; k < kPairCount; ++k) {
        if (kPairs[k].first == lo && kPairs[k].second == hi) {
            const double d = J[k].determinant();
            return a < b ? d : -d;
        }
    }
    throw std::invalid_argument("invalid Jacobian index pair");
}

JacobianSet jacobians(const SurfacePoint& p) {
    JacobianSet js;
    for (int k = 0; k < kPairCount; ++k) {
        const auto [a, b] = kPairs[k];
        js.J[k] << p.ds[a], p.dt[a], p.ds[b], p.dt[b];
    }
    return js;
}

JacobianSet jacobians(const SurfaceParam& S, double s, double t) { return jacobians(S.at(s, t)); }

int complementary_pair(int pair) { return kPairCount - 1 - pair; }

int levi_civita4(int a, int b, int c, int d) {
    const int v[4] = {a, b, c, d};
    for (int i = 0; i < 4; ++i) {
        if (v[i] < 0 || v[i] > 3) return 0;
        for (int j = i + 1; j < 4; ++j) {
            if (v[i] == v[j]) return 0;
        }
    }
    int inversions = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) inversions += v[i] > v[j];
    }
    return inversions % 2 ? -1 : 1;
}

int levi_civita3(int i, int j, int k) {
    if (i < 1 || i > 3 || j < 1 || j > 3 || k < 1 || k > 3) return 0;
    if (i == j || j == k || i == k) return 0;
    return levi_civita4(0, i, j, k);
}

double rho_weighted_jacobian(const JacobianSet& js, int pair) {
    const Eigen::Matrix2d& Jab = js.J[pair];
    const Eigen::Matrix2d& Jcd = js.J[complementary_pair(pair)];
    const double dab = Jab.determinant();
    if (dab == 0.0) return 0.0;
    const double g = (Jab.transpose() * Jab + Jcd.transpose() * Jcd).determinant();
    if (g <= 0.0) return 0.0;
    return dab * dab / std::sqrt(g);
}

double rho_weighted_jacobian(const SurfaceParam& S, double s, double t, int pair) {
    return rho_weighted_jacobian(jacobians(S, s, t), pair);
}

std::vector<double> gauss_legendre_nodes(int n, std::vector<double>* weights) {
    if (n < 1) throw ConfigError("Gauss-Legendre order must be positive");
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Map [-1,1] to [0,1], ascending.
        x[n - 1 - i] = 0.5 * (z + 1.0);
        w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    if (weights) *weights = w;
    return x;
}

std::vector<QuadNode> tensor_quadrature(int resolution, QuadratureRule rule) {
    if (resolution < 2) throw ConfigError("quadrature resolution must be at least 2");
    std::vector<double> x(resolution), w(resolution);
    if (rule == QuadratureRule::midpoint) {
        for (int i = 0; i < resolution; ++i) {
            x[i] = (i + 0.5) / resolution;
            w[i] = 1.0 / resolution;
        }
    } else {
        x = gauss_legendre_nodes(resolution, &w);
    }
    std::vector<QuadNode> nodes;
    nodes.reserve(static_cast<std::size_t>(resolution) * resolution);
    for (int j = 0; j < resolution; ++j) {
        for (int i = 0; i < resolution; ++i) nodes.push_back({x[i], x[j], w[i] * w[j]});
    }
    return nodes;
}

AreaResult area_detail(const SurfaceParam& S, int resolution, QuadratureRule rule) {
    AreaResult res;
    for (const QuadNode& q : tensor_quadrature(resolution, rule)) {
        const JacobianSet js = jacobians(S, q.s, q.t);
        for (int k = 0; k < kPairCount; ++k) res.per_pair[k] += q.w * rho_weighted_jacobian(js, k);
    }
    for (double v : res.per_pair) res.area += v;
    return res;
}

double area(const SurfaceParam& S, int resolution, QuadratureRule rule) {
    return area_detail(S, resolution, rule).area;
}

double heat_kernel_area(const SurfaceParam& S, double kappa, int resolution, QuadratureRule rule,
                        int workers, Diagnostics* diag) {
    if (!(kappa > 0)) throw ConfigError("kappa must be positive");
    if (kappa / resolution > 1.0 && diag) {
        std::ostringstream msg;
        msg << "heat_kernel_area: kappa/resolution = " << kappa / resolution
            << " > 1; the Gaussian width is under-resolved";
        diag->warn(msg.str());
    }
    const auto nodes = tensor_quadrature(resolution, rule);
    const std::size_t n = nodes.size();
    std::vector<Vec4> x(n);
    std::vector<std::array<double, kPairCount>> wj(n);
    for (std::size_t i = 0; i < n; ++i) {
        const SurfacePoint p = S.at(nodes[i].s, nodes[i].t);
        x[i] = p.x;
        const JacobianSet js = jacobians(p);
        for (int k = 0; k < kPairCount; ++k) wj[i][k] = nodes[i].w * js.abs_det(k);
    }
    const double c = kappa * kappa / 8.0;
    const double total = parallel_sum(n, workers, [&](std::size_t i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (int k = 0; k < kPairCount; ++k) dot += wj[i][k] * wj[j][k];
            if (dot == 0.0) continue;
            row += dot * std::exp(-c * dist2(x[i], x[j]));
        }
        return row;
    }, 16);
    return kappa * kappa / 4.0 * total;
}

double local_limit_check(const SurfaceParam& S, double s0, double t0, int pair, double kappa,
                         int resolution) {
    const JacobianSet j0 = jacobians(S, s0, t0);
    if (j0.J[pair].determinant() == 0.0) {
        throw std::invalid_argument("local_limit_check: J_ab is singular at the base point");
    }
    const Vec4 x0 = S(s0, t0);
    const double c = kappa * kappa / 8.0;
    double sum = 0.0;
    for (const QuadNode& q : tensor_quadrature(resolution, QuadratureRule::gauss_legendre)) {
        const SurfacePoint p = S.at(q.s, q.t);
        sum += q.w * std::exp(-c * dist2(p.x, x0)) * jacobians(p).J[pair].determinant();
    }
    return kappa * kappa / 4.0 * sum;
}

double local_limit_closed_form(const SurfaceParam& S, double s0, double t0, int pair) {
    const SurfacePoint p = S.at(s0, t0);
    const JacobianSet js = jacobians(p);
    return 2 * kPi * js.J[pair].determinant() / std::sqrt(metric_det(p.ds, p.dt));
}

}  // namespace ym
