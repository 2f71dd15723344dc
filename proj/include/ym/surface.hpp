#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ym/common.hpp"

namespace ym {

using Vec4 = std::array<double, 4>;

struct SurfacePoint {
    Vec4 x{};   // sigma(s,t)
    Vec4 ds{};  // d sigma / ds
    Vec4 dt{};  // d sigma / dt
};

// sigma: [0,1]^2 -> R^4. Without an analytic derivative, central differences
// with step 1e-6 are used.
class SurfaceParam {
public:
    using Eval = std::function<Vec4(double, double)>;
    using Deriv = std::function<std::pair<Vec4, Vec4>(double, double)>;

    SurfaceParam() = default;
    SurfaceParam(std::string name, Eval eval, Deriv deriv = {});

    const std::string& name() const { return name_; }
    Vec4 operator()(double s, double t) const { return eval_(s, t); }
    SurfacePoint at(double s, double t) const;
    bool has_analytic_derivative() const { return static_cast<bool>(deriv_); }

private:
    std::string name_;
    Eval eval_;
    Deriv deriv_;
};

// Builtin shapes. Planes are given by axis indices 0..3.
SurfaceParam make_rectangle(double R, double T, int axis_s = 0, int axis_t = 1,
                            const Vec4& origin = {0, 0, 0, 0});
SurfaceParam make_tilted_plane(double theta);
SurfaceParam make_spherical_cap(double radius, double polar_angle);
SurfaceParam make_cylinder_patch(double length, double radius, double angle);
// x_i = sum_{j,k} coeffs[i](j,k) s^j t^k
SurfaceParam make_polynomial_chart(const std::array<Eigen::MatrixXd, 4>& coeffs);
// Two flat pieces joined along s = 1/2: an x0-x1 strip and a piece spanning x2-x3.
SurfaceParam make_folded();
SurfaceParam make_point(const Vec4& x = {0, 0, 0, 0});
// (s,t) -> base(s^power, t): same image, different parametrization.
SurfaceParam make_reparametrized(const SurfaceParam& base, double power);
// Restriction of base to [s0,s1] x [t0,t1], rescaled to [0,1]^2.
SurfaceParam make_subpatch(const SurfaceParam& base, double s0, double s1, double t0, double t1);

constexpr int kPairCount = 6;

// J_ab has rows (sigma'_a, sigma-dot_a) and (sigma'_b, sigma-dot_b); pairs in the
// order (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
struct JacobianSet {
    std::array<Eigen::Matrix2d, kPairCount> J;

    // Signed det J_ab for any ordered a != b; det J_ba = -det J_ab.
    double det(int a, int b) const;
    double abs_det(int pair) const { return std::abs(J[pair].determinant()); }
};

JacobianSet jacobians(const SurfaceParam& S, double s, double t);
JacobianSet jacobians(const SurfacePoint& p);

// Complementary pair index: (0,1) <-> (2,3), (0,2) <-> (1,3), (0,3) <-> (1,2).
int complementary_pair(int pair);

// Sign of the permutation (a,b,c,d) of (0,1,2,3), 0 if not all distinct.
int levi_civita4(int a, int b, int c, int d);
// Three-index symbol over {1,2,3}.
int levi_civita3(int i, int j, int k);

// |J_ab| rho^{ab} = |J_ab|^2 / sqrt det[J_ab^T J_ab + J_cd^T J_cd]; 0 on degenerate points.
double rho_weighted_jacobian(const JacobianSet& js, int pair);
double rho_weighted_jacobian(const SurfaceParam& S, double s, double t, int pair);

enum class QuadratureRule { midpoint, gauss_legendre };

struct QuadNode {
    double s = 0.0;
    double t = 0.0;
    double w = 0.0;
};

std::vector<double> gauss_legendre_nodes(int n, std::vector<double>* weights);
std::vector<QuadNode> tensor_quadrature(int resolution, QuadratureRule rule = QuadratureRule::midpoint);

struct AreaResult {
    double area = 0.0;
    std::array<double, kPairCount> per_pair{};
};

AreaResult area_detail(const SurfaceParam& S, int resolution,
                       QuadratureRule rule = QuadratureRule::midpoint);
double area(const SurfaceParam& S, int resolution, QuadratureRule rule = QuadratureRule::midpoint);

// sum_{a<b} (kappa^2/4) double integral of exp(-kappa^2|sigma - sigma-bar|^2/8)|J_ab||J_ab|.
double heat_kernel_area(const SurfaceParam& S, double kappa, int resolution,
                        QuadratureRule rule = QuadratureRule::midpoint, int workers = 1,
                        Diagnostics* diag = nullptr);

// Quadrature value of int (kappa^2/4) exp(-kappa^2|sigma - sigma(p)|^2/8) det J_ab ds dt.
double local_limit_check(const SurfaceParam& S, double s0, double t0, int pair, double kappa,
                         int resolution = 256);
// Its kappa -> infinity limit, 2 pi det J_ab / sqrt det[J_ab^T J_ab + J_cd^T J_cd] at p.
double local_limit_closed_form(const SurfaceParam& S, double s0, double t0, int pair);

}  // namespace ym
