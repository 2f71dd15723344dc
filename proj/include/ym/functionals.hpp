#pragma once

#include <array>
#include <complex>
#include <vector>

#include "ym/bargmann.hpp"
#include "ym/surface.hpp"

namespace ym {

using CVec4 = std::array<cplx, 4>;

// psi(w) = exp(-sum |w_i|^2 / 2) / sqrt(2 pi)
double psi(const CVec4& w);
double psi(const Vec4& x);
CVec4 to_complex(const Vec4& x);

// chi_w(z) = exp(conj(w) . z)
cplx chi(const CVec4& w, const CVec4& z);

cplx eval_poly(const Poly<cplx>& f, const CVec4& w);

// f_a(w)
cplx zeta_pair(const MonomialForm<cplx>& f, const CVec4& w, int a);

// kappa times the (a,b) wedge component of d f at w (times psi(w) when weighted).
cplx xi_pair(const MonomialForm<cplx>& f, const CVec4& w, int a, int b, double kappa, bool weighted,
             WedgeSign sign = WedgeSign::printed);

// <xi_ab(w), xi_ab(w')>_{d,kappa} = psi_w psi_w' exp(w . conj(w')); the kappa factors cancel.
// Equals exp(-|w - w'|^2/2)/(2 pi) for real arguments.
cplx xi_kernel(const CVec4& w, const CVec4& wp, double kappa);
double xi_kernel(const Vec4& x, const Vec4& xp, double kappa);

// The same inner product from the truncated per-axis monomial expansion of chi
// (degree <= per_axis_cutoff on each axis), using h2_inner.
cplx xi_kernel_expansion(const CVec4& w, const CVec4& wp, int per_axis_cutoff);

// Riesz representer of xi_ab in the truncated space spanned by a BasisCache frame.
double xi_kernel_truncated_riesz(const BasisCache& cache, const Vec4& w, const Vec4& wp, int pair);

enum class FunctionalKind { nu, F, dual };

struct SurfaceNode {
    double s = 0.0, t = 0.0, weight = 0.0;
    Vec4 x{};       // sigma(s,t)
    Vec4 scaled{};  // kappa sigma(s,t) / 2
    std::array<double, kPairCount> abs_jac{};
    std::array<double, kPairCount> coef{};  // weight per pair (prefactor and quadrature weight included)
};

// Functional sum_nodes sum_pairs coef * xi_pair(kappa sigma/2).
struct SurfaceFunctional {
    FunctionalKind kind = FunctionalKind::nu;
    double kappa = 1.0;
    std::vector<SurfaceNode> nodes;

    cplx pair_with(const MonomialForm<cplx>& f, WedgeSign sign = WedgeSign::printed) const;
    double norm2(int workers = 1) const;
    double inner(const SurfaceFunctional& other, int workers = 1) const;
};

SurfaceFunctional nu_surface(const SurfaceParam& S, double kappa, int resolution,
                             QuadratureRule rule = QuadratureRule::midpoint);
SurfaceFunctional F_surface(const SurfaceParam& S, double kappa, int resolution,
                            QuadratureRule rule = QuadratureRule::midpoint);
SurfaceFunctional dual_functional(const SurfaceParam& S, double kappa, int resolution,
                                  QuadratureRule rule = QuadratureRule::midpoint);

struct DualityResult {
    double F_norm2 = 0.0;
    double Fbar_norm2 = 0.0;
    double inner = 0.0;  // <F, Fbar>
    double cos_theta = 0.0;
    double sin_theta = 0.0;
    double theta = 0.0;
    double lk_estimate = 0.0;  // (kappa/2)^4 <F, Fbar> / (2 pi)^2
};

DualityResult duality_angle(const SurfaceParam& S, double kappa, int resolution, int workers = 1,
                            QuadratureRule rule = QuadratureRule::midpoint);

}  // namespace ym
