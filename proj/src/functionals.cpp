#include "ym/functionals.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>

namespace ym {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

cplx mono(const MultiIndex& p, const CVec4& w) {
    cplx v = 1.0;
    for (int i = 0; i < 4; ++i) {
        for (int k = 0; k < p[i]; ++k) v *= w[i];
    }
    return v;
}

}  // namespace

double psi(const CVec4& w) {
    double s = 0.0;
    for (const cplx& z : w) s += std::norm(z);
    return std::exp(-0.5 * s) * kInvSqrt2Pi;
}

double psi(const Vec4& x) { return psi(to_complex(x)); }

CVec4 to_complex(const Vec4& x) { return {x[0], x[1], x[2], x[3]}; }

cplx chi(const CVec4& w, const CVec4& z) {
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::conj(w[i]) * z[i];
    return std::exp(s);
}

cplx eval_poly(const Poly<cplx>& f, const CVec4& w) {
    cplx s = 0.0;
    for (const auto& [p, c] : f) s += c * mono(p, w);
    return s;
}

cplx zeta_pair(const MonomialForm<cplx>& f, const CVec4& w, int a) {
    if (a < 1 || a > 3) throw std::invalid_argument("zeta_pair: component must be 1, 2 or 3");
    return eval_poly(f[a], w);
}

cplx xi_pair(const MonomialForm<cplx>& f, const CVec4& w, int a, int b, double kappa, bool weighted,
             WedgeSign sign) {
    if (!(0 <= a && a < b && b <= 3)) {
        throw std::invalid_argument("xi_pair: (a,b) must satisfy 0 <= a < b <= 3");
    }
    const TwoFormPoly<cplx> d = exterior_d(f, sign);
    cplx v = kappa * eval_poly(d.at(a, b), w);
    if (weighted) v *= psi(w);
    return v;
}

cplx xi_kernel(const CVec4& w, const CVec4& wp, double /*kappa*/) {
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) s += w[i] * std::conj(wp[i]);
    return psi(w) * psi(wp) * std::exp(s);
}

double xi_kernel(const Vec4& x, const Vec4& xp, double /*kappa*/) {
    double d2 = 0.0;
    for (int i = 0; i < 4; ++i) d2 += (x[i] - xp[i]) * (x[i] - xp[i]);
    return std::exp(-0.5 * d2) / (2.0 * kPi);
}

cplx xi_kernel_expansion(const CVec4& w, const CVec4& wp, int per_axis_cutoff) {
    // d xi(w) = (1/kappa) psi_w chi_w on its wedge component, so the d,kappa inner
    // product is psi_w psi_w' <chi_w', chi_w>; chi factorizes over the axes.
    cplx prod = psi(w) * psi(wp);
    for (int axis = 0; axis < 4; ++axis) {
        Poly<cplx> a, b;
        cplx pa = 1.0, pb = 1.0;
        double fact = 1.0;
        for (int n = 0; n <= per_axis_cutoff; ++n) {
            if (n > 0) {
                pa *= std::conj(wp[axis]);
                pb *= std::conj(w[axis]);
                fact *= n;
            }
            MultiIndex m;
            m.m[axis] = n;
            a[m] = pa / fact;
            b[m] = pb / fact;
        }
        prod *= h2_inner(a, b);
    }
    return prod;
}

double xi_kernel_truncated_riesz(const BasisCache& cache, const Vec4& w, const Vec4& wp, int pair) {
    const MonomialIndexer ext(cache.rmax + 1);
    const auto D = cache.frame_d_coefficients(ext);
    Eigen::VectorXd mw(ext.size()), mwp(ext.size());
    ext.evaluate(w, mw.data());
    ext.evaluate(wp, mwp.data());
    const Eigen::VectorXd a = D[pair].transpose() * mw;
    const Eigen::VectorXd b = D[pair].transpose() * mwp;
    // kappa psi (d e_k) with e_k normalized in the kappa metric: the kappa factors cancel.
    return cache.kappa * cache.kappa * psi(w) * psi(wp) * a.dot(b);
}

cplx SurfaceFunctional::pair_with(const MonomialForm<cplx>& f, WedgeSign sign) const {
    const TwoFormPoly<cplx> d = exterior_d(f, sign);
    cplx s = 0.0;
    for (const SurfaceNode& n : nodes) {
        const CVec4 w = to_complex(n.scaled);
        const double ps = psi(n.scaled);
        for (int k = 0; k < kPairCount; ++k) {
            if (n.coef[k] == 0.0) continue;
            s += n.coef[k] * kappa * ps * eval_poly(d.comp[k], w);
        }
    }
    return s;
}

double SurfaceFunctional::inner(const SurfaceFunctional& other, int workers) const {
    const std::size_t n = nodes.size();
    const auto& on = other.nodes;
    return parallel_sum(n, workers, [&](std::size_t i) {
        double row = 0.0;
        for (const SurfaceNode& m : on) {
            double dot = 0.0;
            for (int k = 0; k < kPairCount; ++k) dot += nodes[i].coef[k] * m.coef[k];
            if (dot == 0.0) continue;
            row += dot * xi_kernel(nodes[i].scaled, m.scaled, kappa);
        }
        return row;
    }, 16);
}

double SurfaceFunctional::norm2(int workers) const { return inner(*this, workers); }

namespace {

SurfaceFunctional build(const SurfaceParam& S, double kappa, int resolution, QuadratureRule rule,
                        FunctionalKind kind) {
    if (!(kappa > 0)) throw ConfigError("kappa must be positive");
    SurfaceFunctional F;
    F.kind = kind;
    F.kappa = kappa;
    for (const QuadNode& q : tensor_quadrature(resolution, rule)) {
        SurfaceNode n;
        n.s = q.s;
        n.t = q.t;
        n.weight = q.w;
        const SurfacePoint p = S.at(q.s, q.t);
        n.x = p.x;
        for (int i = 0; i < 4; ++i) n.scaled[i] = 0.5 * kappa * p.x[i];
        const JacobianSet js = jacobians(p);
        for (int k = 0; k < kPairCount; ++k) n.abs_jac[k] = js.abs_det(k);
        for (int k = 0; k < kPairCount; ++k) {
            switch (kind) {
                case FunctionalKind::nu:
                    n.coef[k] = q.w * 0.25 * kappa * kappa * n.abs_jac[k];
                    break;
                case FunctionalKind::F:
                    n.coef[k] = q.w * n.abs_jac[k];
                    break;
                case FunctionalKind::dual: {
                    const auto [a, b] = pair_of(k);
                    const int kc = complementary_pair(k);
                    const auto [c, d] = pair_of(kc);
                    n.coef[k] = q.w * levi_civita4(a, b, c, d) * n.abs_jac[kc];
                    break;
                }
            }
        }
        F.nodes.push_back(n);
    }
    return F;
}

}  // namespace

SurfaceFunctional nu_surface(const SurfaceParam& S, double kappa, int resolution, QuadratureRule rule) {
    return build(S, kappa, resolution, rule, FunctionalKind::nu);
}

SurfaceFunctional F_surface(const SurfaceParam& S, double kappa, int resolution, QuadratureRule rule) {
    return build(S, kappa, resolution, rule, FunctionalKind::F);
}

SurfaceFunctional dual_functional(const SurfaceParam& S, double kappa, int resolution,
                                  QuadratureRule rule) {
    return build(S, kappa, resolution, rule, FunctionalKind::dual);
}

DualityResult duality_angle(const SurfaceParam& S, double kappa, int resolution, int workers,
                            QuadratureRule rule) {
    const SurfaceFunctional F = F_surface(S, kappa, resolution, rule);
    const SurfaceFunctional Fb = dual_functional(S, kappa, resolution, rule);
    DualityResult r;
    r.F_norm2 = F.norm2(workers);
    r.Fbar_norm2 = Fb.norm2(workers);
    if (!(r.F_norm2 > 0)) throw std::invalid_argument("duality_angle: |F| = 0 (degenerate surface)");
    r.inner = F.inner(Fb, workers);
    r.cos_theta = std::clamp(r.inner / r.F_norm2, -1.0, 1.0);
    r.sin_theta = std::sqrt(std::max(0.0, 1.0 - r.cos_theta * r.cos_theta));
    r.theta = std::acos(r.cos_theta);
    r.lk_estimate = std::pow(kappa / 2.0, 4) * r.inner / (4.0 * kPi * kPi);
    return r;
}

}  // namespace ym
