#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ym/functionals.hpp"

using namespace ym;

namespace {

MultiIndex mi(int a, int b, int c, int d) {
    MultiIndex p;
    p.m = {a, b, c, d};
    return p;
}

const double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TEST_CASE("evaluation functional of the normalized constant form") {
    for (double kappa : {1.0, 4.0}) {
        MonomialForm<cplx> f;
        f[1][mi(0, 0, 0, 0)] = 1.0;
        const double norm = std::sqrt(fd_inner(f, f, kappa).real());
        f[1][mi(0, 0, 0, 0)] = 1.0 / norm;
        for (const CVec4& w : {CVec4{0, 0, 0, 0}, CVec4{cplx(0.3, 0.2), 1.0, -0.5, cplx(0, 2)}}) {
            CHECK(std::abs(zeta_pair(f, w, 1) - 2.0 / (kappa * std::sqrt(3.0))) < 1e-14);
        }
    }
}

TEST_CASE("evaluation bound on random degree <= 4 forms") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const auto idx = multi_indices_up_to(4);
    const double kappa = 2.0;
    const CVec4 w{0.3, 0, 0, 0};
    for (int trial = 0; trial < 20; ++trial) {
        MonomialForm<cplx> f;
        for (int a = 1; a <= 3; ++a)
            for (int k = 0; k < 5; ++k) f[a][idx[rng() % idx.size()]] += cplx(g(rng), g(rng));
        const double norm = std::sqrt(fd_inner(f, f, kappa).real());
        for (int a = 1; a <= 3; ++a) {
            CHECK(std::abs(zeta_pair(f, w, a)) <= (2.0 / kappa) * std::exp(0.09 / 2.0) * norm * (1 + 1e-12));
        }
    }
}

TEST_CASE("xi pairing examples") {
    MonomialForm<cplx> f;
    f[1][mi(0, 0, 0, 0)] = 1.0;
    const double kappa = 3.0;
    const CVec4 w{cplx(0.4, -0.1), 0.2, 0.7, -0.3};
    CHECK(std::abs(xi_pair(f, w, 0, 1, kappa, false) - kappa * (-w[0] / 2.0)) < 1e-14);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    const auto idx = multi_indices_up_to(3);
    for (int a = 1; a <= 3; ++a)
        for (int k = 0; k < 4; ++k) f[a][idx[rng() % idx.size()]] += cplx(g(rng), g(rng));
    for (int p = 0; p < kNumPairs; ++p) {
        const auto [a, b] = pair_of(p);
        const cplx weighted = xi_pair(f, w, a, b, kappa, true);
        const cplx plain = xi_pair(f, w, a, b, kappa, false);
        CHECK(std::abs(weighted - psi(w) * plain) < 1e-13 * (1 + std::abs(plain)));
    }
}

TEST_CASE("reproducing kernel values") {
    const Vec4 x{0.1, -0.4, 0.3, 0.2}, y{0.5, 0.2, -0.1, 0.0};
    CHECK(xi_kernel(x, x, 2.0) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-14));
    double d2 = 0.0;
    for (int i = 0; i < 4; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
    CHECK(xi_kernel(x, y, 5.0) == doctest::Approx(std::exp(-d2 / 2.0) / kTwoPi).epsilon(1e-13));
    // independent oracle: truncated monomial expansion at cutoff 20 per axis
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int trial = 0; trial < 6; ++trial) {
        CVec4 w, v;
        for (int i = 0; i < 4; ++i) {
            w[i] = u(rng);
            v[i] = u(rng);
        }
        const cplx expansion = xi_kernel_expansion(w, v, 20);
        CHECK(std::abs(expansion - xi_kernel(w, v, 1.0)) < 1e-3);
    }
}

TEST_CASE("truncated Riesz representer never exceeds the full kernel on the diagonal") {
    const BasisCache cache = gram_schmidt(1.0, 3);
    for (const Vec4& x : {Vec4{0, 0, 0, 0}, Vec4{0.3, -0.2, 0.1, 0.4}}) {
        for (int pair = 0; pair < kNumPairs; ++pair) {
            const double k = xi_kernel_truncated_riesz(cache, x, x, pair);
            CHECK(k >= -1e-12);
            CHECK(k <= 1.0 / kTwoPi + 1e-12);
        }
    }
}

TEST_CASE("point surface has zero functional") {
    const SurfaceFunctional nu = nu_surface(make_point({0.1, 0.2, 0.3, 0.4}), 5.0, 8);
    CHECK(nu.norm2() == doctest::Approx(0.0).scale(1.0));
    MonomialForm<cplx> f;
    f[2][mi(1, 0, 0, 0)] = 1.0;
    CHECK(std::abs(nu.pair_with(f)) < 1e-14);
}

TEST_CASE("nu is additive over subpatches") {
    const SurfaceParam S = make_tilted_plane(0.4);
    const double kappa = 3.0;
    const auto rule = QuadratureRule::gauss_legendre;
    const SurfaceFunctional whole = nu_surface(S, kappa, 24, rule);
    const SurfaceFunctional left = nu_surface(make_subpatch(S, 0.0, 0.5, 0.0, 1.0), kappa, 24, rule);
    const SurfaceFunctional right = nu_surface(make_subpatch(S, 0.5, 1.0, 0.0, 1.0), kappa, 24, rule);
    MonomialForm<cplx> f;
    f[1][mi(1, 0, 0, 0)] = 1.0;
    f[2][mi(0, 1, 1, 0)] = cplx(0, 0.5);
    f[3][mi(0, 0, 0, 2)] = -0.25;
    const cplx sum = left.pair_with(f) + right.pair_with(f);
    CHECK(std::abs(whole.pair_with(f) - sum) < 1e-9 * (1 + std::abs(sum)));
    CHECK(whole.norm2() == doctest::Approx(left.norm2() + right.norm2() + 2 * left.inner(right)).epsilon(1e-8));
}

TEST_CASE("dual of a planar surface lives on the complementary wedge") {
    const SurfaceFunctional Fbar = dual_functional(make_rectangle(1, 1), 5.0, 8);
    for (const SurfaceNode& n : Fbar.nodes) {
        for (int p = 0; p < kPairCount; ++p) {
            if (p != 5) CHECK(n.coef[p] == 0.0);
        }
    }
}

TEST_CASE("dual has the same norm as F on the tilted plane") {
    const SurfaceParam S = make_tilted_plane(0.6);
    const SurfaceFunctional F = F_surface(S, 4.0, 16);
    const SurfaceFunctional Fbar = dual_functional(S, 4.0, 16);
    CHECK(Fbar.norm2() == doctest::Approx(F.norm2()).epsilon(1e-6));
}

TEST_CASE("duality angle: planar case and trigonometric consistency") {
    const DualityResult planar = duality_angle(make_rectangle(1, 1), 5.0, 12);
    CHECK(std::abs(planar.cos_theta) < 1e-12);
    CHECK(planar.theta == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    CHECK(std::abs(planar.lk_estimate) < 1e-12);
    for (const SurfaceParam& S : {make_folded(), make_spherical_cap(1.0, 0.8)}) {
        const DualityResult r = duality_angle(S, 3.0, 12);
        CHECK(r.cos_theta * r.cos_theta + r.sin_theta * r.sin_theta == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.F_norm2 > 0.0);
    }
}

TEST_CASE("kappa^2 <F, Fbar> decreases along the kappa sweep") {
    const SurfaceParam S = make_folded();
    double prev = INFINITY;
    for (double kappa : {5.0, 10.0, 20.0}) {
        const DualityResult r = duality_angle(S, kappa, 32);
        const double v = std::abs(kappa * kappa * r.inner);
        CHECK(v < prev);
        prev = v;
    }
}
