#include <doctest.h>

#include <cmath>
#include <random>

#include "ym/bargmann.hpp"

using namespace ym;

namespace {

MultiIndex mi(int a, int b, int c, int d) {
    MultiIndex p;
    p.m = {a, b, c, d};
    return p;
}

Poly<Rational> mono(const MultiIndex& p, Rational c = 1) {
    Poly<Rational> f;
    f[p] = c;
    return f;
}

MonomialForm<Rational> form(int comp, const MultiIndex& p, Rational c = 1) {
    MonomialForm<Rational> f;
    f[comp] = mono(p, c);
    return f;
}

const BasisElement& element(const BasisCache& cache, int comp, const MultiIndex& p) {
    for (const BasisElement& e : cache.elements) {
        if (e.component == comp && e.p == p) return e;
    }
    throw std::runtime_error("element not found");
}

Rational factorial(int n) {
    Rational f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// Hermite recursion h_{n+1} = x h_n - h_n' (test-only anchor of the d operator).
std::vector<std::vector<double>> hermite(int nmax) {
    std::vector<std::vector<double>> h{{1.0}};
    for (int n = 0; n < nmax; ++n) {
        const auto& c = h[n];
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) next[k + 1] += c[k];
        for (std::size_t k = 1; k < c.size(); ++k) next[k - 1] -= k * c[k];
        h.push_back(next);
    }
    return h;
}

double horner(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

}  // namespace

TEST_CASE("n2 ordering and predecessors") {
    const auto all = multi_indices_up_to(3);
    CHECK(all.size() == 35);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(n2_less(all[i - 1], all[i]));
    CHECK(n2_less(mi(3, 0, 0, 0), mi(0, 0, 0, 4)));
    CHECK(n2_less(mi(0, 1, 0, 0), mi(1, 0, 0, 0)));
    CHECK_FALSE(n2_less(mi(1, 0, 0, 0), mi(0, 1, 0, 0)));
    CHECK(predecessor(mi(2, 0, 0, 0), 0).value() == mi(0, 0, 0, 0));
    CHECK_FALSE(predecessor(mi(1, 0, 0, 0), 0).has_value());
    CHECK(multi_indices_up_to(6).size() == 210);
}

TEST_CASE("d operator on monomials") {
    const MultiIndex one = mi(0, 0, 0, 0), z0 = mi(1, 0, 0, 0), z0sq = mi(2, 0, 0, 0);
    const Poly<Rational> d1 = dz_op(0, mono(one));
    CHECK(d1.size() == 1);
    CHECK(d1.at(z0) == Rational(-1, 2));
    const Poly<Rational> dz = dz_op(0, mono(z0));
    CHECK(dz.size() == 2);
    CHECK(dz.at(one) == Rational(1, 2));
    CHECK(dz.at(z0sq) == Rational(-1, 2));
    const Poly<Rational> d2 = dz_op(0, mono(z0sq));
    CHECK(h2_inner(d2, d2) == Rational(5, 2));
}

TEST_CASE("norm of d z_0^n is exact for n <= 10") {
    for (int n = 0; n <= 10; ++n) {
        const Poly<Rational> d = dz_op(0, mono(mi(n, 0, 0, 0)));
        const Rational expect = n == 0 ? Rational(1, 4) : Rational(n * n, 4) * factorial(n - 1) + factorial(n + 1) / 4;
        CHECK(h2_inner(d, d) == expect);
    }
}

TEST_CASE("Hermite anchor of the d operator") {
    // d/dx (h_n e^{-x^2/4}) = (n h_{n-1}/2 - h_{n+1}/2) e^{-x^2/4}
    const auto h = hermite(9);
    for (int n = 1; n <= 8; ++n) {
        for (double x : {-1.7, -0.4, 0.0, 0.9, 2.3}) {
            auto f = [&](double y) { return horner(h[n], y) * std::exp(-y * y / 4.0); };
            const double step = 1e-5;
            const double lhs = (f(x + step) - f(x - step)) / (2 * step);
            const double rhs = (n * horner(h[n - 1], x) / 2.0 - horner(h[n + 1], x) / 2.0) * std::exp(-x * x / 4.0);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("exterior d of 1 dx^1 and of zero") {
    const TwoFormPoly<Rational> d = exterior_d(form(1, mi(0, 0, 0, 0)));
    CHECK(d.at(0, 1).at(mi(1, 0, 0, 0)) == Rational(-1, 2));
    CHECK(d.at(0, 1).size() == 1);
    CHECK(abs(d.at(1, 2).at(mi(0, 0, 1, 0))) == Rational(1, 2));
    CHECK(d.at(1, 2).size() == 1);
    CHECK(abs(d.at(1, 3).at(mi(0, 0, 0, 1))) == Rational(1, 2));
    CHECK(d.at(1, 3).size() == 1);
    CHECK(d.at(0, 2).empty());
    CHECK(d.at(0, 3).empty());
    CHECK(d.at(2, 3).empty());
    const TwoFormPoly<Rational> z = exterior_d(MonomialForm<Rational>{});
    for (const auto& c : z.comp) CHECK(c.empty());
}

TEST_CASE("z_0 dx^1 and z_0 dx^2 have orthogonal images") {
    CHECK(fd_inner_unit(form(1, mi(1, 0, 0, 0)), form(2, mi(1, 0, 0, 0))) == Rational(0));
}

TEST_CASE("H2 inner product examples") {
    CHECK(h2_inner(mono(mi(2, 0, 0, 0)), mono(mi(2, 0, 0, 0))) == Rational(2));
    CHECK(h2_inner(mono(mi(1, 0, 0, 0)), mono(mi(0, 1, 0, 0))) == Rational(0));
    // z^p / sqrt(p!) orthonormal: <z^p, z^q> = p! delta
    for (const auto& p : multi_indices_up_to(4)) {
        for (const auto& q : multi_indices_up_to(4)) {
            const Rational v = h2_inner(mono(p), mono(q));
            CHECK(v == (p == q ? multi_factorial<Rational>(p) : Rational(0)));
        }
    }
    // <chi_w, chi_w> = e^{|w|^2} from the truncated series
    const double w = 0.8;
    Poly<cplx> chi;
    double fact = 1.0;
    for (int n = 0; n <= 30; ++n) {
        if (n > 0) fact *= n;
        chi[mi(n, 0, 0, 0)] = std::pow(w, n) / fact;
    }
    CHECK(std::abs(h2_inner(chi, chi) - std::exp(w * w)) < 1e-12);
}

TEST_CASE("d,kappa inner product examples and scaling") {
    const MultiIndex one = mi(0, 0, 0, 0);
    for (double kappa : {1.0, 2.0, 7.0}) {
        MonomialForm<cplx> f, g;
        f[1][one] = 1.0;
        g[1][mi(2, 0, 0, 0)] = 1.0;
        CHECK(std::abs(fd_inner(f, f, kappa) - 0.75 * kappa * kappa) < 1e-12 * kappa * kappa);
        CHECK(std::abs(fd_inner(g, f, kappa) + 0.5 * kappa * kappa) < 1e-12 * kappa * kappa);
    }
    CHECK(monomial_gram(1, one, 1, one) == Rational(3, 4));
    CHECK(monomial_gram(1, mi(2, 0, 0, 0), 1, one) == Rational(-1, 2));
}

TEST_CASE("monomial norm bounds for r <= 6") {
    for (int a = 1; a <= 3; ++a) {
        for (const auto& p : multi_indices_up_to(6)) {
            const double n = std::sqrt(to_double(monomial_gram(a, p, a, p)));
            const double pf = std::sqrt(to_double(multi_factorial<Rational>(p)));
            CHECK(n >= 0.5 * pf - 1e-12);
            CHECK(n <= 3.0 * (p.degree() + 1) * pf + 1e-12);
        }
    }
}

TEST_CASE("wedge sign convention does not change norm-level results") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> coef(-5, 5);
    const auto idx = multi_indices_up_to(3);
    for (int trial = 0; trial < 20; ++trial) {
        MonomialForm<Rational> f, g;
        for (int a = 1; a <= 3; ++a) {
            for (int k = 0; k < 4; ++k) {
                poly_add(f[a], idx[rng() % idx.size()], Rational(coef(rng)));
                poly_add(g[a], idx[rng() % idx.size()], Rational(coef(rng)));
            }
        }
        CHECK(fd_inner_unit(f, f, WedgeSign::printed) == fd_inner_unit(f, f, WedgeSign::flipped));
        CHECK(fd_inner_unit(g, g, WedgeSign::printed) == fd_inner_unit(g, g, WedgeSign::flipped));
    }
    // cross-component Gram entries live on a single wedge and are sign-free
    for (const auto& p : multi_indices_up_to(2)) {
        for (const auto& q : multi_indices_up_to(2)) {
            MonomialForm<Rational> f = form(1, p), g = form(2, q);
            CHECK(fd_inner_unit(f, g, WedgeSign::printed) == monomial_gram(1, p, 2, q));
            CHECK(fd_inner_unit(f, g, WedgeSign::flipped) == monomial_gram(1, p, 2, q));
        }
    }
}

TEST_CASE("Gram-Schmidt examples") {
    for (double kappa : {1.0, 2.0, 7.0}) {
        const BasisCache cache = gram_schmidt(kappa, 3);
        for (int a = 1; a <= 3; ++a) {
            const BasisElement& e0 = element(cache, a, mi(0, 0, 0, 0));
            CHECK(e0.hat.size() == 1);
            CHECK(e0.hat[0].second == Rational(1));
            CHECK(e0.hat_norm2 == Rational(3, 4));
            const BasisElement& e1 = element(cache, a, mi(1, 0, 0, 0));
            CHECK(e1.hat.size() == 1);
            CHECK(cache.monomials.at(e1.hat[0].first) == mi(1, 0, 0, 0));
        }
        // norm kappa sqrt(3)/2 for the constant element
        int k0 = -1;
        for (int k = 0; k < cache.count(); ++k) {
            if (cache.elements[k].component == 1 && cache.elements[k].p == mi(0, 0, 0, 0)) k0 = k;
        }
        CHECK(cache.hat_norm(k0) == doctest::Approx(kappa * std::sqrt(3.0) / 2.0).epsilon(1e-14));
        const BasisElement& e2 = element(cache, 1, mi(2, 0, 0, 0));
        Poly<Rational> hat;
        for (const auto& [m, c] : e2.hat) hat[cache.monomials.at(m)] = c;
        Poly<Rational> expect;
        expect[mi(2, 0, 0, 0)] = 1;
        expect[mi(0, 0, 0, 0)] = Rational(2, 3);
        CHECK(hat == expect);
    }
}

TEST_CASE("Gram-Schmidt coefficients are kappa independent") {
    const BasisCache a = gram_schmidt(1.0, 3), b = gram_schmidt(7.0, 3);
    REQUIRE(a.count() == b.count());
    for (int k = 0; k < a.count(); ++k) {
        CHECK(a.elements[k].hat == b.elements[k].hat);
        CHECK(a.elements[k].frame == b.elements[k].frame);
        CHECK(b.hat_norm(k) == doctest::Approx(7.0 * a.hat_norm(k)).epsilon(1e-13));
    }
}

TEST_CASE("BasisCache validation at R_max = 6") {
    for (double kappa : {1.0, 3.0}) {
        const BasisCache cache = gram_schmidt(kappa, 6);
        CHECK(cache.count() == 3 * 210);
        const GramReport rep = validate_basis(cache);
        CHECK(rep.lower_degree_residual <= 1e-10);
        CHECK(rep.frame_offdiag_residual <= 1e-10);
        CHECK(rep.bounds_hold);
        // documented discrepancies: cross-component coupling and the sparse recursion
        CHECK(rep.cross_component_overlap > 1e-3);
        CHECK(rep.sparse_violations > 0);
    }
}

TEST_CASE("BasisCache JSON round trip") {
    const BasisCache cache = gram_schmidt(2.5, 3);
    const BasisCache back = basis_cache_from_json(basis_cache_to_json(cache));
    CHECK(back.kappa == cache.kappa);
    CHECK(back.rmax == cache.rmax);
    REQUIRE(back.count() == cache.count());
    for (int k = 0; k < cache.count(); ++k) {
        CHECK(back.elements[k].component == cache.elements[k].component);
        CHECK(back.elements[k].p == cache.elements[k].p);
        CHECK(back.elements[k].hat == cache.elements[k].hat);
        CHECK(back.elements[k].hat_norm2 == cache.elements[k].hat_norm2);
        CHECK(back.elements[k].frame == cache.elements[k].frame);
        CHECK(back.elements[k].frame_norm2 == cache.elements[k].frame_norm2);
    }
    CHECK_THROWS(basis_cache_from_json("{\"schema_version\": 99}"));
    CHECK(rational_from_string(rational_to_string(Rational(-7, 12))) == Rational(-7, 12));
}

TEST_CASE("frame coefficients are orthonormal in the d,kappa metric") {
    const double kappa = 1.7;
    const BasisCache cache = gram_schmidt(kappa, 2);
    const Eigen::MatrixXd F = cache.frame_coefficients();
    const int M = cache.monomials.size();
    Eigen::MatrixXd G(3 * M, 3 * M);
    for (int a = 1; a <= 3; ++a)
        for (int i = 0; i < M; ++i)
            for (int b = 1; b <= 3; ++b)
                for (int j = 0; j < M; ++j)
                    G((a - 1) * M + i, (b - 1) * M + j) =
                        kappa * kappa * to_double(monomial_gram(a, cache.monomials.at(i), b, cache.monomials.at(j)));
    const Eigen::MatrixXd I = F.transpose() * G * F;
    CHECK((I - Eigen::MatrixXd::Identity(cache.count(), cache.count())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("measurable norm examples") {
    auto one = [](const MultiIndex& p) { return std::vector<NormTerm>{{1, p, 1.0}}; };
    CHECK(measurable_norm_bound(one(mi(0, 0, 0, 0)), NormMode::upper_bound) == doctest::Approx(1.0));
    CHECK(measurable_norm_bound(one(mi(1, 0, 0, 0)), NormMode::upper_bound) == doctest::Approx(0.5));
    CHECK(measurable_norm_bound(one(mi(2, 0, 0, 0)), NormMode::upper_bound) == doctest::Approx(54.25));
    std::mt19937_64 rng(5);
    const auto idx = multi_indices_up_to(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<NormTerm> terms;
        for (int k = 0; k < 4; ++k) terms.push_back({1 + int(rng() % 3), idx[rng() % idx.size()], double(rng() % 7) - 3.0});
        const double ub = measurable_norm_bound(terms, NormMode::upper_bound);
        const double opt = measurable_norm_bound(terms, NormMode::optimize);
        CHECK(opt <= ub + 1e-12);
        CHECK(opt >= 0.0);
    }
}
