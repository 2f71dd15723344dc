#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ym/measure.hpp"

using namespace ym;

namespace {

double maxabs(const MatC& m) { return m.cwiseAbs().maxCoeff(); }

MeasureConfig config(GroupKind kind, int n, double kappa, int cutoff) {
    MeasureConfig cfg;
    cfg.kappa = kappa;
    cfg.cutoff = cutoff;
    cfg.algebra = build_basis(kind, n);
    cfg.w_nodes = 1024;
    return cfg;
}

FieldSample zero_field(const BasisCache& cache, int dim) {
    FieldSample A;
    A.coef = Eigen::MatrixXcd::Zero(cache.count(), dim);
    return A;
}

}  // namespace

TEST_CASE("configuration validation") {
    MeasureConfig cfg = config(GroupKind::SU, 2, 5.0, 2);
    CHECK_NOTHROW(cfg.validate());
    cfg.kappa = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = config(GroupKind::SU, 2, 5.0, -1);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = config(GroupKind::SU, 2, 5.0, 2);
    cfg.w_nodes = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(parse_variance(variance_name(VarianceConvention::unit_complex)) == VarianceConvention::unit_complex);
    CHECK(parse_completion(completion_name(Completion::none)) == Completion::none);
    CHECK_THROWS_AS(parse_variance("wide"), ConfigError);
}

TEST_CASE("coefficient conventions have the documented second moments") {
    const int n = 20000;
    std::mt19937_64 rng(123);
    struct Row {
        VarianceConvention v;
        double abs2;
    };
    for (const Row& r : {Row{VarianceConvention::real, 1.0}, Row{VarianceConvention::unit_complex, 1.0},
                         Row{VarianceConvention::unit_real_parts, 2.0}}) {
        double s2 = 0.0;
        cplx mean = 0.0, pseudo = 0.0;
        for (int i = 0; i < n; ++i) {
            const cplx c = draw_coefficient(r.v, rng);
            s2 += std::norm(c);
            mean += c;
            pseudo += c * c;
        }
        CHECK(s2 / n == doctest::Approx(r.abs2).epsilon(0.05));
        CHECK(std::abs(mean / double(n)) < 0.05);
        if (r.v == VarianceConvention::real) CHECK(std::abs(pseudo / double(n) - 1.0) < 0.05);
        else CHECK(std::abs(pseudo / double(n)) < 0.05);
    }
}

TEST_CASE("sampled fields: unit-norm pairings and independence across generators") {
    MeasureConfig cfg = config(GroupKind::SU, 2, 4.0, 1);
    cfg.variance = VarianceConvention::unit_complex;
    const BasisCache cache = gram_schmidt(cfg.kappa, cfg.cutoff);
    std::mt19937_64 rng(5);
    const int n = 10000;
    double s00 = 0.0;
    cplx cross = 0.0;
    for (int i = 0; i < n; ++i) {
        const FieldSample A = sample_field(cfg, cache, rng);
        CHECK(A.finite());
        s00 += std::norm(A.coef(0, 0));
        cross += A.coef(0, 0) * std::conj(A.coef(0, 1));
    }
    CHECK(s00 / n == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(cross / double(n)) < 0.05);
}

TEST_CASE("w quadrature nodes follow the Gaussian weight") {
    const auto w = w_quadrature(4096, 77);
    CHECK(w.size() == 4096);
    double r2 = 0.0;
    cplx m = 0.0;
    for (const CVec4& x : w) {
        for (int i = 0; i < 4; ++i) r2 += std::norm(x[i]);
        m += x[0];
    }
    CHECK(r2 / w.size() == doctest::Approx(4.0).epsilon(0.01));
    CHECK(std::abs(m / double(w.size())) < 0.02);
    CHECK(w_quadrature(64, 3)[7][2] == w_quadrature(64, 3)[7][2]);
}

TEST_CASE("density: trivial cases and the samplewise bound") {
    const MeasureConfig su2 = config(GroupKind::SU, 2, 5.0, 3);
    const BasisCache cache = gram_schmidt(su2.kappa, su2.cutoff);
    CHECK(density_Y(zero_field(cache, 3), su2, cache) == 1.0);

    const MeasureConfig u1 = config(GroupKind::U1, 1, 5.0, 3);
    std::mt19937_64 rng(2);
    const DensityEvaluator eu1(u1, cache);
    for (int k = 0; k < 5; ++k) CHECK(eu1.evaluate(sample_field(u1, cache, rng)).value() == 1.0);

    const DensityEvaluator ev(su2, cache);
    std::vector<FieldSample> batch;
    for (int k = 0; k < 1000; ++k) batch.push_back(sample_field(su2, cache, rng));
    int violations = 0;
    double spread = 0.0;
    for (const DensityValue& d : ev.evaluate(batch)) {
        if (!(d.log_value <= d.log_bound + 1e-12) || !std::isfinite(d.log_value)) ++violations;
        spread = std::max(spread, std::abs(d.log_value));
    }
    CHECK(violations == 0);
    CHECK(spread > 0.0);
    // batch and single evaluation agree
    CHECK(ev.evaluate(batch[3]).log_value == doctest::Approx(ev.evaluate(batch)[3].log_value).epsilon(1e-12));
}

TEST_CASE("density moment check") {
    MeasureConfig cfg = config(GroupKind::SU, 2, 10.0, 2);
    const MomentCheck m = density_moment_check(cfg, 1.0, 300);
    CHECK(std::isfinite(m.estimate));
    CHECK(m.estimate > 0.0);
    CHECK(m.bound == doctest::Approx(std::exp(3.0 / (4 * std::numbers::pi) / (1 - 3.0 / (2 * std::numbers::pi)))));
    CHECK(m.within_bound());
    CHECK_THROWS_AS(density_moment_check(cfg, 2.2, 10), ConfigError);
    CHECK_THROWS_AS(density_moment_check(cfg, 0.0, 10), ConfigError);
}

TEST_CASE("parallel translation along the P_{s,t} paths") {
    MeasureConfig cfg = config(GroupKind::SU, 2, 6.0, 2);
    const BasisCache cache = gram_schmidt(cfg.kappa, cfg.cutoff);
    const SurfaceParam S = make_tilted_plane(0.4);
    const FieldSample zero = zero_field(cache, 3);
    CHECK(maxabs(u_path(zero, S, 0.3, 0.7, cfg, cache, 32) - MatC::Identity(2, 2)) < 1e-14);
    std::mt19937_64 rng(31);
    const FieldSample A = sample_field(cfg, cache, rng);  // real coefficients under the default
    CHECK(maxabs(A.coef.imag()) == 0.0);
    CHECK(maxabs(u_path(A, S, 0.0, 0.0, cfg, cache, 128) - MatC::Identity(2, 2)) < 1e-8);
    for (const auto& st : {std::array<double, 2>{0.2, 0.3}, std::array<double, 2>{0.9, 0.95}}) {
        const MatC u = u_path(A, S, st[0], st[1], cfg, cache, 128);
        CHECK(maxabs(u.adjoint() * u - MatC::Identity(2, 2)) < 1e-8);
        CHECK(std::abs(u.determinant() - 1.0) < 1e-8);
    }
    // the incremental all-nodes sweep agrees with the single-point path
    const int n = 6;
    const WilsonContext ctx(S, cfg, cache, n, 64);
    const auto us = ctx.u_nodes(A);
    REQUIRE(us.size() == std::size_t(n * n));
    for (int j : {0, 3, 5}) {
        for (int i : {0, 2, 5}) {
            const MatC ref = u_path(A, S, (i + 0.5) / n, (j + 0.5) / n, cfg, cache, 64);
            CHECK(maxabs(us[j * n + i] - ref) < 1e-8);
        }
    }
}

TEST_CASE("Wilson functional: zero field, U(1) pairing, grid refinement") {
    MeasureConfig cfg = config(GroupKind::SU, 2, 6.0, 2);
    cfg.completion = Completion::none;
    const BasisCache cache = gram_schmidt(cfg.kappa, cfg.cutoff);
    const SurfaceParam S = make_rectangle(1, 1);
    std::mt19937_64 rng(41);
    CHECK(std::abs(wilson_J(zero_field(cache, 3), S, cfg, cache, 8, 16, rng) - 2.0) < 1e-12);

    // U(1): the Abelian pairing with nu computed independently from the functionals module
    MeasureConfig u1 = config(GroupKind::U1, 1, 6.0, 2);
    u1.completion = Completion::none;
    u1.variance = VarianceConvention::unit_complex;
    const SurfaceFunctional nu = nu_surface(S, u1.kappa, 32);
    for (int k = 0; k < 3; ++k) {
        const FieldSample A = sample_field(u1, cache, rng);
        const cplx J = wilson_J(A, S, u1, cache, 32, 16, rng);
        const cplx expect = std::exp(cplx(0, 1) * nu.pair_with(field_form(A, cache, 0)) / u1.kappa);
        CHECK(std::abs(J - expect) < 1e-6);
    }

    // SU(2): successive grid refinements get closer
    double d1 = 0.0, d2 = 0.0;
    for (int k = 0; k < 4; ++k) {
        const FieldSample A = sample_field(cfg, cache, rng);
        const cplx j8 = wilson_J(A, S, cfg, cache, 8, 32, rng);
        const cplx j16 = wilson_J(A, S, cfg, cache, 16, 32, rng);
        const cplx j32 = wilson_J(A, S, cfg, cache, 32, 32, rng);
        d1 += std::abs(j8 - j16);
        d2 += std::abs(j16 - j32);
    }
    CHECK(d2 < d1);
}

TEST_CASE("kernel completion reports its clipping") {
    MeasureConfig cfg = config(GroupKind::SU, 2, 8.0, 3);
    const BasisCache cache = gram_schmidt(cfg.kappa, cfg.cutoff);
    const WilsonContext ctx(make_rectangle(1, 1), cfg, cache, 8, 16);
    CHECK(ctx.clipped_tail() >= 0.0);
    CHECK(ctx.clipped_tail() < 1e-6);
}

TEST_CASE("Monte Carlo estimator: determinism, worker independence, stderr scaling") {
    MeasureConfig cfg = config(GroupKind::SU, 2, 5.0, 2);
    cfg.seed = 99;
    const SurfaceParam S = make_rectangle(1, 1);
    const MCEstimate a = mc_expectation(S, cfg, 200, 8, 16);
    const MCEstimate b = mc_expectation(S, cfg, 200, 8, 16);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    cfg.workers = 2;
    const MCEstimate c = mc_expectation(S, cfg, 200, 8, 16);
    CHECK(std::abs(a.mean - c.mean) < 1e-12);
    cfg.workers = 1;
    const MCEstimate big = mc_expectation(S, cfg, 800, 8, 16);
    CHECK(a.stderr_ / big.stderr_ == doctest::Approx(2.0).epsilon(0.3));
    CHECK(std::isfinite(big.mean.real()));
    CHECK(big.n_samples == 800);
    CHECK_THROWS_AS(mc_expectation(S, cfg, 1, 8, 16), ConfigError);
}

TEST_CASE("U(1) Monte Carlo agrees with the Gaussian closed form") {
    MeasureConfig cfg = config(GroupKind::U1, 1, 10.0, 3);
    cfg.seed = 7;
    const SurfaceParam S = make_rectangle(1, 1);
    const MCEstimate est = mc_expectation(S, cfg, 2000, 16, 16);
    const double exact = abelian_closed_form(S, cfg.kappa, 16);
    CHECK(std::abs(est.mean.real() - exact) < 3.0 * est.stderr_);
    CHECK(std::abs(est.mean.imag()) < 3.0 * est.stderr_ + 1e-12);
}

TEST_CASE("Gaussian quadratic exponential moment") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 0.3;
    A(1, 1) = 0.2;
    const GaussianQuadraticCheck g = gaussian_quadratic_mc(A, 200000, 5);
    CHECK(g.exact == doctest::Approx(1.0 / std::sqrt((1 - 2 * 0.09) * (1 - 2 * 0.04))).epsilon(1e-14));
    CHECK(std::abs(g.estimate - g.exact) < 3.0 * g.stderr_);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    bad(0, 0) = std::sqrt(0.5);
    CHECK_THROWS_AS(gaussian_quadratic_mc(bad, 10, 1), ConfigError);
}
