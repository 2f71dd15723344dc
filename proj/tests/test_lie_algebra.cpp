#include <doctest.h>

#include <cmath>

#include "ym/lie_algebra.hpp"

using namespace ym;

namespace {

double maxabs(const MatC& m) { return m.cwiseAbs().maxCoeff(); }

struct Case {
    GroupKind kind;
    int n;
};

const Case kCases[] = {{GroupKind::U1, 1}, {GroupKind::SU, 2}, {GroupKind::SU, 3}, {GroupKind::SU, 4},
                       {GroupKind::SO, 3}, {GroupKind::SO, 4}, {GroupKind::SO, 5}};

int expected_dim(const Case& c) {
    switch (c.kind) {
        case GroupKind::U1: return 1;
        case GroupKind::SU: return c.n * c.n - 1;
        case GroupKind::SO: return c.n * (c.n - 1) / 2;
    }
    return 0;
}

}  // namespace

TEST_CASE("generators are orthonormal and anti-Hermitian") {
    for (const Case& c : kCases) {
        const LieBasis b = build_basis(c.kind, c.n);
        CHECK(b.algebra_dim() == expected_dim(c));
        for (int a = 0; a < b.algebra_dim(); ++a) {
            CHECK(maxabs(b.generators[a] + b.generators[a].adjoint()) < 1e-12);
            for (int d = 0; d < b.algebra_dim(); ++d) {
                const cplx tr = -(b.generators[a] * b.generators[d]).trace();
                CHECK(std::abs(tr - cplx(a == d ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("structure constants: antisymmetry, U(1) zero, su(2) magnitude") {
    for (const Case& c : kCases) {
        const LieBasis b = build_basis(c.kind, c.n);
        const StructureConstants sc = structure_constants(b);
        for (int g = 0; g < sc.dim; ++g) {
            for (int a = 0; a < sc.dim; ++a) {
                for (int d = 0; d < sc.dim; ++d) CHECK(sc(g, a, d) == -sc(g, d, a));
            }
        }
        if (c.kind == GroupKind::U1) CHECK(sc.all_zero());
    }
    // Oracle: explicit Pauli basis E = i sigma / sqrt 2, c = -Tr[E^3 [E^1, E^2]].
    MatC s1(2, 2), s2(2, 2), s3(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, cplx(0, -1), cplx(0, 1), 0;
    s3 << 1, 0, 0, -1;
    const cplx i(0, 1);
    const MatC E1 = i * s1 / std::sqrt(2.0), E2 = i * s2 / std::sqrt(2.0), E3 = i * s3 / std::sqrt(2.0);
    const double oracle = std::abs((-(E3 * (E1 * E2 - E2 * E1))).trace());
    CHECK(oracle == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    const StructureConstants sc = structure_constants(build_basis(GroupKind::SU, 2));
    double largest = 0.0;
    for (double v : sc.c) largest = std::max(largest, std::abs(v));
    CHECK(largest == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("structure constants are reproducible bit for bit") {
    const LieBasis b = build_basis(GroupKind::SU, 3);
    CHECK(structure_constants(b).c == structure_constants(b).c);
}

TEST_CASE("special tensor identities") {
    for (int n = 2; n <= 5; ++n) {
        const SpecialTensors t = special_tensors(n);
        const int d = n * n;
        const MatC I = MatC::Identity(d, d);
        CHECK(maxabs(t.I - I) < 1e-12);
        CHECK(maxabs(t.J * t.J - I) < 1e-12);
        CHECK(maxabs(t.K * t.K - double(n) * t.K) < 1e-12);
        CHECK(maxabs(t.K * t.J - t.K) < 1e-12);
    }
}

TEST_CASE("casimir tensors match the closed forms") {
    for (int n : {2, 3, 4}) {
        const SpecialTensors t = special_tensors(n);
        const MatC expect = t.I / double(n) - t.J;
        CHECK(maxabs(casimir_tensor(build_basis(GroupKind::SU, n)) - expect) < 1e-12);
    }
    for (int n : {3, 4, 5}) {
        const SpecialTensors t = special_tensors(n);
        CHECK(maxabs(casimir_tensor(build_basis(GroupKind::SO, n)) - (t.K - t.J) / 2.0) < 1e-12);
    }
    const MatC u1 = casimir_tensor(build_basis(GroupKind::U1, 1));
    CHECK(u1.rows() == 1);
    CHECK(std::abs(u1(0, 0) - cplx(-1.0)) < 1e-14);
}

TEST_CASE("mu contraction") {
    for (int n = 1; n <= 4; ++n) {
        const MatC I = MatC::Identity(n, n);
        const MatC II = Eigen::MatrixXcd::Identity(n * n, n * n);
        CHECK(maxabs(mu_contract(II) - I) < 1e-12);
    }
    // mu(X (x) Y) = X Y on random matrices
    const MatC X = MatC::Random(3, 3), Y = MatC::Random(3, 3);
    MatC XY(9, 9);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d) XY(a * 3 + b, c * 3 + d) = X(a, c) * Y(b, d);
    CHECK(maxabs(mu_contract(XY) - X * Y) < 1e-12);

    CHECK(maxabs(mu_contract(casimir_tensor(build_basis(GroupKind::SU, 2))) + 1.5 * MatC::Identity(2, 2)) <
          1e-12);
    CHECK(maxabs(mu_contract(casimir_tensor(build_basis(GroupKind::SO, 3))) + MatC::Identity(3, 3)) < 1e-12);
    for (const Case& c : kCases) {
        const LieBasis b = build_basis(c.kind, c.n);
        const MatC m = mu_contract(casimir_tensor(b));
        const cplx s = m(0, 0);
        CHECK(std::abs(s.imag()) < 1e-12);
        CHECK(maxabs(m - s * MatC::Identity(b.matrix_dim, b.matrix_dim)) < 1e-12);
    }
}

TEST_CASE("group names round trip and reject garbage") {
    for (GroupKind k : {GroupKind::U1, GroupKind::SU, GroupKind::SO}) {
        CHECK(parse_group_kind(group_kind_name(k)) == k);
    }
    CHECK_THROWS_AS(parse_group_kind("E8"), std::invalid_argument);
    CHECK_THROWS_AS(build_basis(GroupKind::SU, 1), std::invalid_argument);
}
