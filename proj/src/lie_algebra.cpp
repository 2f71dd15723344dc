#include "ym/lie_algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace ym {

namespace {

constexpr double kImagTolerance = 1e-12;

MatC unit(int n, int r, int c) {
    MatC m = MatC::Zero(n, n);
    m(r, c) = 1.0;
    return m;
}

}  // namespace

bool StructureConstants::all_zero() const {
    for (double v : c) {
        if (v != 0.0) return false;
    }
    return true;
}

LieBasis build_basis(GroupKind kind, int n) {
    LieBasis basis;
    basis.kind = kind;
    basis.matrix_dim = n;
    const cplx I(0.0, 1.0);
    const double s = 1.0 / std::sqrt(2.0);
    switch (kind) {
        case GroupKind::U1: {
            if (n != 1) throw std::invalid_argument("u(1) basis requires matrix dimension 1");
            MatC e(1, 1);
            e(0, 0) = I;
            basis.generators.push_back(e);
            break;
        }
        case GroupKind::SU: {
            if (n < 2) throw std::invalid_argument("su(n) basis requires n >= 2");
            // Off-diagonal pairs first (symmetric then antisymmetric), then the Cartan part.
            for (int j = 0; j < n; ++j) {
                for (int k = j + 1; k < n; ++k) {
                    basis.generators.push_back(I * s * (unit(n, j, k) + unit(n, k, j)));
                    basis.generators.push_back(s * (unit(n, j, k) - unit(n, k, j)));
                }
            }
            for (int l = 1; l < n; ++l) {
                MatC h = MatC::Zero(n, n);
                const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
                for (int d = 0; d < l; ++d) h(d, d) = norm;
                h(l, l) = -l * norm;
                basis.generators.push_back(I * h);
            }
            break;
        }
        case GroupKind::SO: {
            if (n < 2) throw std::invalid_argument("so(n) basis requires n >= 2");
            for (int j = 0; j < n; ++j) {
                for (int k = j + 1; k < n; ++k) {
                    basis.generators.push_back(s * (unit(n, j, k) - unit(n, k, j)));
                }
            }
            break;
        }
    }
    return basis;
}

StructureConstants structure_constants(const LieBasis& basis) {
    StructureConstants sc;
    const int N = basis.algebra_dim();
    sc.dim = N;
    sc.c.assign(static_cast<std::size_t>(N) * N * N, 0.0);
    for (int a = 0; a < N; ++a) {
        for (int b = a + 1; b < N; ++b) {
            const MatC& Ea = basis.generators[a];
            const MatC& Eb = basis.generators[b];
            MatC comm = Ea * Eb - Eb * Ea;
            for (int g = 0; g < N; ++g) {
                cplx v = -(basis.generators[g] * comm).trace();
                if (std::abs(v.imag()) > kImagTolerance * (1.0 + std::abs(v.real()))) {
                    throw std::runtime_error("structure constant has non-negligible imaginary part");
                }
                sc.c[(static_cast<std::size_t>(g) * N + a) * N + b] = v.real();
                sc.c[(static_cast<std::size_t>(g) * N + b) * N + a] = -v.real();
            }
        }
    }
    return sc;
}

SpecialTensors special_tensors(int n) {
    const int n2 = n * n;
    SpecialTensors t;
    t.I = MatC::Identity(n2, n2);
    t.J = MatC::Zero(n2, n2);
    t.K = MatC::Zero(n2, n2);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            t.J(a * n + b, b * n + a) = 1.0;
        }
    }
    for (int a = 0; a < n; ++a) {
        for (int c = 0; c < n; ++c) {
            t.K(a * n + a, c * n + c) = 1.0;
        }
    }
    return t;
}

MatC casimir_tensor(const LieBasis& basis) {
    const int n = basis.matrix_dim;
    MatC t = MatC::Zero(n * n, n * n);
    for (const MatC& e : basis.generators) {
        t += Eigen::kroneckerProduct(e, e).eval();
    }
    return t;
}

MatC mu_contract(const MatC& t) {
    const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(t.rows()))));
    if (t.rows() != t.cols() || n * n != t.rows()) {
        throw std::invalid_argument("mu_contract expects a square n^2 x n^2 tensor");
    }
    MatC out = MatC::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        for (int d = 0; d < n; ++d) {
            cplx sum = 0.0;
            for (int b = 0; b < n; ++b) sum += t(a * n + b, b * n + d);
            out(a, d) = sum;
        }
    }
    return out;
}

GroupKind parse_group_kind(const std::string& name) {
    if (name == "U1" || name == "u1" || name == "U(1)") return GroupKind::U1;
    if (name == "SU" || name == "su") return GroupKind::SU;
    if (name == "SO" || name == "so") return GroupKind::SO;
    throw std::invalid_argument("unknown group kind: " + name);
}

const char* group_kind_name(GroupKind kind) {
    switch (kind) {
        case GroupKind::U1: return "U1";
        case GroupKind::SU: return "SU";
        case GroupKind::SO: return "SO";
    }
    return "?";
}

}  // namespace ym
