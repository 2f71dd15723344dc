#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ym {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

enum class GroupKind { U1, SU, SO };

// Generators are anti-Hermitian with -Tr[E^a E^b] = delta^{ab}.
struct LieBasis {
    GroupKind kind = GroupKind::U1;
    int matrix_dim = 1;
    std::vector<MatC> generators;

    int algebra_dim() const { return static_cast<int>(generators.size()); }
};

// c[gamma][alpha][beta] = -Tr[E^gamma [E^alpha, E^beta]], real.
struct StructureConstants {
    int dim = 0;
    std::vector<double> c;

    double operator()(int gamma, int alpha, int beta) const {
        return c[(static_cast<std::size_t>(gamma) * dim + alpha) * dim + beta];
    }
    bool all_zero() const;
};

struct SpecialTensors {
    MatC I, J, K;
};

// Throws std::invalid_argument for unsupported kind/dimension pairs.
LieBasis build_basis(GroupKind kind, int n);

StructureConstants structure_constants(const LieBasis& basis);

// Tensor entries are indexed row (a,b) -> a*n+b, column (c,d) -> c*n+d.
SpecialTensors special_tensors(int n);

MatC casimir_tensor(const LieBasis& basis);

// mu(T)_a^d = sum_b T^{ab}_{bd}; mu(X (x) Y) = X Y.
MatC mu_contract(const MatC& t);

GroupKind parse_group_kind(const std::string& name);
const char* group_kind_name(GroupKind kind);

}  // namespace ym
