#include "ym/limits.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "ym/common.hpp"

namespace ym {

AreaLawResult area_law_limit(double area, const std::vector<MatC>& rho) {
    if (!(area >= 0)) throw ConfigError("area must be nonnegative");
    if (rho.empty()) throw ConfigError("representation has no generators");
    const int d = static_cast<int>(rho.front().rows());
    // mu(sum rho(E) (x) rho(E)) = sum rho(E) rho(E)
    MatC mu = MatC::Zero(d, d);
    for (const MatC& e : rho) mu += e * e;
    AreaLawResult r;
    r.area = area;
    r.exponent = (area / 8.0) * mu;
    r.value = r.exponent.exp().trace().real();
    const MatC herm = 0.5 * (mu + mu.adjoint());
    Eigen::SelfAdjointEigenSolver<MatC> es(herm);
    r.eigenvalues = es.eigenvalues();
    r.lambda = r.eigenvalues.maxCoeff();
    const cplx mean = mu.trace() / static_cast<double>(d);
    r.scalar = (mu - mean * MatC::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12;
    return r;
}

AreaLawResult area_law_limit(double area, const LieBasis& basis) {
    AreaLawResult r = area_law_limit(area, basis.generators);
    r.kind = basis.kind;
    r.n = basis.kind == GroupKind::U1 ? 1 : basis.matrix_dim;
    // mu(casimir_tensor) through the tensor route must agree with the direct product sum
    const MatC via_tensor = mu_contract(casimir_tensor(basis));
    MatC direct = MatC::Zero(basis.matrix_dim, basis.matrix_dim);
    for (const MatC& e : basis.generators) direct += e * e;
    if ((via_tensor - direct).cwiseAbs().maxCoeff() > 1e-10) {
        throw NumericalGuardError("area_law_limit: tensor contraction disagrees with direct sum");
    }
    return r;
}

AreaLawResult area_law_limit(const SurfaceParam& S, const LieBasis& basis, int resolution) {
    return area_law_limit(area(S, resolution, QuadratureRule::gauss_legendre), basis);
}

double area_law_closed_form(GroupKind kind, int n, double A) {
    switch (kind) {
        case GroupKind::U1: return std::exp(-A / 8.0);
        case GroupKind::SU: return n * std::exp((1.0 / n - n) * A / 8.0);
        case GroupKind::SO: return n * std::exp((1.0 - n) * A / 16.0);
    }
    return 0.0;
}

double rect_wilson(double R, double T, const LieBasis& basis) {
    if (!(R >= 0) || !(T >= 0)) throw ConfigError("R and T must be nonnegative");
    return area_law_limit(R * T, basis).value;
}

double quark_potential(double R, const LieBasis& basis, PotentialMode mode, double T) {
    if (!(R >= 0)) throw ConfigError("R must be nonnegative");
    if (mode == PotentialMode::ratio) {
        if (!(T >= 0)) throw ConfigError("T must be nonnegative");
        return -std::log(rect_wilson(R, T + 1.0, basis) / rect_wilson(R, T, basis));
    }
    // W(R,T) ~ exp(lambda_max R T / 8) as T grows
    const AreaLawResult a = area_law_limit(0.0, basis);
    return -a.lambda * R / 8.0;
}

double quark_potential_closed_form(GroupKind kind, int n, double R) {
    switch (kind) {
        case GroupKind::U1: return R / 8.0;
        case GroupKind::SU: return R / 8.0 * (n - 1.0 / n);
        case GroupKind::SO: return R / 16.0 * (n - 1.0);
    }
    return 0.0;
}

DualAreaLawReport dual_area_law(const SurfaceParam& S, const LieBasis& basis,
                                const std::vector<double>& kappas, int resolution, int workers) {
    DualAreaLawReport rep;
    for (double k : kappas) {
        DualRow row;
        row.kappa = k;
        row.duality = duality_angle(S, k, resolution, workers);
        row.kappa2_inner = k * k * row.duality.inner;
        rep.rows.push_back(row);
    }
    rep.limit = area_law_limit(S, basis);
    return rep;
}

}  // namespace ym
