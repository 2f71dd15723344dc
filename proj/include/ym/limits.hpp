#pragma once

#include <vector>

#include "ym/functionals.hpp"
#include "ym/lie_algebra.hpp"
#include "ym/surface.hpp"

namespace ym {

struct AreaLawResult {
    GroupKind kind = GroupKind::U1;
    int n = 1;
    double area = 0.0;
    double value = 0.0;          // Tr exp[(area/8) mu(casimir)]
    MatC exponent;               // (area/8) mu(casimir)
    Eigen::VectorXd eigenvalues;  // of mu(casimir) (Hermitian), ascending
    bool scalar = false;          // mu(casimir) = lambda I
    double lambda = 0.0;          // largest eigenvalue of mu(casimir)
};

// Generic over representations: rho holds the representation matrices of an orthonormal basis.
AreaLawResult area_law_limit(double area, const std::vector<MatC>& rho);
AreaLawResult area_law_limit(double area, const LieBasis& basis);
AreaLawResult area_law_limit(const SurfaceParam& S, const LieBasis& basis, int resolution = 256);

// Closed forms: U(1) e^{-A/8}, SU(N) N e^{(1/N - N)A/8}, SO(N) N e^{(1 - N)A/16}.
double area_law_closed_form(GroupKind kind, int n, double area);

double rect_wilson(double R, double T, const LieBasis& basis);

enum class PotentialMode { analytic, ratio };

// V(R) = -lim_T log[W(R, T+1) / W(R, T)]. The analytic mode uses the dominant eigenvalue;
// the ratio mode evaluates the ratio at the given T.
double quark_potential(double R, const LieBasis& basis, PotentialMode mode = PotentialMode::analytic,
                       double T = 50.0);

// Closed forms: U(1) R/8, SU(N) (R/8)(N - 1/N), SO(N) (R/16)(N - 1).
double quark_potential_closed_form(GroupKind kind, int n, double R);

struct DualRow {
    double kappa = 0.0;
    DualityResult duality;
    double kappa2_inner = 0.0;  // kappa^2 <F, Fbar>
};

struct DualAreaLawReport {
    std::vector<DualRow> rows;
    AreaLawResult limit;  // asserted common limit for S and its vortex
};

DualAreaLawReport dual_area_law(const SurfaceParam& S, const LieBasis& basis,
                                const std::vector<double>& kappas, int resolution, int workers = 1);

}  // namespace ym
