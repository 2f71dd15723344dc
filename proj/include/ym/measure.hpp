#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ym/bargmann.hpp"
#include "ym/functionals.hpp"
#include "ym/lie_algebra.hpp"
#include "ym/surface.hpp"

namespace ym {

// real: real N(0,1) coefficients (the real space B). unit_complex: E|c|^2 = 1.
// unit_real_parts: E[Re^2] = E[Im^2] = 1.
enum class VarianceConvention { real, unit_complex, unit_real_parts };

// none: curvature pairings from the truncated field only. kernel: the surface curvature
// pairings additionally carry the Gaussian tail beyond the cutoff (covariance kernel minus
// truncated part), drawn independently of the truncated coefficients.
enum class Completion { none, kernel };

VarianceConvention parse_variance(const std::string& name);
const char* variance_name(VarianceConvention v);
Completion parse_completion(const std::string& name);
const char* completion_name(Completion c);

struct MeasureConfig {
    double kappa = 1.0;
    int cutoff = 4;
    LieBasis algebra;
    VarianceConvention variance = VarianceConvention::real;
    Completion completion = Completion::kernel;
    std::uint64_t seed = 1;
    int w_nodes = 4096;  // quasi-MC nodes for the C^4 integrals
    int workers = 1;

    void validate() const;  // throws ConfigError
};

// Coefficients of A_alpha in the orthonormal frame of a BasisCache: coef(k, alpha).
struct FieldSample {
    Eigen::MatrixXcd coef;

    int count() const { return static_cast<int>(coef.rows()); }
    int algebra_dim() const { return static_cast<int>(coef.cols()); }
    bool finite() const { return coef.allFinite(); }
};

// Draws one complex standard normal scalar under the convention.
cplx draw_coefficient(VarianceConvention v, std::mt19937_64& rng);

FieldSample sample_field(const MeasureConfig& cfg, const BasisCache& cache, std::mt19937_64& rng);

// The sample's component A_alpha as a polynomial 1-form.
MonomialForm<cplx> field_form(const FieldSample& A, const BasisCache& cache, int alpha);

// Nodes for integrals against d lambda_4(w) = pi^-4 exp(-|w|^2) d^8 w: scrambled Sobol points
// (random shift from the seed) mapped through the normal quantile. Equal weights 1/n.
std::vector<CVec4> w_quadrature(int n, std::uint64_t seed);

struct DensityValue {
    double log_value = 0.0;  // log Y
    double log_bound = 0.0;  // (1/2) int sum_{i<j,alpha} |(A_alpha, xi_ij (x) E^alpha)|^2
    double value() const;
};

// Precomputed frame values at the w-nodes; evaluates Y for batches of samples.
class DensityEvaluator {
public:
    DensityEvaluator(const MeasureConfig& cfg, const BasisCache& cache);

    DensityValue evaluate(const FieldSample& A) const;
    std::vector<DensityValue> evaluate(const std::vector<FieldSample>& batch) const;

private:
    int n_ = 0;
    int algebra_dim_ = 0;
    StructureConstants c_;
    bool abelian_ = true;
    // psi(w) (e_k)_i(w) and kappa psi(w) (d e_k)_{ij}(w) for the spatial pairs (12) (13) (23),
    // rows = nodes, split into real and imaginary parts.
    std::array<Eigen::MatrixXd, 3> pi_re_, pi_im_;
    std::array<Eigen::MatrixXd, 3> xi_re_, xi_im_;
};

double density_Y(const FieldSample& A, const MeasureConfig& cfg, const BasisCache& cache);

struct MomentCheck {
    double p = 1.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;  // exp(3pc/(4 pi)), c = 1/(1 - 3p/(2 pi))
    int n_samples = 0;
    bool within_bound() const { return estimate <= bound + 3.0 * stderr_; }
};

MomentCheck density_moment_check(const MeasureConfig& cfg, double p, int n_samples);
MomentCheck density_moment_check(const MeasureConfig& cfg, const BasisCache& cache, double p,
                                 int n_samples);

// Deterministic surface data for the Wilson functional on an n_grid x n_grid midpoint grid.
class WilsonContext {
public:
    WilsonContext(const SurfaceParam& S, const MeasureConfig& cfg, const BasisCache& cache,
                  int n_grid, int ode_steps);

    int n_grid() const { return n_; }
    // Largest clipped negative eigenvalue of the tail covariance (relative to the kernel diagonal).
    double clipped_tail() const { return clipped_; }

    // Parallel translation along P_{s,t} to every grid node, row-major (j * n + i).
    std::vector<MatC> u_nodes(const FieldSample& A) const;
    // Trace of the T-tilde ordered product; the rng supplies the tail draws (kernel completion).
    cplx evaluate(const FieldSample& A, std::mt19937_64& rng) const;

private:
    struct Eval {
        Eigen::RowVectorXd g;  // sum_i psi(x) (dx^i/dtau) (e_k)_i(x)
    };
    struct Pair {
        int pair = 0;
        Eigen::VectorXd abs_jac;  // per node
        Eigen::MatrixXd trunc;    // kappa psi(w) (d e_k)_P(w), rows = nodes
        Eigen::MatrixXd tail;     // L with L L^T = K - trunc trunc^T (clipped)
    };
    struct Quad {
        int i = 1, j = 2;
        Eigen::VectorXd abs_jac;
        Eigen::MatrixXd zi, zj;  // psi(w) (e_k)_i(w) at scaled nodes
    };

    MeasureConfig cfg_;
    int n_ = 0;
    int dim_ = 1;
    std::vector<MatC> rho_;
    StructureConstants c_;
    std::vector<Pair> pairs_;
    std::vector<Quad> quads_;
    double clipped_ = 0.0;
    // RK4 along the path: each segment is a list of steps, each step uses three eval rows
    // (start, middle, end) and a signed parameter step.
    Eigen::MatrixXd path_g_;  // rows = eval points
    struct Step {
        int e0, e1, e2;
        double h;
    };
    std::vector<Step> bottom_;
    std::vector<std::vector<Step>> right_;  // right_[j]: from t_{j-1} (or 0) to t_j
    std::vector<std::vector<Step>> rows_;   // rows_[j * n + i]: from s_{i+1} (or 1) to s_i

    MatC exponent(const Eigen::MatrixXcd& path_coef, int step_row) const;
};

cplx wilson_J(const FieldSample& A, const SurfaceParam& S, const MeasureConfig& cfg,
              const BasisCache& cache, int n_grid, int ode_steps, std::mt19937_64& rng);

// u_{s,t} for a single interior point (three-segment path, RK4 with ode_steps per unit length).
MatC u_path(const FieldSample& A, const SurfaceParam& S, double s, double t, const MeasureConfig& cfg,
            const BasisCache& cache, int ode_steps);

struct MCEstimate {
    cplx mean = 0.0;  // E[J Y] / E[Y]
    double stderr_ = 0.0;
    int n_samples = 0;
    cplx mean_J = 0.0, mean_JY = 0.0;
    double mean_Y = 0.0, stderr_Y = 0.0;
    cplx second_J = 0.0;  // E[|J|^2] stored in the real part
    double second_Y = 0.0;
    double clipped_tail = 0.0;
};

MCEstimate mc_expectation(const SurfaceParam& S, const MeasureConfig& cfg, int n_samples, int n_grid,
                          int ode_steps);

// exp[-|nu_S|^2 / (2 kappa^2)] on the same midpoint grid.
double abelian_closed_form(const SurfaceParam& S, double kappa, int resolution, int workers = 1);

struct GaussianQuadraticCheck {
    double estimate = 0.0;
    double stderr_ = 0.0;
    double exact = 0.0;  // det(1 - 2 A^* A)^{-1/2}
};

// E[exp <Ax, Ax>] for x ~ N(0, I_n); requires ||A^* A|| < 1/2.
GaussianQuadraticCheck gaussian_quadratic_mc(const Eigen::MatrixXd& A, int n_draws, std::uint64_t seed);

}  // namespace ym
