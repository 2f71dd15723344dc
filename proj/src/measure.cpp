#include "ym/measure.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <boost/math/constants/constants.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/random/sobol.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "ym/common.hpp"

namespace ym {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr int kSpatialPairs[3] = {3, 4, 5};  // (1,2) (1,3) (2,3)

double psi_real(const Vec4& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::exp(-0.5 * s) / std::sqrt(2.0 * kPi);
}

// Rows of the frame belonging to component i = 1..3.
Eigen::MatrixXd component_rows(const Eigen::MatrixXd& F, int M, int i) {
    return F.middleRows((i - 1) * M, M);
}

int spatial_pair(int i, int j) { return pair_index(i, j); }

}  // namespace

VarianceConvention parse_variance(const std::string& name) {
    if (name == "real") return VarianceConvention::real;
    if (name == "unit_complex") return VarianceConvention::unit_complex;
    if (name == "unit_real_parts") return VarianceConvention::unit_real_parts;
    throw ConfigError("unknown variance convention: " + name);
}

const char* variance_name(VarianceConvention v) {
    switch (v) {
        case VarianceConvention::real: return "real";
        case VarianceConvention::unit_complex: return "unit_complex";
        case VarianceConvention::unit_real_parts: return "unit_real_parts";
    }
    return "?";
}

Completion parse_completion(const std::string& name) {
    if (name == "none") return Completion::none;
    if (name == "kernel") return Completion::kernel;
    throw ConfigError("unknown completion: " + name);
}

const char* completion_name(Completion c) { return c == Completion::none ? "none" : "kernel"; }

void MeasureConfig::validate() const {
    if (!(kappa > 0) || !std::isfinite(kappa)) throw ConfigError("kappa must be positive");
    if (cutoff < 0) throw ConfigError("cutoff must be >= 0");
    if (algebra.algebra_dim() < 1) throw ConfigError("measure config needs a Lie algebra basis");
    if (w_nodes < 1) throw ConfigError("w_nodes must be >= 1");
}

cplx draw_coefficient(VarianceConvention v, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    switch (v) {
        case VarianceConvention::real: return {N(rng), 0.0};
        case VarianceConvention::unit_complex: {
            const double x = N(rng), y = N(rng);
            return cplx(x, y) * std::sqrt(0.5);
        }
        case VarianceConvention::unit_real_parts: {
            const double x = N(rng), y = N(rng);
            return {x, y};
        }
    }
    return 0.0;
}

FieldSample sample_field(const MeasureConfig& cfg, const BasisCache& cache, std::mt19937_64& rng) {
    FieldSample A;
    A.coef.resize(cache.count(), cfg.algebra.algebra_dim());
    for (int a = 0; a < A.algebra_dim(); ++a) {
        for (int k = 0; k < A.count(); ++k) A.coef(k, a) = draw_coefficient(cfg.variance, rng);
    }
    return A;
}

MonomialForm<cplx> field_form(const FieldSample& A, const BasisCache& cache, int alpha) {
    const Eigen::MatrixXd F = cache.frame_coefficients();
    const Eigen::VectorXcd g = F.cast<cplx>() * A.coef.col(alpha);
    const int M = cache.monomials.size();
    MonomialForm<cplx> f;
    for (int i = 1; i <= 3; ++i) {
        for (int m = 0; m < M; ++m) {
            const cplx c = g((i - 1) * M + m);
            if (c != 0.0) f[i][cache.monomials.at(m)] = c;
        }
    }
    return f;
}

std::vector<CVec4> w_quadrature(int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("w quadrature needs at least one node");
    boost::random::sobol qrng(8);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::array<double, 8> shift{};
    for (double& s : shift) s = U(rng);
    const boost::math::normal_distribution<double> normal;
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<CVec4> out(n);
    for (int k = 0; k < n; ++k) {
        std::array<double, 8> z{};
        for (int d = 0; d < 8; ++d) {
            double u = std::ldexp(static_cast<double>(qrng()), -64) + shift[d];
            u -= std::floor(u);
            u = std::clamp(u, eps, 1.0 - eps);
            // d lambda_4 has variance 1/2 per real coordinate
            z[d] = boost::math::quantile(normal, u) * std::sqrt(0.5);
        }
        for (int i = 0; i < 4; ++i) out[k][i] = cplx(z[2 * i], z[2 * i + 1]);
    }
    return out;
}

double DensityValue::value() const { return std::exp(log_value); }

DensityEvaluator::DensityEvaluator(const MeasureConfig& cfg, const BasisCache& cache) {
    cfg.validate();
    algebra_dim_ = cfg.algebra.algebra_dim();
    c_ = structure_constants(cfg.algebra);
    abelian_ = c_.all_zero();
    const std::vector<CVec4> w = w_quadrature(cfg.w_nodes, stream_seed(cfg.seed, 0x59a1));
    n_ = static_cast<int>(w.size());
    const Eigen::MatrixXd F = cache.frame_coefficients();
    const int M = cache.monomials.size();
    const MonomialIndexer ext(cache.rmax + 1);
    const auto D = cache.frame_d_coefficients(ext);

    Eigen::MatrixXcd mono(n_, M), mono_ext(n_, ext.size());
    std::vector<cplx> buf(std::max(M, ext.size()));
    Eigen::VectorXd ps(n_);
    for (int r = 0; r < n_; ++r) {
        ps(r) = psi(w[r]);
        cache.monomials.evaluate(w[r], buf.data());
        for (int m = 0; m < M; ++m) mono(r, m) = buf[m];
        ext.evaluate(w[r], buf.data());
        for (int m = 0; m < ext.size(); ++m) mono_ext(r, m) = buf[m];
    }
    for (int i = 1; i <= 3; ++i) {
        const Eigen::MatrixXcd pi = ps.asDiagonal() * (mono * component_rows(F, M, i).cast<cplx>());
        const Eigen::MatrixXcd xi =
            (cfg.kappa * ps).asDiagonal() * (mono_ext * D[kSpatialPairs[i - 1]].cast<cplx>());
        pi_re_[i - 1] = pi.real();
        pi_im_[i - 1] = pi.imag();
        xi_re_[i - 1] = xi.real();
        xi_im_[i - 1] = xi.imag();
    }
}

DensityValue DensityEvaluator::evaluate(const FieldSample& A) const {
    return evaluate(std::vector<FieldSample>{A}).front();
}

std::vector<DensityValue> DensityEvaluator::evaluate(const std::vector<FieldSample>& batch) const {
    const int B = static_cast<int>(batch.size());
    const int N = algebra_dim_;
    std::vector<DensityValue> out(B);
    if (B == 0) return out;
    Eigen::MatrixXcd C(batch.front().count(), B * N);
    for (int b = 0; b < B; ++b) C.middleCols(b * N, N) = batch[b].coef;

    // Real GEMMs on split parts; the imaginary part of C vanishes for the real convention.
    const Eigen::MatrixXd Cr = C.real(), Ci = C.imag();
    const bool real_coef = Ci.isZero(0.0);
    auto apply = [&](const Eigen::MatrixXd& Ar, const Eigen::MatrixXd& Ai) {
        Eigen::MatrixXcd out(Ar.rows(), Cr.cols());
        if (real_coef) {
            out.real() = Ar * Cr;
            out.imag() = Ai * Cr;
        } else {
            out.real() = Ar * Cr - Ai * Ci;
            out.imag() = Ar * Ci + Ai * Cr;
        }
        return out;
    };
    std::array<Eigen::MatrixXcd, 3> X, P;
    for (int q = 0; q < 3; ++q) X[q] = apply(xi_re_[q], xi_im_[q]);
    if (!abelian_) {
        for (int i = 0; i < 3; ++i) P[i] = apply(pi_re_[i], pi_im_[i]);
    }
    // spatial pair q <-> (i,j): (1,2), (1,3), (2,3)
    const int pi_of[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int b = 0; b < B; ++b) {
        double bound = 0.0, square = 0.0;
        for (int r = 0; r < n_; ++r) {
            for (int q = 0; q < 3; ++q) {
                for (int g = 0; g < N; ++g) {
                    const cplx x = X[q](r, b * N + g);
                    bound += std::norm(x);
                    if (abelian_) continue;
                    cplx Q = 0.0;
                    for (int a = 0; a < N; ++a) {
                        for (int be = a + 1; be < N; ++be) {
                            const double c = c_(g, a, be);
                            if (c == 0.0) continue;
                            Q += c * P[pi_of[q][0]](r, b * N + a) * P[pi_of[q][1]](r, b * N + be);
                        }
                    }
                    // |X + Q|^2 - |X|^2
                    square += 2.0 * std::real(std::conj(x) * Q) + std::norm(Q);
                }
            }
        }
        out[b].log_value = abelian_ ? 0.0 : -0.5 * square / n_;
        out[b].log_bound = 0.5 * bound / n_;
    }
    return out;
}

double density_Y(const FieldSample& A, const MeasureConfig& cfg, const BasisCache& cache) {
    return DensityEvaluator(cfg, cache).evaluate(A).value();
}

MomentCheck density_moment_check(const MeasureConfig& cfg, double p, int n_samples) {
    cfg.validate();
    return density_moment_check(cfg, gram_schmidt(cfg.kappa, cfg.cutoff), p, n_samples);
}

MomentCheck density_moment_check(const MeasureConfig& cfg, const BasisCache& cache, double p,
                                 int n_samples) {
    if (!(p > 0) || !(p < 2.0 * kPi / 3.0)) throw ConfigError("moment order must lie in (0, 2 pi/3)");
    if (n_samples < 2) throw ConfigError("moment check needs at least 2 samples");
    const DensityEvaluator ev(cfg, cache);
    std::vector<double> vals(n_samples);
    constexpr std::size_t kChunk = 64;
    parallel_chunks(
        n_samples, cfg.workers,
        [&](std::size_t b, std::size_t e, std::size_t) {
            std::vector<FieldSample> batch;
            for (std::size_t i = b; i < e; ++i) {
                std::mt19937_64 rng(stream_seed(cfg.seed, i));
                batch.push_back(sample_field(cfg, cache, rng));
            }
            const auto d = ev.evaluate(batch);
            for (std::size_t i = b; i < e; ++i) vals[i] = std::exp(p * d[i - b].log_value);
        },
        kChunk);
    MomentCheck m;
    m.p = p;
    m.n_samples = n_samples;
    double s = 0.0, s2 = 0.0;
    for (double v : vals) s += v;
    m.estimate = s / n_samples;
    for (double v : vals) s2 += (v - m.estimate) * (v - m.estimate);
    m.stderr_ = std::sqrt(s2 / (n_samples - 1.0) / n_samples);
    const double c = 1.0 / (1.0 - 3.0 * p / (2.0 * kPi));
    m.bound = std::exp(3.0 * p * c / (4.0 * kPi));
    return m;
}

// ---------------------------------------------------------------------------------------
// Wilson functional

WilsonContext::WilsonContext(const SurfaceParam& S, const MeasureConfig& cfg, const BasisCache& cache,
                             int n_grid, int ode_steps)
    : cfg_(cfg), n_(n_grid) {
    cfg.validate();
    if (n_grid < 2) throw ConfigError("n_grid must be >= 2");
    if (ode_steps < 1) throw ConfigError("ode_steps must be >= 1");
    dim_ = cfg.algebra.matrix_dim;
    rho_ = cfg.algebra.generators;
    c_ = structure_constants(cfg.algebra);
    const double kappa = cfg.kappa;
    const Eigen::MatrixXd F = cache.frame_coefficients();
    const int M = cache.monomials.size();
    const MonomialIndexer ext(cache.rmax + 1);
    const auto D = cache.frame_d_coefficients(ext);
    const int nodes = n_ * n_;
    const double h = 1.0 / n_;

    std::vector<JacobianSet> js(nodes);
    std::vector<Vec4> w(nodes);
    Eigen::MatrixXd mono(nodes, M), mono_ext(nodes, ext.size());
    Eigen::VectorXd ps(nodes);
    std::vector<double> buf(std::max(M, ext.size()));
    for (int j = 0; j < n_; ++j) {
        for (int i = 0; i < n_; ++i) {
            const int r = j * n_ + i;
            const SurfacePoint p = S.at((i + 0.5) * h, (j + 0.5) * h);
            js[r] = jacobians(p);
            for (int d = 0; d < 4; ++d) w[r][d] = 0.5 * kappa * p.x[d];
            ps(r) = psi_real(w[r]);
            cache.monomials.evaluate(w[r], buf.data());
            for (int m = 0; m < M; ++m) mono(r, m) = buf[m];
            ext.evaluate(w[r], buf.data());
            for (int m = 0; m < ext.size(); ++m) mono_ext(r, m) = buf[m];
        }
    }
    constexpr double kTiny = 1e-14;
    for (int P = 0; P < kPairCount; ++P) {
        Pair pr;
        pr.pair = P;
        pr.abs_jac.resize(nodes);
        for (int r = 0; r < nodes; ++r) pr.abs_jac(r) = js[r].abs_det(P);
        if (pr.abs_jac.maxCoeff() <= kTiny) continue;
        pr.trunc = (kappa * ps).asDiagonal() * (mono_ext * D[P]);
        if (cfg.completion == Completion::kernel) {
            Eigen::MatrixXd K(nodes, nodes);
            for (int a = 0; a < nodes; ++a) {
                for (int b = 0; b <= a; ++b) K(a, b) = K(b, a) = xi_kernel(w[a], w[b], kappa);
            }
            const Eigen::MatrixXd T = K - pr.trunc * pr.trunc.transpose();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            Eigen::VectorXd lam = es.eigenvalues();
            clipped_ = std::max(clipped_, std::max(0.0, -lam.minCoeff()) * 2.0 * kPi);
            lam = lam.cwiseMax(0.0).cwiseSqrt();
            pr.tail = es.eigenvectors() * lam.asDiagonal();
        }
        pairs_.push_back(std::move(pr));
    }
    if (!c_.all_zero()) {
        for (int i = 1; i <= 3; ++i) {
            for (int j = i + 1; j <= 3; ++j) {
                Quad q;
                q.i = i;
                q.j = j;
                q.abs_jac.resize(nodes);
                for (int r = 0; r < nodes; ++r) q.abs_jac(r) = js[r].abs_det(spatial_pair(i, j));
                if (q.abs_jac.maxCoeff() <= kTiny) continue;
                q.zi = ps.asDiagonal() * (mono * component_rows(F, M, i));
                q.zj = ps.asDiagonal() * (mono * component_rows(F, M, j));
                quads_.push_back(std::move(q));
            }
        }
    }

    // Path P_{s,t}: bottom edge to sigma(1,0), up the s = 1 edge, then left along row t.
    std::vector<Eigen::RowVectorXd> rows;
    auto eval_row = [&](double s, double t, bool along_s) {
        const SurfacePoint p = S.at(s, t);
        const Vec4& dx = along_s ? p.ds : p.dt;
        const double pw = psi_real(p.x);
        cache.monomials.evaluate(p.x, buf.data());
        Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(cache.count());
        for (int i = 1; i <= 3; ++i) {
            if (dx[i] == 0.0) continue;
            const Eigen::Map<const Eigen::RowVectorXd> m(buf.data(), M);
            g += (pw * dx[i]) * (m * component_rows(F, M, i));
        }
        rows.push_back(g);
        return static_cast<int>(rows.size()) - 1;
    };
    // Segment from parameter a to b along s (t fixed) or along t (s fixed).
    auto segment = [&](double a, double b, double fixed, bool along_s) {
        std::vector<Step> out;
        const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) * ode_steps - 1e-9)));
        const double hs = (b - a) / steps;
        auto pt = [&](double tau) {
            return along_s ? eval_row(tau, fixed, true) : eval_row(fixed, tau, false);
        };
        int prev = pt(a);
        for (int k = 0; k < steps; ++k) {
            const double t0 = a + k * hs;
            const int mid = pt(t0 + 0.5 * hs);
            const int end = pt(k + 1 == steps ? b : t0 + hs);
            out.push_back({prev, mid, end, hs});
            prev = end;
        }
        return out;
    };
    bottom_ = segment(0.0, 1.0, 0.0, true);
    right_.resize(n_);
    rows_.resize(nodes);
    for (int j = 0; j < n_; ++j) {
        const double t = (j + 0.5) * h;
        right_[j] = segment(j == 0 ? 0.0 : t - h, t, 1.0, false);
        for (int i = n_ - 1; i >= 0; --i) {
            const double s = (i + 0.5) * h;
            rows_[j * n_ + i] = segment(i == n_ - 1 ? 1.0 : s + h, s, t, true);
        }
    }
    path_g_.resize(static_cast<Eigen::Index>(rows.size()), cache.count());
    for (std::size_t r = 0; r < rows.size(); ++r) path_g_.row(static_cast<Eigen::Index>(r)) = rows[r];
}

MatC WilsonContext::exponent(const Eigen::MatrixXcd& path_coef, int step_row) const {
    MatC m = MatC::Zero(dim_, dim_);
    for (int a = 0; a < static_cast<int>(rho_.size()); ++a) m += path_coef(step_row, a) * rho_[a];
    return m;
}

std::vector<MatC> WilsonContext::u_nodes(const FieldSample& A) const {
    const Eigen::MatrixXcd pc = path_g_.cast<cplx>() * A.coef;
    auto advance = [&](MatC u, const std::vector<Step>& steps) {
        for (const Step& st : steps) {
            const MatC M0 = exponent(pc, st.e0), M1 = exponent(pc, st.e1), M2 = exponent(pc, st.e2);
            const MatC k1 = M0 * u;
            const MatC k2 = M1 * (u + 0.5 * st.h * k1);
            const MatC k3 = M1 * (u + 0.5 * st.h * k2);
            const MatC k4 = M2 * (u + st.h * k3);
            u += (st.h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return u;
    };
    std::vector<MatC> out(n_ * n_);
    MatC vert = advance(MatC::Identity(dim_, dim_), bottom_);
    for (int j = 0; j < n_; ++j) {
        vert = advance(vert, right_[j]);
        MatC u = vert;
        for (int i = n_ - 1; i >= 0; --i) {
            u = advance(u, rows_[j * n_ + i]);
            out[j * n_ + i] = u;
        }
    }
    return out;
}

cplx WilsonContext::evaluate(const FieldSample& A, std::mt19937_64& rng) const {
    const int N = A.algebra_dim();
    const int nodes = n_ * n_;
    const double pref = 0.25 * cfg_.kappa / (static_cast<double>(n_) * n_);  // (1/kappa)(kappa^2/4) h^2

    // Curvature pairings per node and Lie index, with the pair's |J| folded in.
    Eigen::MatrixXcd curv = Eigen::MatrixXcd::Zero(nodes, N);
    for (const Pair& pr : pairs_) {
        Eigen::MatrixXcd X = pr.trunc.cast<cplx>() * A.coef;
        if (cfg_.completion == Completion::kernel) {
            Eigen::MatrixXcd z(nodes, N);
            for (int a = 0; a < N; ++a) {
                for (int r = 0; r < nodes; ++r) z(r, a) = draw_coefficient(cfg_.variance, rng);
            }
            X += pr.tail.cast<cplx>() * z;
        }
        curv += pr.abs_jac.cast<cplx>().asDiagonal() * X;
    }
    // Quadratic pairings folded into the same per-node coefficients of rho(E^gamma).
    for (const Quad& q : quads_) {
        const Eigen::MatrixXcd Zi = q.zi.cast<cplx>() * A.coef;
        const Eigen::MatrixXcd Zj = q.zj.cast<cplx>() * A.coef;
        for (int r = 0; r < nodes; ++r) {
            if (q.abs_jac(r) == 0.0) continue;
            for (int g = 0; g < N; ++g) {
                cplx s = 0.0;
                for (int a = 0; a < N; ++a) {
                    for (int b = a + 1; b < N; ++b) {
                        const double c = c_(g, a, b);
                        if (c != 0.0) s += c * Zi(r, a) * Zj(r, b);
                    }
                }
                curv(r, g) += q.abs_jac(r) * s;
            }
        }
    }

    const bool commutative = c_.all_zero();
    std::vector<MatC> u;
    if (!commutative) u = u_nodes(A);
    MatC prod = MatC::Identity(dim_, dim_);
    // t descending, then s ascending
    for (int j = n_ - 1; j >= 0; --j) {
        for (int i = 0; i < n_; ++i) {
            const int r = j * n_ + i;
            MatC m = MatC::Zero(dim_, dim_);
            for (int g = 0; g < N; ++g) m += (pref * curv(r, g)) * rho_[g];
            if (!commutative) m = u[r].inverse() * m * u[r];
            prod = prod * m.exp();
        }
    }
    return prod.trace();
}

cplx wilson_J(const FieldSample& A, const SurfaceParam& S, const MeasureConfig& cfg,
              const BasisCache& cache, int n_grid, int ode_steps, std::mt19937_64& rng) {
    return WilsonContext(S, cfg, cache, n_grid, ode_steps).evaluate(A, rng);
}

MatC u_path(const FieldSample& A, const SurfaceParam& S, double s, double t, const MeasureConfig& cfg,
            const BasisCache& cache, int ode_steps) {
    if (ode_steps < 1) throw ConfigError("ode_steps must be >= 1");
    const int dim = cfg.algebra.matrix_dim;
    const int M = cache.monomials.size();
    const Eigen::MatrixXcd G = cache.frame_coefficients().cast<cplx>() * A.coef;  // (3M) x N
    std::vector<double> mono(M);
    // sum_{i,alpha} psi(x) A_{i,alpha}(x) dx^i/dtau rho(E^alpha) at sigma(s,t) moving along s or t
    auto field = [&](double ss, double tt, bool along_s, double sign) {
        const SurfacePoint p = S.at(ss, tt);
        const Vec4& dx = along_s ? p.ds : p.dt;
        cache.monomials.evaluate(p.x, mono.data());
        const double pw = psi_real(p.x);
        MatC m = MatC::Zero(dim, dim);
        for (int a = 0; a < cfg.algebra.algebra_dim(); ++a) {
            cplx v = 0.0;
            for (int i = 1; i <= 3; ++i) {
                if (dx[i] == 0.0) continue;
                cplx ai = 0.0;
                for (int k = 0; k < M; ++k) ai += mono[k] * G((i - 1) * M + k, a);
                v += ai * dx[i];
            }
            m += (sign * pw) * v * cfg.algebra.generators[a];
        }
        return m;
    };
    // Integrates in the path parameter tau (forward), mapped onto the surface coordinate.
    auto run = [&](MatC u, double a, double b, double fixed, bool along_s) {
        if (a == b) return u;
        const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) * ode_steps - 1e-9)));
        const double len = std::abs(b - a), h = len / steps, dir = b > a ? 1.0 : -1.0;
        auto f = [&](double tau) {
            const double c = a + dir * tau;
            return along_s ? field(c, fixed, true, dir) : field(fixed, c, false, dir);
        };
        for (int k = 0; k < steps; ++k) {
            const double tau = k * h;
            const MatC M0 = f(tau), M1 = f(tau + 0.5 * h), M2 = f(tau + h);
            const MatC k1 = M0 * u;
            const MatC k2 = M1 * (u + 0.5 * h * k1);
            const MatC k3 = M1 * (u + 0.5 * h * k2);
            const MatC k4 = M2 * (u + h * k3);
            u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return u;
    };
    MatC u = MatC::Identity(dim, dim);
    if (s == 0.0 && t == 0.0) return u;
    u = run(u, 0.0, 1.0, 0.0, true);
    u = run(u, 0.0, t, 1.0, false);
    u = run(u, 1.0, s, t, true);
    return u;
}

MCEstimate mc_expectation(const SurfaceParam& S, const MeasureConfig& cfg, int n_samples, int n_grid,
                          int ode_steps) {
    cfg.validate();
    if (n_samples < 2) throw ConfigError("mc_expectation needs at least 2 samples");
    const BasisCache cache = gram_schmidt(cfg.kappa, cfg.cutoff);
    const WilsonContext ctx(S, cfg, cache, n_grid, ode_steps);
    const bool abelian = structure_constants(cfg.algebra).all_zero();
    std::unique_ptr<DensityEvaluator> ev;
    if (!abelian) ev = std::make_unique<DensityEvaluator>(cfg, cache);

    std::vector<cplx> J(n_samples);
    std::vector<double> Y(n_samples, 1.0);
    parallel_chunks(
        n_samples, cfg.workers,
        [&](std::size_t b, std::size_t e, std::size_t) {
            std::vector<FieldSample> batch;
            for (std::size_t i = b; i < e; ++i) {
                std::mt19937_64 rng(stream_seed(cfg.seed, i));
                FieldSample A = sample_field(cfg, cache, rng);
                J[i] = ctx.evaluate(A, rng);
                batch.push_back(std::move(A));
            }
            if (ev) {
                const auto d = ev->evaluate(batch);
                for (std::size_t i = b; i < e; ++i) Y[i] = d[i - b].value();
            }
        },
        64);

    MCEstimate r;
    r.n_samples = n_samples;
    r.clipped_tail = ctx.clipped_tail();
    const double n = n_samples;
    cplx sJ = 0.0, sJY = 0.0;
    double sY = 0.0, sJ2 = 0.0, sY2 = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        sJ += J[i];
        sJY += J[i] * Y[i];
        sY += Y[i];
        sJ2 += std::norm(J[i]);
        sY2 += Y[i] * Y[i];
    }
    r.mean_J = sJ / n;
    r.mean_JY = sJY / n;
    r.mean_Y = sY / n;
    r.second_J = sJ2 / n;
    r.second_Y = sY2 / n;
    double vY = 0.0;
    for (double y : Y) vY += (y - r.mean_Y) * (y - r.mean_Y);
    r.stderr_Y = std::sqrt(vY / (n - 1.0) / n);
    if (!(r.mean_Y > 3.0 * r.stderr_Y)) {
        throw NumericalGuardError("mc_expectation: E[Y] estimate indistinguishable from 0");
    }
    r.mean = r.mean_JY / r.mean_Y;
    double vr = 0.0;
    for (int i = 0; i < n_samples; ++i) vr += std::norm((J[i] - r.mean) * Y[i]);
    r.stderr_ = std::sqrt(vr / (n - 1.0) / n) / r.mean_Y;
    return r;
}

double abelian_closed_form(const SurfaceParam& S, double kappa, int resolution, int workers) {
    if (!(kappa > 0)) throw ConfigError("kappa must be positive");
    const double n2 = nu_surface(S, kappa, resolution).norm2(workers);
    return std::exp(-n2 / (2.0 * kappa * kappa));
}

GaussianQuadraticCheck gaussian_quadratic_mc(const Eigen::MatrixXd& A, int n_draws, std::uint64_t seed) {
    if (A.rows() != A.cols() || A.rows() == 0) throw ConfigError("matrix must be square and nonempty");
    if (n_draws < 2) throw ConfigError("need at least 2 draws");
    const Eigen::MatrixXd AtA = A.transpose() * A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(AtA);
    if (!(es.eigenvalues().maxCoeff() < 0.5)) throw ConfigError("requires ||A^* A|| < 1/2");
    GaussianQuadraticCheck out;
    const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(A.rows(), A.cols());
    out.exact = 1.0 / std::sqrt((Id - 2.0 * AtA).determinant());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::VectorXd x(A.rows());
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < n_draws; ++k) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = N(rng);
        const double v = std::exp((A * x).squaredNorm());
        s += v;
        s2 += v * v;
    }
    out.estimate = s / n_draws;
    out.stderr_ = std::sqrt(std::max(0.0, s2 / n_draws - out.estimate * out.estimate) / (n_draws - 1.0));
    return out;
}

}  // namespace ym
