#include "ym/bargmann.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ym {

bool n2_less(const MultiIndex& a, const MultiIndex& b) {
    const int da = a.degree();
    const int db = b.degree();
    if (da != db) return da < db;
    return a.m < b.m;
}

std::optional<MultiIndex> predecessor(const MultiIndex& p, int alpha) {
    if (p[alpha] < 2) return std::nullopt;
    MultiIndex q = p;
    q.m[alpha] -= 2;
    return q;
}

std::vector<MultiIndex> multi_indices_up_to(int rmax) {
    std::vector<MultiIndex> out;
    for (int r = 0; r <= rmax; ++r) {
        for (int a = 0; a <= r; ++a) {
            for (int b = 0; a + b <= r; ++b) {
                for (int c = 0; a + b + c <= r; ++c) {
                    out.push_back(MultiIndex{{a, b, c, r - a - b - c}});
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), n2_less);
    return out;
}

std::string to_string(const MultiIndex& p) {
    std::ostringstream os;
    os << '(' << p[0] << ',' << p[1] << ',' << p[2] << ',' << p[3] << ')';
    return os.str();
}

MonomialIndexer::MonomialIndexer(int dmax) : dmax_(dmax), list_(multi_indices_up_to(dmax)) {
    for (int i = 0; i < size(); ++i) lookup_.emplace(key(list_[i]), i);
}

std::uint32_t MonomialIndexer::key(const MultiIndex& p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

int MonomialIndexer::index(const MultiIndex& p) const {
    for (int i = 0; i < 4; ++i) {
        if (p[i] < 0 || p[i] > 255) return -1;
    }
    auto it = lookup_.find(key(p));
    return it == lookup_.end() ? -1 : it->second;
}

namespace {

template <class S>
void evaluate_powers(const std::vector<MultiIndex>& list, int dmax, const std::array<S, 4>& w,
                     S* out) {
    std::array<std::vector<S>, 4> pw;
    for (int i = 0; i < 4; ++i) {
        pw[i].resize(dmax + 1);
        pw[i][0] = S(1);
        for (int k = 1; k <= dmax; ++k) pw[i][k] = pw[i][k - 1] * w[i];
    }
    for (std::size_t k = 0; k < list.size(); ++k) {
        const MultiIndex& p = list[k];
        out[k] = pw[0][p[0]] * pw[1][p[1]] * pw[2][p[2]] * pw[3][p[3]];
    }
}

}  // namespace

void MonomialIndexer::evaluate(const std::array<cplx, 4>& w, cplx* out) const {
    evaluate_powers(list_, dmax_, w, out);
}

void MonomialIndexer::evaluate(const std::array<double, 4>& x, double* out) const {
    evaluate_powers(list_, dmax_, x, out);
}

int pair_index(int a, int b) {
    if (a > b) std::swap(a, b);
    if (a == b || a < 0 || b > 3) throw std::invalid_argument("invalid wedge pair");
    static constexpr int table[4][4] = {{-1, 0, 1, 2}, {-1, -1, 3, 4}, {-1, -1, -1, 5}, {-1, -1, -1, -1}};
    return table[a][b];
}

std::pair<int, int> pair_of(int idx) {
    static constexpr std::pair<int, int> pairs[kNumPairs] = {{0, 1}, {0, 2}, {0, 3},
                                                             {1, 2}, {1, 3}, {2, 3}};
    return pairs[idx];
}

template <>
Rational factorial_value<Rational>(int n) {
    BigInt f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return Rational(f);
}

template <>
cplx factorial_value<cplx>(int n) {
    return cplx(std::tgamma(static_cast<double>(n) + 1.0), 0.0);
}

cplx fd_inner(const MonomialForm<cplx>& f, const MonomialForm<cplx>& g, double kappa) {
    return kappa * kappa * fd_inner_unit(f, g);
}

namespace {

BigInt big_factorial(int n) {
    BigInt f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// Coefficient of z^n in dz z^m (one variable).
Rational dz_coeff(int m, int n) {
    if (n == m - 1) return Rational(m, 2);
    if (n == m + 1) return Rational(-1, 2);
    return Rational(0);
}

// <dz_{axis_p} z^p, dz_{axis_q} z^q> in H^2(C^4).
Rational dz_pair_inner(int axis_p, const MultiIndex& p, int axis_q, const MultiIndex& q) {
    Rational s(0);
    for (int sp : {-1, 1}) {
        MultiIndex u = p;
        u.m[axis_p] += sp;
        if (u[axis_p] < 0) continue;
        const Rational cp = dz_coeff(p[axis_p], u[axis_p]);
        for (int sq : {-1, 1}) {
            MultiIndex v = q;
            v.m[axis_q] += sq;
            if (v[axis_q] < 0 || v != u) continue;
            const Rational cq = dz_coeff(q[axis_q], v[axis_q]);
            BigInt f = 1;
            for (int i = 0; i < 4; ++i) f *= big_factorial(u[i]);
            s += cp * cq * Rational(f);
        }
    }
    return s;
}

int parity_key(int component, const MultiIndex& p) {
    int k = 0;
    for (int i = 0; i < 4; ++i) {
        const int bit = (p[i] + (i == component ? 1 : 0)) & 1;
        k |= bit << i;
    }
    return k;
}

using SparseVec = std::vector<std::pair<int, Rational>>;

// Sparse symmetric Gram over the global index (component-major, n2 order).
struct GlobalGram {
    int M = 0;
    int rmax = 0;
    MonomialIndexer idx;
    std::vector<SparseVec> rows;
    std::vector<int> klass;

    explicit GlobalGram(int r) : M(0), rmax(r), idx(r) {
        M = idx.size();
        rows.resize(3 * M);
        klass.resize(3 * M);
        for (int a = 1; a <= 3; ++a) {
            for (int i = 0; i < M; ++i) {
                const MultiIndex& p = idx.at(i);
                const int g = (a - 1) * M + i;
                klass[g] = parity_key(a, p);
                std::vector<std::pair<int, MultiIndex>> cand;
                cand.push_back({a, p});
                for (int j = 0; j < 4; ++j) {
                    if (j == a) continue;
                    for (int s : {-2, 2}) {
                        MultiIndex q = p;
                        q.m[j] += s;
                        cand.push_back({a, q});
                    }
                }
                for (int b = 1; b <= 3; ++b) {
                    if (b == a) continue;
                    for (int s1 : {-1, 1}) {
                        for (int s2 : {-1, 1}) {
                            MultiIndex q = p;
                            q.m[b] += s1;
                            q.m[a] -= s2;
                            cand.push_back({b, q});
                        }
                    }
                }
                SparseVec row;
                for (const auto& [b, q] : cand) {
                    bool ok = q.degree() <= rmax;
                    for (int t = 0; t < 4; ++t) ok = ok && q[t] >= 0;
                    if (!ok) continue;
                    Rational v = monomial_gram(a, p, b, q);
                    if (v != 0) row.emplace_back((b - 1) * M + idx.index(q), v);
                }
                std::sort(row.begin(), row.end(),
                          [](const auto& x, const auto& y) { return x.first < y.first; });
                rows[g] = std::move(row);
            }
        }
    }

    Rational diag(int g) const {
        for (const auto& [j, v] : rows[g]) {
            if (j == g) return v;
        }
        return Rational(0);
    }

    // <z_g, u> for a sorted sparse u.
    Rational unit_inner(int g, const SparseVec& u) const {
        Rational s(0);
        for (const auto& [j, v] : rows[g]) {
            auto it = std::lower_bound(u.begin(), u.end(), j,
                                       [](const auto& e, int key) { return e.first < key; });
            if (it != u.end() && it->first == j) s += v * it->second;
        }
        return s;
    }

    Rational inner(const SparseVec& u, const SparseVec& v) const {
        Rational s(0);
        for (const auto& [g, c] : u) s += c * unit_inner(g, v);
        return s;
    }
};

SparseVec to_sparse(const std::map<int, Rational>& m) {
    SparseVec out;
    for (const auto& [k, v] : m) {
        if (v != 0) out.emplace_back(k, v);
    }
    return out;
}

void axpy(std::map<int, Rational>& acc, const Rational& c, const SparseVec& u) {
    for (const auto& [k, v] : u) {
        Rational& slot = acc[k];
        slot += c * v;
    }
}

struct OrthoResult {
    SparseVec vec;
    Rational norm2;
};

// Gram-Schmidt of z_{order[k]} against the earlier elements of the same parity class.
// stop_before(k, j) returns true if element j must not be subtracted from element k.
template <class Skip>
std::vector<OrthoResult> orthogonalize(const GlobalGram& G, const std::vector<int>& order,
                                       Skip skip) {
    std::vector<OrthoResult> out(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const int g = order[k];
        std::map<int, Rational> acc;
        acc[g] = 1;
        Rational norm2 = G.diag(g);
        for (std::size_t j = 0; j < k; ++j) {
            const int h = order[j];
            if (G.klass[h] != G.klass[g] || skip(k, j)) continue;
            const Rational ip = G.unit_inner(g, out[j].vec);
            if (ip == 0) continue;
            const Rational c = ip / out[j].norm2;
            axpy(acc, -c, out[j].vec);
            norm2 -= c * ip;
        }
        out[k].vec = to_sparse(acc);
        out[k].norm2 = norm2;
    }
    return out;
}

double rel(const Rational& v, const Rational& n1, const Rational& n2) {
    const double d = std::sqrt(to_double(n1) * to_double(n2));
    return d > 0 ? std::abs(to_double(v)) / d : std::abs(to_double(v));
}

}  // namespace

Rational monomial_gram(int a, const MultiIndex& p, int b, const MultiIndex& q) {
    if (a == b) {
        Rational s(0);
        for (int j = 0; j < 4; ++j) {
            if (j != a) s += dz_pair_inner(j, p, j, q);
        }
        return s;
    }
    return -dz_pair_inner(b, p, a, q);
}

std::string rational_to_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

Rational rational_from_string(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

double BasisCache::hat_norm(int k) const { return kappa * std::sqrt(to_double(elements[k].hat_norm2)); }

double BasisCache::frame_norm(int k) const {
    return kappa * std::sqrt(to_double(elements[k].frame_norm2));
}

MonomialForm<Rational> BasisCache::hat_form(int k) const {
    MonomialForm<Rational> f;
    for (const auto& [i, c] : elements[k].hat) f[elements[k].component][monomials.at(i)] = c;
    return f;
}

MonomialForm<Rational> BasisCache::frame_form(int k) const {
    MonomialForm<Rational> f;
    const int M = monomials.size();
    for (const auto& [g, c] : elements[k].frame) f[g / M + 1][monomials.at(g % M)] = c;
    return f;
}

Eigen::MatrixXd BasisCache::frame_coefficients() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(3 * monomials.size(), count());
    for (int k = 0; k < count(); ++k) {
        const double inv = 1.0 / frame_norm(k);
        for (const auto& [g, c] : elements[k].frame) out(g, k) = to_double(c) * inv;
    }
    return out;
}

std::array<Eigen::MatrixXd, kNumPairs> BasisCache::frame_d_coefficients(const MonomialIndexer& ext,
                                                                         WedgeSign sign) const {
    std::array<Eigen::MatrixXd, kNumPairs> out;
    for (auto& m : out) m = Eigen::MatrixXd::Zero(ext.size(), count());
    for (int k = 0; k < count(); ++k) {
        const double inv = 1.0 / frame_norm(k);
        TwoFormPoly<Rational> d = exterior_d(frame_form(k), sign);
        for (int P = 0; P < kNumPairs; ++P) {
            for (const auto& [q, c] : d.comp[P]) {
                const int row = ext.index(q);
                if (row < 0) throw std::invalid_argument("extended indexer too small for d image");
                out[P](row, k) = to_double(c) * inv;
            }
        }
    }
    return out;
}

BasisCache gram_schmidt(double kappa, int rmax) {
    if (!(kappa > 0)) throw std::invalid_argument("kappa must be positive");
    if (rmax < 0) throw std::invalid_argument("cutoff must be nonnegative");
    GlobalGram G(rmax);
    const int M = G.M;
    std::vector<int> order(3 * M);
    for (int g = 0; g < 3 * M; ++g) order[g] = g;

    // zhat^p = z^p minus its projection onto the same-component lower-degree span,
    // which the per-component frame of lower degree spans exactly (n2 order is degree-first).
    std::vector<OrthoResult> hat(3 * M);
    auto comp_frame = orthogonalize(G, order, [&](std::size_t k, std::size_t j) {
        return order[k] / M != order[j] / M;
    });
    for (int g = 0; g < 3 * M; ++g) {
        const int deg = G.idx.at(g % M).degree();
        std::map<int, Rational> acc;
        acc[g] = 1;
        Rational norm2 = G.diag(g);
        for (int h = (g / M) * M; h < g; ++h) {
            if (G.klass[h] != G.klass[g] || G.idx.at(h % M).degree() >= deg) continue;
            const Rational ip = G.unit_inner(g, comp_frame[h].vec);
            if (ip == 0) continue;
            const Rational c = ip / comp_frame[h].norm2;
            axpy(acc, -c, comp_frame[h].vec);
            norm2 -= c * ip;
        }
        hat[g].vec = to_sparse(acc);
        hat[g].norm2 = norm2;
    }
    auto joint = orthogonalize(G, order, [](std::size_t, std::size_t) { return false; });

    BasisCache cache;
    cache.kappa = kappa;
    cache.rmax = rmax;
    cache.monomials = G.idx;
    cache.elements.resize(3 * M);
    for (int g = 0; g < 3 * M; ++g) {
        BasisElement& e = cache.elements[g];
        e.component = g / M + 1;
        e.p = G.idx.at(g % M);
        for (const auto& [h, c] : hat[g].vec) e.hat.emplace_back(h % M, c);
        e.hat_norm2 = hat[g].norm2;
        e.frame = joint[g].vec;
        e.frame_norm2 = joint[g].norm2;
    }
    return cache;
}

std::vector<Poly<Rational>> sparse_recursion(int component, int rmax) {
    GlobalGram G(rmax);
    const int M = G.M;
    const int base = (component - 1) * M;
    std::vector<SparseVec> vecs(M);
    std::vector<Rational> norms(M);
    for (int i = 0; i < M; ++i) {
        const MultiIndex& p = G.idx.at(i);
        std::map<int, Rational> acc;
        acc[base + i] = 1;
        for (int alpha = 0; alpha < 4; ++alpha) {
            auto q = predecessor(p, alpha);
            if (!q) continue;
            const int j = G.idx.index(*q);
            const Rational ip = G.unit_inner(base + i, vecs[j]);
            if (ip != 0) axpy(acc, -ip / norms[j], vecs[j]);
        }
        vecs[i] = to_sparse(acc);
        norms[i] = G.inner(vecs[i], vecs[i]);
    }
    std::vector<Poly<Rational>> out(M);
    for (int i = 0; i < M; ++i) {
        for (const auto& [g, c] : vecs[i]) out[i][G.idx.at(g - base)] = c;
    }
    return out;
}

GramReport validate_basis(const BasisCache& cache) {
    GramReport rep;
    GlobalGram G(cache.rmax);
    const int M = G.M;
    const int n = cache.count();
    std::vector<SparseVec> hats(n);
    for (int k = 0; k < n; ++k) {
        const int base = (cache.elements[k].component - 1) * M;
        for (const auto& [i, c] : cache.elements[k].hat) hats[k].emplace_back(base + i, c);
    }
    for (int k = 0; k < n; ++k) {
        const BasisElement& e = cache.elements[k];
        const int deg = e.p.degree();
        const int base = (e.component - 1) * M;
        for (int i = 0; i < M; ++i) {
            const int h = base + i;
            if (G.klass[h] != G.klass[k]) continue;
            const int dq = G.idx.at(i).degree();
            if (dq < deg) {
                rep.lower_degree_residual = std::max(
                    rep.lower_degree_residual, rel(G.unit_inner(h, hats[k]), e.hat_norm2, G.diag(h)));
            } else if (dq == deg && h != k) {
                rep.hat_same_degree_overlap = std::max(
                    rep.hat_same_degree_overlap,
                    rel(G.inner(hats[k], hats[h]), e.hat_norm2, cache.elements[h].hat_norm2));
            }
        }
        for (int j = 0; j < k; ++j) {
            if (G.klass[j] != G.klass[k]) continue;
            rep.frame_offdiag_residual = std::max(
                rep.frame_offdiag_residual,
                rel(G.inner(e.frame, cache.elements[j].frame), e.frame_norm2,
                    cache.elements[j].frame_norm2));
        }
        for (const auto& [h, v] : G.rows[k]) {
            if (h / M != k / M) {
                rep.cross_component_overlap =
                    std::max(rep.cross_component_overlap, rel(v, G.diag(k), G.diag(h)));
            }
        }
        const Rational pf = multi_factorial<Rational>(e.p);
        if (e.hat_norm2 < pf / 4) rep.bounds_hold = false;
        if (G.diag(k) > Rational(9 * (deg + 1) * (deg + 1)) * pf) rep.bounds_hold = false;
    }
    for (int a = 1; a <= 3; ++a) {
        auto sparse = sparse_recursion(a, cache.rmax);
        const int base = (a - 1) * M;
        for (int i = 0; i < M; ++i) {
            SparseVec v;
            for (const auto& [q, c] : sparse[i]) v.emplace_back(base + G.idx.index(q), c);
            std::sort(v.begin(), v.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            const Rational nv = G.inner(v, v);
            const int deg = G.idx.at(i).degree();
            for (int j = 0; j < M && G.idx.at(j).degree() < deg; ++j) {
                const Rational ip = G.unit_inner(base + j, v);
                if (ip != 0) {
                    ++rep.sparse_violations;
                    rep.sparse_max_overlap =
                        std::max(rep.sparse_max_overlap, rel(ip, nv, G.diag(base + j)));
                }
            }
        }
    }
    return rep;
}

std::string basis_cache_to_json(const BasisCache& cache) {
    using nlohmann::json;
    auto encode = [](const std::vector<std::pair<int, Rational>>& v) {
        json arr = json::array();
        for (const auto& [i, c] : v) arr.push_back(json::array({i, rational_to_string(c)}));
        return arr;
    };
    json j;
    j["schema_version"] = kBasisCacheSchemaVersion;
    j["kappa"] = cache.kappa;
    j["cutoff"] = cache.rmax;
    json els = json::array();
    for (const auto& e : cache.elements) {
        els.push_back({{"component", e.component},
                       {"p", {e.p[0], e.p[1], e.p[2], e.p[3]}},
                       {"hat", encode(e.hat)},
                       {"hat_norm2", rational_to_string(e.hat_norm2)},
                       {"frame", encode(e.frame)},
                       {"frame_norm2", rational_to_string(e.frame_norm2)}});
    }
    j["elements"] = std::move(els);
    return j.dump();
}

BasisCache basis_cache_from_json(const std::string& text) {
    using nlohmann::json;
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != kBasisCacheSchemaVersion) {
        throw std::runtime_error("unsupported basis cache schema version");
    }
    BasisCache cache;
    cache.kappa = j.at("kappa").get<double>();
    cache.rmax = j.at("cutoff").get<int>();
    cache.monomials = MonomialIndexer(cache.rmax);
    auto decode = [](const json& arr) {
        std::vector<std::pair<int, Rational>> v;
        for (const auto& e : arr) v.emplace_back(e.at(0).get<int>(), rational_from_string(e.at(1).get<std::string>()));
        return v;
    };
    for (const auto& e : j.at("elements")) {
        BasisElement el;
        el.component = e.at("component").get<int>();
        for (int i = 0; i < 4; ++i) el.p.m[i] = e.at("p").at(i).get<int>();
        el.hat = decode(e.at("hat"));
        el.hat_norm2 = rational_from_string(e.at("hat_norm2").get<std::string>());
        el.frame = decode(e.at("frame"));
        el.frame_norm2 = rational_from_string(e.at("frame_norm2").get<std::string>());
        cache.elements.push_back(std::move(el));
    }
    if (cache.count() != 3 * cache.monomials.size()) {
        throw std::runtime_error("basis cache element count does not match cutoff");
    }
    return cache;
}

double monomial_ball_sup(const MultiIndex& p) {
    const int r = p.degree();
    if (r == 0) return 1.0;
    double s = 1.0;
    for (int i = 0; i < 4; ++i) {
        if (p[i] > 0) s *= std::pow(static_cast<double>(p[i]) / (4.0 * r), 0.5 * p[i]);
    }
    return s;
}

namespace {

// |z^p| with |z_i|^2 = t_i.
double modulus_power(const MultiIndex& p, const std::array<double, 4>& t) {
    double s = 1.0;
    for (int i = 0; i < 4; ++i) {
        if (p[i] > 0) s *= std::pow(t[i], 0.5 * p[i]);
    }
    return s;
}

double term_weight(const MultiIndex& p) {
    const int r = p.degree();
    return 6.0 * (r + 1) * (r + 1);
}

double joint_objective(const std::vector<NormTerm>& terms, const std::array<double, 4>& t) {
    double s = 0.0;
    for (const auto& term : terms) {
        double v = modulus_power(term.p, t);
        double pred = 0.0;
        for (int alpha = 0; alpha < 4; ++alpha) {
            if (auto q = predecessor(term.p, alpha)) pred += modulus_power(*q, t);
        }
        s += std::abs(term.c) * (v + term_weight(term.p) * pred);
    }
    return s;
}

}  // namespace

double measurable_norm_bound(const std::vector<NormTerm>& terms, NormMode mode,
                             std::uint64_t seed) {
    if (mode == NormMode::upper_bound) {
        double s = 0.0;
        for (const auto& term : terms) {
            double pred = 0.0;
            for (int alpha = 0; alpha < 4; ++alpha) {
                if (auto q = predecessor(term.p, alpha)) pred += monomial_ball_sup(*q);
            }
            s += std::abs(term.c) * (monomial_ball_sup(term.p) + term_weight(term.p) * pred);
        }
        return s;
    }
    // Every term is nondecreasing in each t_i, so the maximum lies on sum t_i = 1/4.
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> expo(1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto project = [](std::array<double, 4> t) {
        double s = 0.0;
        for (double& v : t) {
            v = std::max(v, 0.0);
            s += v;
        }
        for (double& v : t) v = s > 0 ? 0.25 * v / s : 0.0625;
        return t;
    };
    double best = 0.0;
    constexpr int kStarts = 24;
    constexpr int kSteps = 400;
    for (int start = 0; start < kStarts + 4; ++start) {
        std::array<double, 4> t{};
        if (start < 4) {
            t[start] = 0.25;
        } else {
            for (double& v : t) v = expo(rng);
            t = project(t);
        }
        double val = joint_objective(terms, t);
        double step = 0.05;
        for (int it = 0; it < kSteps && step > 1e-7; ++it) {
            std::array<double, 4> cand = t;
            for (double& v : cand) v += step * gauss(rng);
            cand = project(cand);
            const double cv = joint_objective(terms, cand);
            if (cv > val) {
                t = cand;
                val = cv;
            } else if (it % 20 == 19) {
                step *= 0.5;
            }
        }
        best = std::max(best, val);
    }
    return best;
}

}  // namespace ym
