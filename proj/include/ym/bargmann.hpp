#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <type_traits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace ym {

using cplx = std::complex<double>;
// Expression templates off so mixed arithmetic deduces plain value types.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;

struct MultiIndex {
    std::array<int, 4> m{0, 0, 0, 0};

    int degree() const { return m[0] + m[1] + m[2] + m[3]; }
    int operator[](int i) const { return m[i]; }
    bool operator==(const MultiIndex& o) const { return m == o.m; }
    bool operator!=(const MultiIndex& o) const { return m != o.m; }
};

// Total order: degree first, then entries m_0..m_3 ascending.
bool n2_less(const MultiIndex& a, const MultiIndex& b);

struct N2Less {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const { return n2_less(a, b); }
};

// p^{alpha,-}: subtract 2 from entry alpha; empty when that entry is below 2.
std::optional<MultiIndex> predecessor(const MultiIndex& p, int alpha);

std::vector<MultiIndex> multi_indices_up_to(int rmax);

std::string to_string(const MultiIndex& p);

// Dense numbering of all multi-indices of degree <= dmax in n2 order.
class MonomialIndexer {
public:
    explicit MonomialIndexer(int dmax = 0);
    int max_degree() const { return dmax_; }
    int size() const { return static_cast<int>(list_.size()); }
    const MultiIndex& at(int i) const { return list_[i]; }
    int index(const MultiIndex& p) const;  // -1 when out of range
    const std::vector<MultiIndex>& all() const { return list_; }

    // out[i] = w^{at(i)}
    void evaluate(const std::array<cplx, 4>& w, cplx* out) const;
    void evaluate(const std::array<double, 4>& x, double* out) const;

private:
    static std::uint32_t key(const MultiIndex& p);
    int dmax_;
    std::vector<MultiIndex> list_;
    std::unordered_map<std::uint32_t, int> lookup_;
};

template <class T>
using Poly = std::map<MultiIndex, T, N2Less>;

// Components a = 1, 2, 3 of sum f_a (x) dx^a.
template <class T>
struct MonomialForm {
    std::array<Poly<T>, 3> comp;
    Poly<T>& operator[](int a) { return comp[a - 1]; }
    const Poly<T>& operator[](int a) const { return comp[a - 1]; }
};

// Pair order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
int pair_index(int a, int b);
std::pair<int, int> pair_of(int idx);
constexpr int kNumPairs = 6;

template <class T>
struct TwoFormPoly {
    std::array<Poly<T>, kNumPairs> comp;
    Poly<T>& at(int a, int b) { return comp[pair_index(a, b)]; }
    const Poly<T>& at(int a, int b) const { return comp[pair_index(a, b)]; }
};

// printed: (i,j) components carry (-1)^{ij}; flipped: the factor is dropped.
enum class WedgeSign { printed, flipped };

inline Rational conj_value(const Rational& x) { return x; }
inline cplx conj_value(const cplx& x) { return std::conj(x); }

template <class T>
T factorial_value(int n);
template <>
Rational factorial_value<Rational>(int n);
template <>
cplx factorial_value<cplx>(int n);

template <class T>
T multi_factorial(const MultiIndex& p) {
    T f = factorial_value<T>(p[0]);
    for (int i = 1; i < 4; ++i) f *= factorial_value<T>(p[i]);
    return f;
}

template <class T>
void poly_add(Poly<T>& out, const MultiIndex& p, const std::type_identity_t<T>& v) {
    auto it = out.find(p);
    if (it == out.end()) {
        if (v != T(0)) out.emplace(p, v);
        return;
    }
    it->second += v;
    if (it->second == T(0)) out.erase(it);
}

template <class T>
Poly<T> dz_op(int axis, const Poly<T>& f) {
    Poly<T> out;
    for (const auto& [p, c] : f) {
        const int n = p[axis];
        if (n > 0) {
            MultiIndex q = p;
            q.m[axis] -= 1;
            poly_add(out, q, c * T(n) / T(2));
        }
        MultiIndex q = p;
        q.m[axis] += 1;
        poly_add(out, q, -c / T(2));
    }
    return out;
}

template <class T>
Poly<T> poly_sub(const Poly<T>& a, const Poly<T>& b) {
    Poly<T> out = a;
    for (const auto& [p, c] : b) poly_add(out, p, -c);
    return out;
}

template <class T>
TwoFormPoly<T> exterior_d(const MonomialForm<T>& f, WedgeSign sign = WedgeSign::printed) {
    TwoFormPoly<T> out;
    for (int a = 1; a <= 3; ++a) out.at(0, a) = dz_op(0, f[a]);
    for (int i = 1; i <= 3; ++i) {
        for (int j = i + 1; j <= 3; ++j) {
            Poly<T> v = poly_sub(dz_op(i, f[j]), dz_op(j, f[i]));
            if (sign == WedgeSign::printed && ((i * j) % 2 == 1)) {
                for (auto& kv : v) kv.second = -kv.second;
            }
            out.at(i, j) = std::move(v);
        }
    }
    return out;
}

// <p, q> = sum_m p_m conj(q_m) m!
template <class T>
T h2_inner(const Poly<T>& p, const Poly<T>& q) {
    T s(0);
    for (const auto& [m, c] : p) {
        auto it = q.find(m);
        if (it != q.end()) s += c * conj_value(it->second) * multi_factorial<T>(m);
    }
    return s;
}

// <d f, d g> with the kappa^2 factor removed.
template <class T>
T fd_inner_unit(const MonomialForm<T>& f, const MonomialForm<T>& g,
                WedgeSign sign = WedgeSign::printed) {
    TwoFormPoly<T> df = exterior_d(f, sign);
    TwoFormPoly<T> dg = exterior_d(g, sign);
    T s(0);
    for (int k = 0; k < kNumPairs; ++k) s += h2_inner(df.comp[k], dg.comp[k]);
    return s;
}

cplx fd_inner(const MonomialForm<cplx>& f, const MonomialForm<cplx>& g, double kappa);

// Exact <z^p dx^a, z^q dx^b>_d / kappa^2. Entries with a != b come from the
// shared wedge (a,b) only and are independent of the sign convention.
Rational monomial_gram(int a, const MultiIndex& p, int b, const MultiIndex& q);

std::string rational_to_string(const Rational& r);
Rational rational_from_string(const std::string& s);
double to_double(const Rational& r);

// One basis slot (component a, multi-index p). Coefficients are kappa-free and
// indexed by the BasisCache monomial numbering.
struct BasisElement {
    int component = 1;
    MultiIndex p;
    // zhat^p: z^p minus its projection onto all lower-degree monomials.
    std::vector<std::pair<int, Rational>> hat;
    Rational hat_norm2;  // |zhat^p|^2 / kappa^2
    // Orthogonal frame element from Gram-Schmidt over all three components jointly
    // (storage order). Indices are global: (component-1)*M + monomial index.
    std::vector<std::pair<int, Rational>> frame;
    Rational frame_norm2;
};

struct BasisCache {
    double kappa = 1.0;
    int rmax = 0;
    MonomialIndexer monomials;
    std::vector<BasisElement> elements;  // component-major, n2 order within a component

    int count() const { return static_cast<int>(elements.size()); }
    double hat_norm(int k) const;
    double frame_norm(int k) const;
    MonomialForm<Rational> hat_form(int k) const;
    MonomialForm<Rational> frame_form(int k) const;

    int global_index(int component, int monomial) const {
        return (component - 1) * monomials.size() + monomial;
    }

    // Orthonormal frame in double precision: column k holds e_k = O_k / |O_k|_{d,kappa},
    // rows are global indices.
    Eigen::MatrixXd frame_coefficients() const;
    // Entry [pair](m, k) is the coefficient of z^m (m indexes ext, degree <= rmax+1)
    // in the pair component of d e_k.
    std::array<Eigen::MatrixXd, kNumPairs> frame_d_coefficients(
        const MonomialIndexer& ext, WedgeSign sign = WedgeSign::printed) const;
};

constexpr int kBasisCacheSchemaVersion = 1;

BasisCache gram_schmidt(double kappa, int rmax);

// Sparse predecessor-only recursion, kept for comparison.
std::vector<Poly<Rational>> sparse_recursion(int component, int rmax);

struct GramReport {
    double lower_degree_residual = 0.0;    // max relative |<zhat^p, z^q>|, deg q < deg p
    double frame_offdiag_residual = 0.0;   // max relative off-diagonal of the joint frame Gram
    double cross_component_overlap = 0.0;  // max relative |<z^p dx^a, z^q dx^b>|, a != b
    double hat_same_degree_overlap = 0.0;  // max relative |<zhat^p, zhat^q>|, same degree
    int sparse_violations = 0;             // nonzero lower-degree overlaps of the sparse recursion
    double sparse_max_overlap = 0.0;
    bool bounds_hold = true;               // (kappa/2)sqrt(p!) <= |zhat^p|, |z^p| <= 3(r+1)kappa sqrt(p!)
};

GramReport validate_basis(const BasisCache& cache);

std::string basis_cache_to_json(const BasisCache& cache);
BasisCache basis_cache_from_json(const std::string& text);

enum class NormMode { upper_bound, optimize };

struct NormTerm {
    int component = 1;
    MultiIndex p;
    double c = 0.0;
};

// sup over the ball |z| <= 1/2 of |z^p|.
double monomial_ball_sup(const MultiIndex& p);

// upper_bound takes the supremum term by term; optimize maximizes the whole sum
// jointly over the moduli |z_i|^2 on the simplex sum = 1/4, so it never exceeds
// the upper bound.
double measurable_norm_bound(const std::vector<NormTerm>& terms, NormMode mode,
                             std::uint64_t seed = 7);

}  // namespace ym
