#pragma once

#include <array>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ym/lie_algebra.hpp"
#include "ym/surface.hpp"

namespace ym {

struct Vertex {
    int i = 0;  // s = i/n
    int j = 0;  // t = j/n
    bool operator==(const Vertex& o) const { return i == o.i && j == o.j; }
};

// Undirected edge in canonical orientation: horizontal (i,j)->(i+1,j) or vertical (i,j)->(i,j+1).
struct EdgeKey {
    int i = 0;
    int j = 0;
    bool vertical = false;
    bool operator<(const EdgeKey& o) const {
        if (i != o.i) return i < o.i;
        if (j != o.j) return j < o.j;
        return vertical < o.vertical;
    }
    bool operator==(const EdgeKey& o) const { return i == o.i && j == o.j && vertical == o.vertical; }
};

struct DirectedEdge {
    Vertex from;
    Vertex to;
    EdgeKey key() const;
    bool forward() const;  // traversed in the canonical orientation
};

struct GridZn {
    int n = 1;
    std::vector<DirectedEdge> traversal;  // canonical time order, starts and ends at (0,0)
    std::vector<DirectedEdge> boundary;   // counterclockwise from (0,0)
};

GridZn build_grid(int n);

// Checks the edge-multiplicity invariants; returns an empty string when they hold.
std::string audit_grid(const GridZn& g);

// Transport matrix per undirected edge in its canonical orientation; reverse is the inverse.
struct EdgeField {
    int n = 1;
    int dim = 1;
    std::map<EdgeKey, MatC> forward;
    std::map<EdgeKey, MatC> inverse;

    void set(const EdgeKey& k, const MatC& m);
    const MatC& transport(const DirectedEdge& e) const;
};

// Uniform (Haar) SU(2) matrices on every edge.
EdgeField random_su2_edge_field(int n, std::mt19937_64& rng);

// Product of transports along a path; later edges multiply on the left.
MatC path_product(const EdgeField& f, const std::vector<DirectedEdge>& path);

struct GridCheck {
    MatC traversal_product;
    MatC boundary_product;
    double deviation = 0.0;  // max-norm
};

GridCheck grid_identity_check(const EdgeField& f);

// a_{j,alpha}(x) = sum c x^e for j = 1..3; A_0 = 0 (axial gauge).
struct PolyTerm {
    double c = 0.0;
    std::array<int, 4> e{0, 0, 0, 0};
};

struct ConnectionField {
    LieBasis basis;
    std::array<std::vector<std::vector<PolyTerm>>, 3> a;  // a[j-1][alpha]

    ConnectionField() = default;
    explicit ConnectionField(LieBasis b);

    int dim() const { return basis.matrix_dim; }
    void add_term(int j, int alpha, double c, const std::array<int, 4>& e);
    double coefficient(int j, int alpha, const Vec4& x) const;
    double d_coefficient(int j, int alpha, int k, const Vec4& x) const;  // d/dx^k
    MatC A(int j, const Vec4& x) const;                                  // j = 0..3
    MatC dA(int j, int k, const Vec4& x) const;                          // d_k A_j
    bool is_zero() const;
};

// Builtin test connections: "zero", "abelian_x2" (A_1 = i (x^0)^2), "abelian_const",
// "su2_poly_a", "su2_poly_b".
ConnectionField builtin_connection(const std::string& name);

// u' = (sum_i A_i dx^i/dtau) u along sigma of the edge, classical RK4.
MatC transport_edge(const ConnectionField& conn, const SurfaceParam& S, const DirectedEdge& e, int n,
                    int ode_steps);

EdgeField edge_field_from_connection(const ConnectionField& conn, const SurfaceParam& S, int n,
                                     int ode_steps);

// Counterclockwise loop around plaquette (i,j), based at its bottom-left corner.
MatC plaquette_product(const ConnectionField& conn, const SurfaceParam& S, int i, int j, int n,
                       int ode_steps);

// Boundary holonomy of sigma([0,1]^2), counterclockwise from sigma(0,0).
MatC boundary_holonomy(const ConnectionField& conn, const SurfaceParam& S, int ode_steps);

// Pulled-back curvature (d_a A_b - d_b A_a - [A_a, A_b]) summed with signed det J_ab; the
// commutator sign matches the transport convention above.
MatC pulled_back_curvature(const ConnectionField& conn, const SurfaceParam& S, double s, double t);

// Exact lasso decomposition of the traversal: product of u_p^{-1} P_p u_p in surface order,
// with edge transports from the given field.
MatC lasso_product(const EdgeField& f);

// Product of exp(u_p^{-1} Omega_p u_p) in the same order, Omega_p the plaquette flux of the
// pulled-back curvature (3x3 Gauss-Legendre) and u_p the frame transports.
MatC surface_ordered_product(const ConnectionField& conn, const SurfaceParam& S, int n,
                             int ode_steps);

struct HolonomyRow {
    int n = 0;
    double error = 0.0;  // max-norm of surface_ordered_product - boundary_holonomy
};

std::vector<HolonomyRow> holonomy_convergence(const ConnectionField& conn, const SurfaceParam& S,
                                              const std::vector<int>& ns, int ode_steps);

// Time ordering over the parameter square: t descending, then s ascending.
// Returns -1 if p1 comes first, 1 if p2 comes first, 0 if equal.
int time_order_compare(const std::array<double, 2>& p1, const std::array<double, 2>& p2);

struct CurvatureExpansion {
    double direct = 0.0;     // |dA + A^A|^2 from matrices
    double expansion = 0.0;  // quadratic + cubic + quartic coefficient form
};

CurvatureExpansion curvature_expansion_check(const ConnectionField& conn, const Vec4& x);

}  // namespace ym
