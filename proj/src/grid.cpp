#include "ym/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace ym {

EdgeKey DirectedEdge::key() const {
    if (from.j == to.j) return EdgeKey{std::min(from.i, to.i), from.j, false};
    return EdgeKey{from.i, std::min(from.j, to.j), true};
}

bool DirectedEdge::forward() const { return to.i > from.i || to.j > from.j; }

namespace {

struct Walker {
    Vertex at;
    std::vector<DirectedEdge>* out;
    void move(int di, int dj) {
        const Vertex next{at.i + di, at.j + dj};
        out->push_back({at, next});
        at = next;
    }
    void right() { move(1, 0); }
    void left() { move(-1, 0); }
    void up() { move(0, 1); }
    void down() { move(0, -1); }
};

}  // namespace

GridZn build_grid(int n) {
    if (n < 1) throw ConfigError("grid subdivision n must be at least 1");
    GridZn g;
    g.n = n;
    Walker w{{0, 0}, &g.traversal};
    w.right();
    for (int row = 0; row < n; ++row) {
        for (int k = 0; k < n - 1; ++k) w.right();
        for (int k = 0; k < n - 1; ++k) {  // Lambda: up, left, down
            w.up();
            w.left();
            w.down();
        }
        w.up();
    }
    for (int k = 0; k < n - 1; ++k) {  // C: left, down, right
        w.left();
        w.down();
        w.right();
    }
    w.left();
    w.down();

    Walker b{{0, 0}, &g.boundary};
    for (int k = 0; k < n; ++k) b.right();
    for (int k = 0; k < n; ++k) b.up();
    for (int k = 0; k < n; ++k) b.left();
    for (int k = 0; k < n; ++k) b.down();
    return g;
}

std::string audit_grid(const GridZn& g) {
    const int n = g.n;
    std::ostringstream err;
    if (g.traversal.empty() || !(g.traversal.front().from == Vertex{0, 0}) ||
        !(g.traversal.back().to == Vertex{0, 0})) {
        err << "traversal does not start and end at (0,0); ";
    }
    for (std::size_t k = 1; k < g.traversal.size(); ++k) {
        if (!(g.traversal[k].from == g.traversal[k - 1].to)) {
            err << "traversal is not a connected path at step " << k << "; ";
            break;
        }
    }
    std::map<EdgeKey, std::pair<int, int>> counts;  // forward, backward
    for (const auto& e : g.traversal) {
        const auto k = e.key();
        if (k.i < 0 || k.j < 0 || k.i > n || k.j > n || (!k.vertical && k.i >= n) ||
            (k.vertical && k.j >= n)) {
            err << "edge outside the grid; ";
            continue;
        }
        auto& c = counts[k];
        (e.forward() ? c.first : c.second)++;
    }
    std::map<EdgeKey, bool> boundary_forward;
    for (const auto& e : g.boundary) boundary_forward[e.key()] = e.forward();
    const std::size_t expected_edges = 2 * static_cast<std::size_t>(n) * (n + 1);
    if (counts.size() != expected_edges) err << "not every edge is traversed; ";
    for (const auto& [k, c] : counts) {
        auto it = boundary_forward.find(k);
        if (it != boundary_forward.end()) {
            const bool ok = it->second ? (c.first == 1 && c.second == 0) : (c.first == 0 && c.second == 1);
            if (!ok) err << "boundary edge not traversed exactly once counterclockwise; ";
        } else if (c.first != 1 || c.second != 1) {
            err << "internal edge not traversed exactly twice in opposite directions; ";
        }
    }
    if (g.traversal.size() != 4 * static_cast<std::size_t>(n) * n) err << "directed edge count != 4n^2; ";
    return err.str();
}

void EdgeField::set(const EdgeKey& k, const MatC& m) {
    forward[k] = m;
    inverse[k] = m.inverse();
}

const MatC& EdgeField::transport(const DirectedEdge& e) const {
    const auto k = e.key();
    const auto& table = e.forward() ? forward : inverse;
    auto it = table.find(k);
    if (it == table.end()) throw std::out_of_range("edge field has no entry for this edge");
    return it->second;
}

namespace {

std::vector<EdgeKey> all_edges(int n) {
    std::vector<EdgeKey> keys;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i < n; ++i) keys.push_back({i, j, false});
    }
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j < n; ++j) keys.push_back({i, j, true});
    }
    return keys;
}

DirectedEdge forward_edge(const EdgeKey& k) {
    return k.vertical ? DirectedEdge{{k.i, k.j}, {k.i, k.j + 1}} : DirectedEdge{{k.i, k.j}, {k.i + 1, k.j}};
}

double max_norm(const MatC& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

EdgeField random_su2_edge_field(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    EdgeField f;
    f.n = n;
    f.dim = 2;
    for (const auto& k : all_edges(n)) {
        double q[4];
        double norm = 0.0;
        for (double& v : q) {
            v = g(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (double& v : q) v /= norm;
        MatC m(2, 2);
        m << cplx(q[0], q[1]), cplx(q[2], q[3]), cplx(-q[2], q[3]), cplx(q[0], -q[1]);
        f.set(k, m);
    }
    return f;
}

MatC path_product(const EdgeField& f, const std::vector<DirectedEdge>& path) {
    MatC h = MatC::Identity(f.dim, f.dim);
    for (const auto& e : path) h = f.transport(e) * h;
    return h;
}

GridCheck grid_identity_check(const EdgeField& f) {
    const GridZn g = build_grid(f.n);
    GridCheck r;
    r.traversal_product = path_product(f, g.traversal);
    r.boundary_product = path_product(f, g.boundary);
    r.deviation = max_norm(r.traversal_product - r.boundary_product);
    return r;
}

ConnectionField::ConnectionField(LieBasis b) : basis(std::move(b)) {
    for (auto& comp : a) comp.assign(basis.algebra_dim(), {});
}

void ConnectionField::add_term(int j, int alpha, double c, const std::array<int, 4>& e) {
    if (j < 1 || j > 3) throw ConfigError("connection component must be 1, 2 or 3 (axial gauge)");
    if (alpha < 0 || alpha >= basis.algebra_dim()) throw ConfigError("Lie direction out of range");
    a[j - 1][alpha].push_back({c, e});
}

namespace {

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

}  // namespace

double ConnectionField::coefficient(int j, int alpha, const Vec4& x) const {
    if (j == 0) return 0.0;
    double s = 0.0;
    for (const auto& t : a[j - 1][alpha]) {
        s += t.c * ipow(x[0], t.e[0]) * ipow(x[1], t.e[1]) * ipow(x[2], t.e[2]) * ipow(x[3], t.e[3]);
    }
    return s;
}

double ConnectionField::d_coefficient(int j, int alpha, int k, const Vec4& x) const {
    if (j == 0) return 0.0;
    double s = 0.0;
    for (const auto& t : a[j - 1][alpha]) {
        if (t.e[k] == 0) continue;
        double v = t.c * t.e[k];
        for (int i = 0; i < 4; ++i) v *= ipow(x[i], i == k ? t.e[i] - 1 : t.e[i]);
        s += v;
    }
    return s;
}

MatC ConnectionField::A(int j, const Vec4& x) const {
    MatC m = MatC::Zero(dim(), dim());
    if (j == 0) return m;
    for (int al = 0; al < basis.algebra_dim(); ++al) {
        const double c = coefficient(j, al, x);
        if (c != 0.0) m += c * basis.generators[al];
    }
    return m;
}

MatC ConnectionField::dA(int j, int k, const Vec4& x) const {
    MatC m = MatC::Zero(dim(), dim());
    if (j == 0) return m;
    for (int al = 0; al < basis.algebra_dim(); ++al) {
        const double c = d_coefficient(j, al, k, x);
        if (c != 0.0) m += c * basis.generators[al];
    }
    return m;
}

bool ConnectionField::is_zero() const {
    for (const auto& comp : a) {
        for (const auto& terms : comp) {
            for (const auto& t : terms) {
                if (t.c != 0.0) return false;
            }
        }
    }
    return true;
}

ConnectionField builtin_connection(const std::string& name) {
    if (name == "zero") return ConnectionField(build_basis(GroupKind::SU, 2));
    if (name == "abelian_x2") {
        ConnectionField c(build_basis(GroupKind::U1, 1));
        c.add_term(1, 0, 1.0, {2, 0, 0, 0});
        return c;
    }
    if (name == "abelian_const") {
        ConnectionField c(build_basis(GroupKind::U1, 1));
        c.add_term(1, 0, 0.7, {0, 0, 0, 0});
        return c;
    }
    if (name == "su2_poly_a") {
        ConnectionField c(build_basis(GroupKind::SU, 2));
        c.add_term(1, 0, 1.2, {1, 0, 0, 0});
        c.add_term(1, 0, 0.5, {0, 0, 1, 0});
        c.add_term(1, 2, 0.8, {1, 1, 0, 0});
        c.add_term(1, 1, 0.6, {0, 0, 2, 0});
        c.add_term(1, 1, 0.8, {0, 0, 0, 0});
        c.add_term(2, 1, 0.9, {0, 1, 0, 0});
        c.add_term(2, 1, 0.7, {1, 0, 0, 0});
        c.add_term(2, 2, 0.4, {0, 0, 0, 0});
        c.add_term(3, 2, 0.3, {1, 0, 0, 0});
        return c;
    }
    if (name == "su2_poly_b") {
        ConnectionField c(build_basis(GroupKind::SU, 2));
        c.add_term(1, 1, 1.0, {0, 0, 0, 0});
        c.add_term(1, 2, 1.1, {1, 0, 1, 0});
        c.add_term(1, 0, -0.6, {2, 0, 0, 0});
        c.add_term(1, 2, 0.9, {1, 1, 0, 0});
        c.add_term(2, 0, 0.7, {0, 1, 0, 0});
        c.add_term(2, 0, 0.9, {1, 0, 0, 0});
        c.add_term(2, 2, 0.5, {0, 1, 1, 0});
        c.add_term(3, 1, 0.4, {0, 1, 0, 0});
        return c;
    }
    throw ConfigError("unknown builtin connection: " + name);
}

namespace {

// M(tau) = sum_i A_i(sigma) d sigma_i / d tau along a straight parameter segment.
MatC generator_along(const ConnectionField& conn, const SurfaceParam& S, double s0, double t0, double ds,
                     double dt, double tau) {
    const SurfacePoint p = S.at(s0 + tau * ds, t0 + tau * dt);
    MatC m = MatC::Zero(conn.dim(), conn.dim());
    for (int i = 1; i <= 3; ++i) {
        const double v = ds * p.ds[i] + dt * p.dt[i];
        if (v != 0.0) m += v * conn.A(i, p.x);
    }
    return m;
}

MatC transport_segment(const ConnectionField& conn, const SurfaceParam& S, double s0, double t0, double s1,
                       double t1, int steps) {
    if (steps < 1) throw ConfigError("ode_steps must be at least 1");
    const int d = conn.dim();
    MatC u = MatC::Identity(d, d);
    if (conn.is_zero()) return u;
    const double ds = s1 - s0, dt = t1 - t0;
    const double h = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
        const double tau = k * h;
        const MatC M0 = generator_along(conn, S, s0, t0, ds, dt, tau);
        const MatC Mh = generator_along(conn, S, s0, t0, ds, dt, tau + 0.5 * h);
        const MatC M1 = generator_along(conn, S, s0, t0, ds, dt, tau + h);
        const MatC k1 = M0 * u;
        const MatC k2 = Mh * (u + 0.5 * h * k1);
        const MatC k3 = Mh * (u + 0.5 * h * k2);
        const MatC k4 = M1 * (u + h * k3);
        u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return u;
}

}  // namespace

MatC transport_edge(const ConnectionField& conn, const SurfaceParam& S, const DirectedEdge& e, int n,
                    int ode_steps) {
    const double inv = 1.0 / n;
    return transport_segment(conn, S, e.from.i * inv, e.from.j * inv, e.to.i * inv, e.to.j * inv, ode_steps);
}

EdgeField edge_field_from_connection(const ConnectionField& conn, const SurfaceParam& S, int n,
                                     int ode_steps) {
    EdgeField f;
    f.n = n;
    f.dim = conn.dim();
    for (const auto& k : all_edges(n)) {
        const DirectedEdge e = forward_edge(k);
        f.forward[k] = transport_edge(conn, S, e, n, ode_steps);
        f.inverse[k] = transport_edge(conn, S, DirectedEdge{e.to, e.from}, n, ode_steps);
    }
    return f;
}

MatC plaquette_product(const ConnectionField& conn, const SurfaceParam& S, int i, int j, int n,
                       int ode_steps) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw ConfigError("plaquette index out of range");
    const std::vector<DirectedEdge> loop = {{{i, j}, {i + 1, j}},
                                            {{i + 1, j}, {i + 1, j + 1}},
                                            {{i + 1, j + 1}, {i, j + 1}},
                                            {{i, j + 1}, {i, j}}};
    MatC h = MatC::Identity(conn.dim(), conn.dim());
    for (const auto& e : loop) h = transport_edge(conn, S, e, n, ode_steps) * h;
    return h;
}

MatC boundary_holonomy(const ConnectionField& conn, const SurfaceParam& S, int ode_steps) {
    MatC h = transport_segment(conn, S, 0, 0, 1, 0, ode_steps);
    h = transport_segment(conn, S, 1, 0, 1, 1, ode_steps) * h;
    h = transport_segment(conn, S, 1, 1, 0, 1, ode_steps) * h;
    h = transport_segment(conn, S, 0, 1, 0, 0, ode_steps) * h;
    return h;
}

MatC pulled_back_curvature(const ConnectionField& conn, const SurfaceParam& S, double s, double t) {
    const SurfacePoint p = S.at(s, t);
    const JacobianSet js = jacobians(p);
    MatC F = MatC::Zero(conn.dim(), conn.dim());
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            const double det = js.det(a, b);
            if (det == 0.0) continue;
            const MatC Aa = conn.A(a, p.x), Ab = conn.A(b, p.x);
            F += det * (conn.dA(b, a, p.x) - conn.dA(a, b, p.x) - (Aa * Ab - Ab * Aa));
        }
    }
    return F;
}

namespace {

using FrameFn = std::function<MatC(const Vertex&)>;

// Lasso bases and loops of the surface order; visit(base, loop) is called in product order
// (leftmost factor first).
template <class Visit>
void for_each_lasso(int n, Visit visit) {
    auto ccw_from_bottom_left = [](int i, int j) {
        return std::vector<DirectedEdge>{{{i, j}, {i + 1, j}},
                                         {{i + 1, j}, {i + 1, j + 1}},
                                         {{i + 1, j + 1}, {i, j + 1}},
                                         {{i, j + 1}, {i, j}}};
    };
    visit(0, 0, Vertex{0, 0}, ccw_from_bottom_left(0, 0));
    for (int y = 1; y < n; ++y) {
        // Column-0 plaquette based at its bottom-right corner.
        visit(0, y, Vertex{1, y},
              std::vector<DirectedEdge>{{{1, y}, {1, y + 1}},
                                        {{1, y + 1}, {0, y + 1}},
                                        {{0, y + 1}, {0, y}},
                                        {{0, y}, {1, y}}});
    }
    for (int j = n - 1; j >= 0; --j) {
        for (int k = 1; k < n; ++k) visit(k, j, Vertex{k, j}, ccw_from_bottom_left(k, j));
    }
}

// Frame path: (0,0) -> (1,0), up column 1 to (1,j), right along row j to (k,j).
std::vector<DirectedEdge> frame_path(const Vertex& v) {
    std::vector<DirectedEdge> path;
    if (v.i == 0 && v.j == 0) return path;
    if (v.i < 1) throw std::logic_error("frame path defined for columns >= 1");
    path.push_back({{0, 0}, {1, 0}});
    for (int y = 0; y < v.j; ++y) path.push_back({{1, y}, {1, y + 1}});
    for (int x = 1; x < v.i; ++x) path.push_back({{x, v.j}, {x + 1, v.j}});
    return path;
}

}  // namespace

MatC lasso_product(const EdgeField& f) {
    MatC H = MatC::Identity(f.dim, f.dim);
    for_each_lasso(f.n, [&](int, int, const Vertex& base, const std::vector<DirectedEdge>& loop) {
        const MatC u = path_product(f, frame_path(base));
        H = H * (u.inverse() * path_product(f, loop) * u);
    });
    return H;
}

MatC surface_ordered_product(const ConnectionField& conn, const SurfaceParam& S, int n, int ode_steps) {
    if (n < 1) throw ConfigError("n must be at least 1");
    const int d = conn.dim();
    if (conn.is_zero()) return MatC::Identity(d, d);
    const EdgeField f = edge_field_from_connection(conn, S, n, ode_steps);
    std::vector<double> w;
    const std::vector<double> gl = gauss_legendre_nodes(3, &w);
    const double eps = 1.0 / n;
    MatC H = MatC::Identity(d, d);
    for_each_lasso(n, [&](int i, int j, const Vertex& base, const std::vector<DirectedEdge>&) {
        MatC omega = MatC::Zero(d, d);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                omega += (w[a] * w[b] * eps * eps) *
                         pulled_back_curvature(conn, S, (i + gl[a]) * eps, (j + gl[b]) * eps);
            }
        }
        const MatC u = path_product(f, frame_path(base));
        const MatC X = u.inverse() * omega * u;
        H = H * X.exp();
    });
    return H;
}

std::vector<HolonomyRow> holonomy_convergence(const ConnectionField& conn, const SurfaceParam& S,
                                              const std::vector<int>& ns, int ode_steps) {
    const MatC ref = boundary_holonomy(conn, S, std::max(ode_steps, 64) * 8);
    std::vector<HolonomyRow> rows;
    for (int n : ns) {
        const MatC h = surface_ordered_product(conn, S, n, ode_steps);
        rows.push_back({n, max_norm(h - ref)});
    }
    return rows;
}

int time_order_compare(const std::array<double, 2>& p1, const std::array<double, 2>& p2) {
    if (p1[1] != p2[1]) return p1[1] > p2[1] ? -1 : 1;
    if (p1[0] != p2[0]) return p1[0] < p2[0] ? -1 : 1;
    return 0;
}

CurvatureExpansion curvature_expansion_check(const ConnectionField& conn, const Vec4& x) {
    const StructureConstants sc = structure_constants(conn.basis);
    const int N = conn.basis.algebra_dim();
    CurvatureExpansion r;
    auto hs_norm2 = [](const MatC& m) { return -(m * m).trace().real(); };
    for (int i = 1; i <= 3; ++i) {
        for (int j = i + 1; j <= 3; ++j) {
            const MatC Ai = conn.A(i, x), Aj = conn.A(j, x);
            const MatC F = conn.dA(j, i, x) - conn.dA(i, j, x) + (Ai * Aj - Aj * Ai);
            r.direct += hs_norm2(F);
            for (int g = 0; g < N; ++g) {
                const double lin = conn.d_coefficient(j, g, i, x) - conn.d_coefficient(i, g, j, x);
                double quad = 0.0;
                for (int al = 0; al < N; ++al) {
                    for (int be = al + 1; be < N; ++be) {
                        const double m = conn.coefficient(i, al, x) * conn.coefficient(j, be, x) -
                                         conn.coefficient(i, be, x) * conn.coefficient(j, al, x);
                        quad += m * sc(g, al, be);
                    }
                }
                r.expansion += lin * lin + quad * quad + 2.0 * lin * quad;
            }
        }
    }
    for (int j = 1; j <= 3; ++j) {
        r.direct += hs_norm2(conn.dA(j, 0, x));
        for (int g = 0; g < N; ++g) {
            const double v = conn.d_coefficient(j, g, 0, x);
            r.expansion += v * v;
        }
    }
    return r;
}

}  // namespace ym
