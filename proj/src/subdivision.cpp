#include "skyinv/subdivision.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace skyinv {

std::string SlopePoly::str() const {
    return c0.str() + " - " + cy.str() + "*d1 - " + cx.str() + "*d2";
}

Rational line_integral(const vec<Rational>& row_pos, const vec<Rational>& col_pos, const vec<vec<elem>>& cols,
                       const PrimeField& f) {
    const int rows = (int)row_pos.size();
    vec<int> order(col_pos.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return col_pos[a] < col_pos[b]; });

    // standard persistence reduction, pivot = last nonzero row
    vec<vec<elem>> reduced;
    vec<int> owner(rows, -1);
    Rational total;
    for (auto& r : row_pos) total -= r;
    int rank = 0;
    for (int idx : order) {
        vec<elem> v = cols[idx];
        while (true) {
            int piv = -1;
            for (int r = rows - 1; r >= 0; --r)
                if (v[r]) { piv = r; break; }
            if (piv < 0) {
                break;  // a syzygy born here: cancels against the column
            }
            if (owner[piv] < 0) {
                owner[piv] = (int)reduced.size();
                reduced.push_back(v);
                ++rank;
                total += col_pos[idx];
                break;
            }
            const vec<elem>& w = reduced[owner[piv]];
            elem c = f.div(v[piv], w[piv]);
            for (int r = 0; r < rows; ++r)
                if (w[r]) v[r] = f.sub(v[r], f.mul(c, w[r]));
        }
    }
    if (rank != rows) throw std::invalid_argument("line_integral: unbounded restriction");
    return total;
}

SlopePoly slope_polynomial(const GradedMatrix& n) {
    if (n.rows() == 0) throw std::invalid_argument("slope_polynomial: zero module");
    const Degree alpha = n.row_degrees[0];
    for (auto& d : n.row_degrees)
        if (d != alpha) throw std::invalid_argument("slope_polynomial: module is not generated at one degree");
    const Rational t(n.rows());
    SlopePoly p;
    p.c0 = integral_dim(n) / t;
    // restrictions to the vertical and horizontal lines through α
    for (int axis = 0; axis < 2; ++axis) {
        vec<Rational> rows, cols;
        vec<vec<elem>> vecs;
        for (auto& d : n.row_degrees) rows.push_back(axis == 0 ? d.y : d.x);
        for (int c = 0; c < n.cols(); ++c) {
            const Degree& d = n.col_degrees[c];
            if ((axis == 0 ? d.x : d.y) > (axis == 0 ? alpha.x : alpha.y)) continue;
            cols.push_back(axis == 0 ? d.y : d.x);
            vecs.push_back(n.dense_column(c));
        }
        Rational v = line_integral(rows, cols, vecs, n.field) / t;
        (axis == 0 ? p.cy : p.cx) = v;
    }
    return p;
}

// ---------------------------------------------------------------- convex regions

ConvexRegion ConvexRegion::rectangle(const Rational& w, const Rational& h) {
    ConvexRegion r;
    r.vertices = {{0, 0}, {w, 0}, {w, h}, {0, h}};
    r.constraints = {{-1, 0, 0}, {1, 0, w}, {0, -1, 0}, {0, 1, h}};
    return r;
}

ConvexRegion ConvexRegion::clipped(const HalfPlane& hp) const {
    ConvexRegion out;
    out.constraints = constraints;
    out.constraints.push_back(hp);
    const std::size_t n = vertices.size();
    auto val = [&](const Point2& p) { return hp.a * p.first + hp.b * p.second - hp.c; };
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = vertices[i];
        const Point2& q = vertices[(i + 1) % n];
        Rational vp = val(p), vq = val(q);
        if (vp <= 0) out.vertices.push_back(p);
        if ((vp < 0 && vq > 0) || (vp > 0 && vq < 0)) {
            Rational t = vp / (vp - vq);
            out.vertices.push_back({p.first + t * (q.first - p.first), p.second + t * (q.second - p.second)});
        }
    }
    // drop repeated vertices
    vec<Point2> clean;
    for (auto& v : out.vertices)
        if (clean.empty() || clean.back() != v) clean.push_back(v);
    while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
    out.vertices = std::move(clean);
    return out;
}

ConvexRegion ConvexRegion::intersect(const ConvexRegion& other) const {
    ConvexRegion r = *this;
    for (auto& hp : other.constraints) r = r.clipped(hp);
    return r;
}

Rational ConvexRegion::area() const {
    Rational s;
    const std::size_t n = vertices.size();
    if (n < 3) return 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = vertices[i];
        const Point2& q = vertices[(i + 1) % n];
        s += p.first * q.second - q.first * p.second;
    }
    return rabs(s) / Rational(2);
}

bool ConvexRegion::contains(const Point2& p) const {
    for (auto& hp : constraints)
        if (!hp.holds(p)) return false;
    return true;
}

vec<EnvelopeFace> lower_envelope(const vec<SlopePoly>& polys, const ConvexRegion& cell) {
    vec<EnvelopeFace> out;
    for (std::size_t i = 0; i < polys.size(); ++i) {
        ConvexRegion r = cell;
        bool dead = false;
        for (std::size_t j = 0; j < polys.size() && !dead; ++j) {
            if (i == j) continue;
            if (polys[i] == polys[j]) {
                dead = j < i;
                continue;
            }
            // p̃_i − p̃_j ≤ 0
            HalfPlane hp{polys[j].cy - polys[i].cy, polys[j].cx - polys[i].cx, polys[j].c0 - polys[i].c0};
            r = r.clipped(hp);
            dead = r.empty_interior();
        }
        if (!dead && !r.empty_interior()) out.push_back({(int)i, std::move(r)});
    }
    return out;
}

namespace {

GradedMatrix subspace_generators(const GradedMatrix& n, const DenseMatrix& basis) {
    GradedMatrix s(n.field);
    s.row_degrees = n.row_degrees;
    for (int c = 0; c < basis.cols(); ++c) s.add_column_dense(n.row_degrees.at(0), basis.column(c));
    return s;
}

} // namespace

vec<MaxSlopeFace> all_max_slope(const GradedMatrix& n, const ConvexRegion& cell) {
    const int t = n.rows();
    vec<DenseMatrix> bases;
    vec<SlopePoly> polys;
    for (int k = t; k >= 1; --k) {
        SubspaceIter it(t, k, n.field);
        DenseMatrix b;
        while (it.next(b)) {
            SlopePoly p = slope_polynomial(submodule_presentation(n, subspace_generators(n, b)));
            // equal polynomials give equal planes; the earlier (larger) subspace is kept
            if (std::find(polys.begin(), polys.end(), p) != polys.end()) continue;
            polys.push_back(p);
            bases.push_back(b);
        }
    }
    vec<MaxSlopeFace> out;
    for (auto& f : lower_envelope(polys, cell)) out.push_back({f.region, bases[f.id], polys[f.id], f.id});
    return out;
}

// ---------------------------------------------------------------- subdivision trees

vec<int> SubdivTree::path(const Degree& beta) const {
    const Rational d1 = beta.x - alpha.x, d2 = beta.y - alpha.y;
    vec<int> out;
    int cur = 0;
    while (!nodes[cur].children.empty()) {
        int best = -1;
        Rational best_v;
        for (int c : nodes[cur].children) {
            Rational v = nodes[c].poly.truncated(d1, d2);
            if (best < 0 || v < best_v || (v == best_v && nodes[c].id < nodes[best].id)) {
                best = c;
                best_v = v;
            }
        }
        out.push_back(best);
        cur = best;
    }
    return out;
}

HNFactorList SubdivTree::factors_at(const Degree& beta) const {
    if (!in_cell(beta)) throw std::invalid_argument("factors_at: point outside the cell");
    const Rational d1 = beta.x - alpha.x, d2 = beta.y - alpha.y;
    HNFactorList l;
    l.alpha = beta;
    for (int k : path(beta)) {
        HNFactor f;
        for (auto& s : nodes[k].staircases) f.staircases.push_back(restrict_staircase(s, beta));
        f.slope = Rational(1) / nodes[k].poly.full(d1, d2);
        l.factors.push_back(std::move(f));
    }
    // on a wall a smaller tied subspace may be picked; its successor then has the same slope
    for (std::size_t i = 1; i < l.factors.size(); ++i)
        if (l.factors[i].slope == l.factors[i - 1].slope) return canonical(l);
    return l;
}

int SubdivTree::depth() const {
    int best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        int d = 0;
        for (int k = (int)i; nodes[k].parent >= 0; k = nodes[k].parent) ++d;
        best = std::max(best, d);
    }
    return best;
}

bool SubdivTree::in_cell(const Degree& beta) const {
    Rational d1 = beta.x - alpha.x, d2 = beta.y - alpha.y;
    return d1 >= 0 && d2 >= 0 && d1 < w && d2 < h;
}

SubdivTree exact_hnf_cell(const GradedMatrix& m, const Degree& alpha, std::optional<Degree> cell_upper) {
    GradedMatrix n = uniquely_generated_at(m, alpha);
    SubdivTree tree;
    tree.alpha = alpha;
    if (cell_upper) {
        tree.w = cell_upper->x - alpha.x;
        tree.h = cell_upper->y - alpha.y;
    } else if (n.rows() > 0) {
        Grid g = induced_grid(n);
        auto nx = std::upper_bound(g.xs.begin(), g.xs.end(), alpha.x);
        auto ny = std::upper_bound(g.ys.begin(), g.ys.end(), alpha.y);
        if (nx == g.xs.end() || ny == g.ys.end()) throw std::invalid_argument("exact_hnf_cell: unbounded cell");
        tree.w = *nx - alpha.x;
        tree.h = *ny - alpha.y;
    }
    if (tree.w <= 0 || tree.h <= 0) {
        if (n.rows() > 0) throw std::invalid_argument("exact_hnf_cell: empty cell");
    }
    SubdivNode root;
    root.region = ConvexRegion::rectangle(tree.w, tree.h);
    root.basis = DenseMatrix(n.rows(), 0, m.field);
    tree.nodes.push_back(root);
    if (n.rows() == 0) return tree;

    // lift maps the rows of the current quotient to representatives in V_α
    std::function<void(int, const GradedMatrix&, const DenseMatrix&)> grow = [&](int node, const GradedMatrix& q,
                                                                                const DenseMatrix& lift) {
        if (q.rows() == 0) return;
        for (auto& face : all_max_slope(q, tree.nodes[node].region)) {
            SubdivNode child;
            child.parent = node;
            child.region = face.region;
            child.basis = tree.nodes[node].basis.hstack(lift * face.basis);
            child.staircases = superlevel_staircases(submodule_presentation(q, subspace_generators(q, face.basis)));
            child.poly = face.poly;
            child.id = face.id;
            int idx = (int)tree.nodes.size();
            tree.nodes.push_back(std::move(child));
            tree.nodes[node].children.push_back(idx);
            QuotientResult qr = quotient_presentation(q, face.basis);
            grow(idx, qr.pres, lift.select_columns(qr.kept_rows));
        }
    };
    grow(0, n, DenseMatrix::identity(n.rows(), m.field));
    return tree;
}

} // namespace skyinv
