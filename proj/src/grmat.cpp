#include "skyinv/grmat.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace skyinv {

// ---------------------------------------------------------------- grids

Grid::Grid(vec<Rational> xs_, vec<Rational> ys_) : xs(std::move(xs_)), ys(std::move(ys_)) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
}

bool Grid::contains(const Degree& d) const {
    return std::binary_search(xs.begin(), xs.end(), d.x) && std::binary_search(ys.begin(), ys.end(), d.y);
}

Grid Grid::regular(Rational x0, Rational x1, Rational y0, Rational y1, Rational step) {
    if (step.sign() <= 0) throw std::invalid_argument("grid step must be positive");
    vec<Rational> xs, ys;
    for (Rational v = x0; v <= x1; v += step) xs.push_back(v);
    for (Rational v = y0; v <= y1; v += step) ys.push_back(v);
    return Grid(xs, ys);
}

ExtCoord coord_floor(const vec<Rational>& cs, const Rational& v) {
    auto it = std::upper_bound(cs.begin(), cs.end(), v);
    if (it == cs.begin()) return {-1, {}};
    return {0, *std::prev(it)};
}

ExtCoord coord_ceil(const vec<Rational>& cs, const Rational& v) {
    auto it = std::lower_bound(cs.begin(), cs.end(), v);
    if (it == cs.end()) return {1, {}};
    return {0, *it};
}

ExtDegree grid_floor(const Degree& a, const Grid& g) { return {coord_floor(g.xs, a.x), coord_floor(g.ys, a.y)}; }
ExtDegree grid_ceil(const Degree& a, const Grid& g) { return {coord_ceil(g.xs, a.x), coord_ceil(g.ys, a.y)}; }

// ---------------------------------------------------------------- GradedMatrix

void GradedMatrix::add_column(const Degree& d, SparseColumn entries) {
    std::sort(entries.begin(), entries.end(), [](auto& a, auto& b) { return a.first < b.first; });
    SparseColumn out;
    for (auto [i, c] : entries) {
        if (i < 0 || i >= rows()) throw std::out_of_range("column entry row index out of range");
        c %= field.q();
        if (!out.empty() && out.back().first == i)
            out.back().second = field.add(out.back().second, c);
        else
            out.push_back({i, c});
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](auto& e) { return e.second == 0; }), out.end());
    col_degrees.push_back(d);
    columns.push_back(std::move(out));
}

void GradedMatrix::add_column_dense(const Degree& d, const vec<elem>& v) {
    SparseColumn c;
    for (int i = 0; i < (int)v.size(); ++i)
        if (v[i]) c.push_back({i, v[i]});
    col_degrees.push_back(d);
    columns.push_back(std::move(c));
}

elem GradedMatrix::entry(int i, int j) const {
    for (auto [r, c] : columns[j])
        if (r == i) return c;
    return 0;
}

vec<elem> GradedMatrix::dense_column(int j) const {
    vec<elem> v(rows(), 0);
    for (auto [r, c] : columns[j]) v[r] = c;
    return v;
}

DenseMatrix GradedMatrix::dense() const {
    DenseMatrix d(rows(), cols(), field);
    for (int j = 0; j < cols(); ++j)
        for (auto [r, c] : columns[j]) d.at(r, j) = c;
    return d;
}

bool GradedMatrix::is_homogeneous() const {
    for (int j = 0; j < cols(); ++j)
        for (auto [r, c] : columns[j])
            if (!leq(row_degrees[r], col_degrees[j])) return false;
    return true;
}

void GradedMatrix::validate() const {
    for (int j = 0; j < cols(); ++j)
        for (auto [r, c] : columns[j]) {
            if (r < 0 || r >= rows()) throw std::invalid_argument("row index out of range in column " + std::to_string(j));
            if (!leq(row_degrees[r], col_degrees[j]))
                throw std::invalid_argument("inhomogeneous entry: row " + std::to_string(r) + " at " +
                                            row_degrees[r].str() + " in column " + std::to_string(j) + " at " +
                                            col_degrees[j].str());
        }
}

bool operator==(const GradedMatrix& a, const GradedMatrix& b) {
    return a.field == b.field && a.row_degrees == b.row_degrees && a.col_degrees == b.col_degrees &&
           a.columns == b.columns;
}

// ---------------------------------------------------------------- helpers

namespace {

// v -= c * w over field f
void axpy(vec<elem>& v, elem c, const vec<elem>& w, const PrimeField& f) {
    if (!c) return;
    elem nc = f.neg(c);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (w[i]) v[i] = f.add(v[i], f.mul(nc, w[i]));
}

int last_nonzero(const vec<elem>& v) {
    for (int i = (int)v.size() - 1; i >= 0; --i)
        if (v[i]) return i;
    return -1;
}

// Incremental echelon basis with pivot = last nonzero index, pivots normalized to 1.
struct Echelon {
    PrimeField f;
    std::map<int, vec<elem>> rows;  // pivot -> vector

    explicit Echelon(PrimeField f_) : f(f_) {}
    // reduces v in place; returns true if v was independent (and inserts it)
    bool insert(vec<elem> v) {
        reduce(v);
        int p = last_nonzero(v);
        if (p < 0) return false;
        elem s = f.inv(v[p]);
        for (auto& x : v) x = f.mul(x, s);
        rows.emplace(p, std::move(v));
        return true;
    }
    void reduce(vec<elem>& v) const {
        for (int p = last_nonzero(v); p >= 0;) {
            auto it = rows.find(p);
            if (it == rows.end()) {
                // skip to next lower nonzero entry
                int q = p - 1;
                while (q >= 0 && !v[q]) --q;
                p = q;
                continue;
            }
            axpy(v, v[p], it->second, f);
            int q = p - 1;
            while (q >= 0 && !v[q]) --q;
            p = q;
        }
    }
    bool contains(vec<elem> v) const {
        reduce(v);
        return last_nonzero(v) < 0;
    }
};

} // namespace

// ---------------------------------------------------------------- kernel

GradedMatrix kernel(const GradedMatrix& m) {
    const PrimeField& f = m.field;
    const int n = m.cols(), R = m.rows();
    GradedMatrix k(f);
    k.row_degrees = m.col_degrees;
    if (n == 0) return k;

    vec<Rational> ys;
    for (auto& d : m.col_degrees) ys.push_back(d.y);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    vec<int> by_x(n);
    std::iota(by_x.begin(), by_x.end(), 0);
    std::stable_sort(by_x.begin(), by_x.end(), [&](int a, int b) { return m.col_degrees[a].x < m.col_degrees[b].x; });

    vec<vec<elem>> dense(n);
    for (int j = 0; j < n; ++j) dense[j] = m.dense_column(j);

    struct Born {
        Rational x;
        vec<elem> v;
    };
    vec<Born> prev;

    for (const Rational& y : ys) {
        vec<Born> cur;
        std::map<int, std::pair<vec<elem>, vec<elem>>> piv;  // pivot row -> (reduced col, expression)
        for (int j : by_x) {
            if (m.col_degrees[j].y > y) continue;
            vec<elem> v = dense[j];
            vec<elem> e(n, 0);
            e[j] = 1;
            for (int p = last_nonzero(v); p >= 0; p = last_nonzero(v)) {
                auto it = piv.find(p);
                if (it == piv.end()) break;
                elem c = f.div(v[p], it->second.first[p]);
                axpy(v, c, it->second.first, f);
                axpy(e, c, it->second.second, f);
            }
            int p = last_nonzero(v);
            if (p < 0)
                cur.push_back({m.col_degrees[j].x, std::move(e)});
            else
                piv.emplace(p, std::make_pair(std::move(v), std::move(e)));
        }
        (void)R;
        // new generators at (x, y) for each x where this level has births
        std::size_t i = 0;
        while (i < cur.size()) {
            Rational x = cur[i].x;
            std::size_t end = i;
            while (end < cur.size() && cur[end].x == x) ++end;
            int dim_k = (int)end, dim_left = (int)i;
            int dim_down = 0, dim_diag = 0;
            for (auto& b : prev) {
                if (b.x <= x) ++dim_down;
                if (b.x < x) ++dim_diag;
            }
            int fresh = dim_k - dim_left - dim_down + dim_diag;
            if (fresh > 0) {
                Echelon span(f);
                for (std::size_t t = 0; t < i; ++t) span.insert(cur[t].v);
                for (auto& b : prev)
                    if (b.x <= x) span.insert(b.v);
                for (std::size_t t = i; t < end && fresh > 0; ++t)
                    if (span.insert(cur[t].v)) {
                        k.add_column_dense({x, y}, cur[t].v);
                        --fresh;
                    }
                if (fresh != 0) throw std::logic_error("kernel sweep: inconsistent syzygy count");
            }
            i = end;
        }
        prev = std::move(cur);
    }
    return k;
}

// ---------------------------------------------------------------- minimize

GradedMatrix minimize(const GradedMatrix& m, vec<int>* kept_rows) {
    const PrimeField& f = m.field;
    const int R = m.rows(), C = m.cols();
    vec<vec<elem>> cols(C);
    for (int j = 0; j < C; ++j) cols[j] = m.dense_column(j);
    vec<char> row_alive(R, 1), col_alive(C, 1);

    // eliminate entries between a row and a column of equal degree
    for (bool changed = true; changed;) {
        changed = false;
        for (int j = 0; j < C && !changed; ++j) {
            if (!col_alive[j]) continue;
            for (int i = 0; i < R; ++i) {
                if (!row_alive[i] || !cols[j][i] || m.row_degrees[i] != m.col_degrees[j]) continue;
                elem inv = f.inv(cols[j][i]);
                for (int l = 0; l < C; ++l) {
                    if (l == j || !col_alive[l] || !cols[l][i]) continue;
                    axpy(cols[l], f.mul(cols[l][i], inv), cols[j], f);
                }
                row_alive[i] = 0;
                col_alive[j] = 0;
                for (int l = 0; l < C; ++l) cols[l][i] = 0;
                changed = true;
                break;
            }
        }
    }

    // drop columns lying in the span of kept columns of lower or equal degree
    vec<int> order;
    for (int j = 0; j < C; ++j)
        if (col_alive[j]) order.push_back(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return colex_less(m.col_degrees[a], m.col_degrees[b]); });
    vec<int> kept_cols;
    for (int j : order) {
        Echelon e(f);
        for (int l : kept_cols)
            if (leq(m.col_degrees[l], m.col_degrees[j])) e.insert(cols[l]);
        if (!e.contains(cols[j])) kept_cols.push_back(j);
    }
    std::sort(kept_cols.begin(), kept_cols.end());

    GradedMatrix out(f);
    vec<int> new_index(R, -1);
    vec<int> rows_out;
    for (int i = 0; i < R; ++i)
        if (row_alive[i]) {
            new_index[i] = out.rows();
            out.add_row(m.row_degrees[i]);
            rows_out.push_back(i);
        }
    for (int j : kept_cols) {
        SparseColumn c;
        for (int i = 0; i < R; ++i)
            if (row_alive[i] && cols[j][i]) c.push_back({new_index[i], cols[j][i]});
        out.col_degrees.push_back(m.col_degrees[j]);
        out.columns.push_back(std::move(c));
    }
    if (kept_rows) *kept_rows = rows_out;
    return out;
}

// ---------------------------------------------------------------- submodules and quotients

GradedMatrix submodule_presentation(const GradedMatrix& m, const GradedMatrix& s) {
    if (s.rows() != m.rows()) throw std::invalid_argument("submodule generators must live over the rows of M");
    GradedMatrix joint(m.field);
    joint.row_degrees = m.row_degrees;
    for (int j = 0; j < s.cols(); ++j) {
        joint.col_degrees.push_back(s.col_degrees[j]);
        joint.columns.push_back(s.columns[j]);
    }
    for (int j = 0; j < m.cols(); ++j) {
        joint.col_degrees.push_back(m.col_degrees[j]);
        joint.columns.push_back(m.columns[j]);
    }
    GradedMatrix k = kernel(joint);
    GradedMatrix n(m.field);
    n.row_degrees = s.col_degrees;
    const int top = s.cols();
    for (int j = 0; j < k.cols(); ++j) {
        SparseColumn c;
        for (auto [r, v] : k.columns[j])
            if (r < top) c.push_back({r, v});
        n.col_degrees.push_back(k.col_degrees[j]);
        n.columns.push_back(std::move(c));
    }
    return minimize(n);
}

GradedMatrix generators_at(const GradedMatrix& m, const Degree& alpha, const DenseMatrix& basis) {
    PointwiseModel pm = pointwise_model(m, alpha);
    if (basis.rows() != pm.dim) throw std::invalid_argument("basis does not match dim V_alpha");
    GradedMatrix s(m.field);
    s.row_degrees = m.row_degrees;
    for (int c = 0; c < basis.cols(); ++c) {
        SparseColumn col;
        for (int r = 0; r < pm.dim; ++r)
            if (basis.at(r, c)) col.push_back({pm.basis_rows[r], basis.at(r, c)});
        s.add_column(alpha, col);
    }
    return s;
}

QuotientResult quotient_presentation(const GradedMatrix& m, const DenseMatrix& b) {
    const PrimeField& f = m.field;
    const int t = m.rows();
    if (b.rows() != t) throw std::invalid_argument("quotient basis has wrong ambient dimension");
    for (int i = 1; i < t; ++i)
        if (m.row_degrees[i] != m.row_degrees[0]) throw std::invalid_argument("quotient_presentation needs a uniquely generated module");
    DenseMatrix e = b.transpose();
    vec<int> pivots = rref_inplace(e);
    if ((int)pivots.size() != b.cols()) throw std::invalid_argument("degenerate basis: columns are not independent");

    vec<vec<elem>> cols(m.cols());
    for (int j = 0; j < m.cols(); ++j) {
        cols[j] = m.dense_column(j);
        for (int r = 0; r < (int)pivots.size(); ++r) {
            elem c = cols[j][pivots[r]];
            if (!c) continue;
            elem nc = f.neg(c);
            for (int i = 0; i < t; ++i)
                if (e.at(r, i)) cols[j][i] = f.add(cols[j][i], f.mul(nc, e.at(r, i)));
        }
    }
    vec<char> is_pivot(t, 0);
    for (int p : pivots) is_pivot[p] = 1;
    GradedMatrix q(f);
    vec<int> kept;
    vec<int> index(t, -1);
    for (int i = 0; i < t; ++i)
        if (!is_pivot[i]) {
            index[i] = q.rows();
            q.add_row(m.row_degrees[i]);
            kept.push_back(i);
        }
    for (int j = 0; j < m.cols(); ++j) {
        SparseColumn c;
        for (int i = 0; i < t; ++i)
            if (!is_pivot[i] && cols[j][i]) c.push_back({index[i], cols[j][i]});
        q.col_degrees.push_back(m.col_degrees[j]);
        q.columns.push_back(std::move(c));
    }
    vec<int> kept2;
    QuotientResult out;
    out.pres = minimize(q, &kept2);
    for (int i : kept2) out.kept_rows.push_back(kept[i]);
    return out;
}

GradedMatrix shift_join(const GradedMatrix& m, const Degree& alpha) {
    GradedMatrix out = m;
    for (auto& d : out.row_degrees) d = join(d, alpha);
    for (auto& d : out.col_degrees) d = join(d, alpha);
    return out;
}

GradedMatrix grid_restrict(const GradedMatrix& m, const Grid& g, RestrictStats* stats) {
    GradedMatrix out(m.field);
    vec<int> index(m.rows(), -1);
    RestrictStats st;
    for (int i = 0; i < m.rows(); ++i) {
        ExtDegree c = grid_ceil(m.row_degrees[i], g);
        if (!c.finite()) { ++st.dropped_rows; continue; }
        index[i] = out.rows();
        out.add_row(c.value());
    }
    for (int j = 0; j < m.cols(); ++j) {
        ExtDegree c = grid_ceil(m.col_degrees[j], g);
        if (!c.finite()) { ++st.dropped_cols; continue; }
        SparseColumn col;
        for (auto [r, v] : m.columns[j])
            if (index[r] >= 0) col.push_back({index[r], v});
        out.col_degrees.push_back(c.value());
        out.columns.push_back(std::move(col));
    }
    if (stats) *stats = st;
    return out;
}

// ---------------------------------------------------------------- pointwise evaluation

vec<elem> PointwiseModel::coords(vec<elem> v) const {
    for (auto& [p, w] : image) {
        elem c = v[p];
        if (!c) continue;
        elem nc = field.neg(c);
        for (std::size_t i = 0; i < v.size(); ++i)
            if (w[i]) v[i] = field.add(v[i], field.mul(nc, w[i]));
    }
    vec<elem> out(dim);
    for (int r = 0; r < dim; ++r) out[r] = v[basis_rows[r]];
    return out;
}

PointwiseModel pointwise_model(const GradedMatrix& m, const Degree& gamma) {
    PointwiseModel pm;
    pm.degree = gamma;
    pm.field = m.field;
    const int R = m.rows();
    vec<char> active(R, 0);
    for (int i = 0; i < R; ++i)
        if (leq(m.row_degrees[i], gamma)) {
            active[i] = 1;
            pm.active_rows.push_back(i);
        }
    vec<int> acols;
    for (int j = 0; j < m.cols(); ++j)
        if (leq(m.col_degrees[j], gamma)) acols.push_back(j);
    // rows of t = active columns as vectors over all rows, reduced to RREF
    DenseMatrix t((int)acols.size(), R, m.field);
    for (int a = 0; a < (int)acols.size(); ++a)
        for (auto [r, v] : m.columns[acols[a]]) t.at(a, r) = v;
    vec<int> piv = rref_inplace(t);
    vec<char> is_pivot(R, 0);
    for (int r = 0; r < (int)piv.size(); ++r) {
        is_pivot[piv[r]] = 1;
        vec<elem> w(R);
        for (int i = 0; i < R; ++i) w[i] = t.at(r, i);
        pm.image.push_back({piv[r], std::move(w)});
    }
    for (int i : pm.active_rows)
        if (!is_pivot[i]) pm.basis_rows.push_back(i);
    pm.dim = (int)pm.basis_rows.size();
    return pm;
}

DenseMatrix structure_map(const GradedMatrix& m, const PointwiseModel& from, const PointwiseModel& to) {
    if (!leq(from.degree, to.degree)) throw std::invalid_argument("structure_map needs gamma <= delta");
    DenseMatrix out(to.dim, from.dim, m.field);
    for (int c = 0; c < from.dim; ++c) {
        vec<elem> v(m.rows(), 0);
        v[from.basis_rows[c]] = 1;
        vec<elem> x = to.coords(v);
        for (int r = 0; r < to.dim; ++r) out.at(r, c) = x[r];
    }
    return out;
}

DenseMatrix structure_map(const GradedMatrix& m, const Degree& gamma, const Degree& delta) {
    return structure_map(m, pointwise_model(m, gamma), pointwise_model(m, delta));
}

// ---------------------------------------------------------------- decomposition and grids

vec<Block> connected_components(const GradedMatrix& m) {
    const int R = m.rows();
    vec<int> parent(R);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (auto& col : m.columns)
        for (std::size_t t = 1; t < col.size(); ++t) {
            int a = find(col[0].first), b = find(col[t].first);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::map<int, Block> blocks;
    for (int i = 0; i < R; ++i) blocks[find(i)].rows.push_back(i);
    vec<Block> zero_blocks;
    for (int j = 0; j < m.cols(); ++j) {
        if (m.columns[j].empty())
            zero_blocks.push_back({{}, {j}});
        else
            blocks[find(m.columns[j][0].first)].cols.push_back(j);
    }
    vec<Block> out;
    for (auto& [root, b] : blocks) out.push_back(std::move(b));
    for (auto& b : zero_blocks) out.push_back(std::move(b));
    return out;
}

GradedMatrix block_matrix(const GradedMatrix& m, const Block& b) {
    GradedMatrix out(m.field);
    vec<int> index(m.rows(), -1);
    for (int i : b.rows) {
        index[i] = out.rows();
        out.add_row(m.row_degrees[i]);
    }
    for (int j : b.cols) {
        SparseColumn c;
        for (auto [r, v] : m.columns[j]) {
            if (index[r] < 0) throw std::invalid_argument("block is not closed under column supports");
            c.push_back({index[r], v});
        }
        out.col_degrees.push_back(m.col_degrees[j]);
        out.columns.push_back(std::move(c));
    }
    return out;
}

Grid induced_grid(const GradedMatrix& m) {
    vec<Rational> xs, ys;
    for (auto& d : m.row_degrees) { xs.push_back(d.x); ys.push_back(d.y); }
    for (auto& d : m.col_degrees) { xs.push_back(d.x); ys.push_back(d.y); }
    return Grid(xs, ys);
}

GradedMatrix direct_sum(const GradedMatrix& a, const GradedMatrix& b) {
    if (a.field != b.field) throw std::invalid_argument("direct_sum: field mismatch");
    GradedMatrix out = a;
    const int off = a.rows();
    for (auto& d : b.row_degrees) out.add_row(d);
    for (int j = 0; j < b.cols(); ++j) {
        SparseColumn c;
        for (auto [r, v] : b.columns[j]) c.push_back({r + off, v});
        out.col_degrees.push_back(b.col_degrees[j]);
        out.columns.push_back(std::move(c));
    }
    return out;
}

} // namespace skyinv
