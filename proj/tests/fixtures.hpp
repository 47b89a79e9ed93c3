#pragma once

#include <random>

#include "skyinv/cheng.hpp"
#include "skyinv/hn_core.hpp"

namespace fixtures {

using namespace skyinv;

inline Degree D(Rational x, Rational y) { return {x, y}; }
inline Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

/// vertical staircase [0,1)×[0,3) ⊕ horizontal staircase [0,3)×[1,2) over F_2
inline GradedMatrix cross() {
    GradedMatrix m(PrimeField(2));
    m.add_row(D(0, 0));
    m.add_row(D(0, 1));
    m.add_column(D(1, 0), {{0, 1}});
    m.add_column(D(0, 3), {{0, 1}});
    m.add_column(D(3, 1), {{1, 1}});
    m.add_column(D(0, 2), {{1, 1}});
    return m;
}

inline GradedMatrix cross_vertical() {
    GradedMatrix m(PrimeField(2));
    m.add_row(D(0, 0));
    m.add_column(D(1, 0), {{0, 1}});
    m.add_column(D(0, 3), {{0, 1}});
    return m;
}

inline GradedMatrix cross_horizontal() {
    GradedMatrix m(PrimeField(2));
    m.add_row(D(0, 1));
    m.add_column(D(3, 1), {{0, 1}});
    m.add_column(D(0, 2), {{0, 1}});
    return m;
}

/// two generators at the origin, every line of area 5, total area 9
inline GradedMatrix stable() {
    GradedMatrix m(PrimeField(2));
    m.add_row(D(0, 0));
    m.add_row(D(0, 0));
    m.add_column(D(2, 0), {{1, 1}});
    m.add_column(D(0, 2), {{0, 1}});
    m.add_column(D(3, 0), {{0, 1}});
    m.add_column(D(0, 3), {{1, 1}});
    m.add_column(D(1, 1), {{0, 1}, {1, 1}});
    return m;
}

inline GradedMatrix staircase_module(const Degree& gen, const vec<Degree>& rels, PrimeField f = PrimeField(2)) {
    GradedMatrix m(f);
    m.add_row(gen);
    for (auto& r : rels) m.add_column(r, {{0, 1}});
    return m;
}

inline Rational random_coord(std::mt19937_64& rng, int max, int den) {
    return Rational((std::int64_t)(rng() % (std::uint64_t)(max * den + 1)), den);
}

/**
 * t generators at the origin, random relations in [0,max]² on the 1/den lattice,
 * plus caps at (max,0) and (0,max); minimized.
 */
inline GradedMatrix random_uniquely_generated(std::mt19937_64& rng, PrimeField f, int t, int max, int den,
                                              int extra_rels) {
    GradedMatrix m(f);
    for (int i = 0; i < t; ++i) m.add_row(D(0, 0));
    for (int r = 0; r < extra_rels; ++r) {
        Degree d;
        do {
            d = {random_coord(rng, max, den), random_coord(rng, max, den)};
        } while (d == D(0, 0));
        vec<elem> v(t);
        bool nz = false;
        while (!nz) {
            for (auto& x : v) { x = f.random(rng); nz |= x != 0; }
        }
        m.add_column_dense(d, v);
    }
    for (int i = 0; i < t; ++i) {
        m.add_column(D(max, 0), {{i, 1}});
        m.add_column(D(0, max), {{i, 1}});
    }
    return minimize(m);
}

/// random presentation with generators anywhere in the box, bounded by caps at the box's upper sides
inline GradedMatrix random_presentation(std::mt19937_64& rng, PrimeField f, int gens, int max, int den, int extra_rels) {
    GradedMatrix m(f);
    for (int i = 0; i < gens; ++i) m.add_row(D(random_coord(rng, max - 1, den), random_coord(rng, max - 1, den)));
    for (int r = 0; r < extra_rels; ++r) {
        // a relation among two or three generators at a degree above all of them
        int k = 1 + (int)(rng() % 3);
        SparseColumn c;
        Degree d = D(0, 0);
        for (int s = 0; s < k; ++s) {
            int i = (int)(rng() % gens);
            elem v = 1 + (elem)(rng() % (f.q() - 1));
            c.push_back({i, v});
            d = join(d, m.row_degrees[i]);
        }
        d = join(d, D(random_coord(rng, max, den), random_coord(rng, max, den)));
        m.add_column(d, c);
    }
    for (int i = 0; i < gens; ++i) {
        m.add_column(D(max, m.row_degrees[i].y), {{i, 1}});
        m.add_column(D(m.row_degrees[i].x, max), {{i, 1}});
    }
    return minimize(m);
}

/// ∫ dim <U> from pointwise ranks on the induced grid, without resolutions
inline Rational oracle_submodule_integral(const GradedMatrix& m, const DenseMatrix& basis) {
    Grid g = induced_grid(m);
    const Degree alpha = m.row_degrees.at(0);
    Rational total;
    for (std::size_t i = 0; i + 1 < g.xs.size(); ++i)
        for (std::size_t j = 0; j + 1 < g.ys.size(); ++j) {
            Degree b{g.xs[i], g.ys[j]};
            if (!leq(alpha, b)) continue;
            PointwiseModel pm = pointwise_model(m, b);
            DenseMatrix img(pm.dim, basis.cols(), m.field);
            for (int c = 0; c < basis.cols(); ++c) {
                auto x = pm.coords(basis.column(c));
                for (int r = 0; r < pm.dim; ++r) img.at(r, c) = x[r];
            }
            total += Rational(rank(img)) * (g.xs[i + 1] - g.xs[i]) * (g.ys[j + 1] - g.ys[j]);
        }
    return total;
}

/// maximal slope over all subspaces, by exhaustive pointwise-rank integration
inline Rational oracle_max_slope(const GradedMatrix& m) {
    Rational best;
    const int t = m.rows();
    for (int k = 1; k <= t; ++k) {
        SubspaceIter it(t, k, m.field);
        DenseMatrix b;
        while (it.next(b)) {
            Rational s = Rational(k) / oracle_submodule_integral(m, b);
            if (best < s) best = s;
        }
    }
    return best;
}

// ---------------------------------------------------------------- matrix spaces

inline bool same_span(const DenseMatrix& a, const DenseMatrix& b) { return span_contains(a, b) && span_contains(b, a); }

inline MatrixSpace random_space(std::mt19937_64& rng, PrimeField f, int n, int np, int k) {
    MatrixSpace sp;
    sp.n = n;
    sp.n_prime = np;
    sp.field = f;
    DenseMatrix acc(n * np, 0, f);
    for (int i = 0; i < k; ++i) {
        DenseMatrix a = DenseMatrix::random(n, np, f, rng);
        // sparsify so that shrunk subspaces are not always trivial
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < np; ++c)
                if (rng() % 3) a.at(r, c) = 0;
        DenseMatrix v(n * np, 1, f);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < np; ++c) v.at(r * np + c, 0) = a.at(r, c);
        if (rank(acc.hstack(v)) == acc.cols()) continue;
        acc = acc.hstack(v);
        sp.basis.push_back(a);
    }
    return sp;
}

inline std::optional<DenseMatrix> shrunk_with_retries(const BlowUp& b, std::uint64_t seed) {
    for (int scale = 1, k = 0; k < 8; ++k, scale = std::min(scale * 2, 8))
        if (auto u = shrunk_subspace_random(b, scale, seed + k)) return u;
    return std::nullopt;
}

inline Grid integer_grid(int n) {
    vec<Rational> c;
    for (int i = 0; i < n; ++i) c.push_back(i);
    return Grid(c, c);
}


} // namespace fixtures
