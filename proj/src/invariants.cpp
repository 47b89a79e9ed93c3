#include "skyinv/invariants.hpp"

#include <algorithm>
#include <stdexcept>

namespace skyinv {

// ---------------------------------------------------------------- Betti numbers and integrals

BettiTable betti_numbers(const GradedMatrix& m) {
    GradedMatrix mm = minimize(m);
    BettiTable bt;
    bt.b0 = mm.row_degrees;
    bt.b1 = mm.col_degrees;
    bt.b2 = kernel(mm).col_degrees;
    return bt;
}

Degree betti_bound(const BettiTable& bt) {
    Degree b;
    bool first = true;
    for (auto* l : {&bt.b0, &bt.b1, &bt.b2})
        for (auto& d : *l) {
            b = first ? d : join(b, d);
            first = false;
        }
    return b;
}

Rational integral_dim(const BettiTable& bt, const Degree& bound) {
    Rational total;
    int sign = 1;
    for (auto* l : {&bt.b0, &bt.b1, &bt.b2}) {
        for (auto& d : *l) {
            if (!leq(d, bound)) throw std::invalid_argument("integral bound " + bound.str() + " below Betti degree " + d.str());
            Rational term = (bound.x - d.x) * (bound.y - d.y);
            total += sign > 0 ? term : -term;
        }
        sign = -sign;
    }
    return total;
}

Rational integral_dim(const GradedMatrix& m) {
    BettiTable bt = betti_numbers(m);
    if (bt.b0.empty()) return 0;
    return integral_dim(bt, betti_bound(bt));
}

Rational slope_at(const GradedMatrix& m, const Degree& alpha) {
    PointwiseModel pm = pointwise_model(m, alpha);
    if (pm.dim == 0) throw std::invalid_argument("slope_at: zero module at " + alpha.str());
    GradedMatrix s = generators_at(m, alpha, DenseMatrix::identity(pm.dim, m.field));
    GradedMatrix n = submodule_presentation(m, s);
    Rational area = integral_dim(n);
    return Rational(pm.dim) / area;
}

// ---------------------------------------------------------------- Hilbert functions

int HilbertFn::at(const Degree& d) const {
    ExtDegree f = grid_floor(d, grid);
    if (f.x.inf < 0 || f.y.inf < 0) return 0;
    auto ix = std::lower_bound(grid.xs.begin(), grid.xs.end(), f.x.v) - grid.xs.begin();
    auto iy = std::lower_bound(grid.ys.begin(), grid.ys.end(), f.y.v) - grid.ys.begin();
    return values[ix][iy];
}

int HilbertFn::max() const {
    int m = 0;
    for (auto& c : values)
        for (int v : c) m = std::max(m, v);
    return m;
}

HilbertFn hilbert_function(const GradedMatrix& m, const Grid& g) {
    HilbertFn h;
    h.grid = g;
    h.values.assign(g.xs.size(), vec<int>(g.ys.size(), 0));
    for (std::size_t i = 0; i < g.xs.size(); ++i)
        for (std::size_t j = 0; j < g.ys.size(); ++j) h.values[i][j] = pointwise_model(m, {g.xs[i], g.ys[j]}).dim;
    return h;
}

Rational hilbert_integral(const HilbertFn& h) {
    Rational total;
    const std::size_t nx = h.grid.xs.size(), ny = h.grid.ys.size();
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            int v = h.values[i][j];
            if (!v) continue;
            if (i + 1 == nx || j + 1 == ny) throw std::invalid_argument("hilbert_integral: unbounded support");
            total += Rational(v) * (h.grid.xs[i + 1] - h.grid.xs[i]) * (h.grid.ys[j + 1] - h.grid.ys[j]);
        }
    return total;
}

// ---------------------------------------------------------------- staircases

bool Staircase::contains(const Degree& b) const {
    if (!leq(gen, b)) return false;
    // last relation with x ≤ b.x has the smallest y among those
    auto it = std::upper_bound(rels.begin(), rels.end(), b.x, [](const Rational& v, const Degree& r) { return v < r.x; });
    if (it == rels.begin()) return true;
    return std::prev(it)->y > b.y;
}

bool staircase_contains(const Staircase& s, const Degree& b) { return s.contains(b); }

vec<Degree> minimal_antichain(vec<Degree> rels) {
    std::sort(rels.begin(), rels.end());
    vec<Degree> out;
    for (auto& r : rels) {
        if (!out.empty() && leq(out.back(), r)) continue;
        // sorted by x then y: r is dominated only by an earlier element with y ≤ r.y,
        // and the running minimum of y sits at the back
        out.push_back(r);
    }
    return out;
}

Staircase restrict_staircase(const Staircase& s, const Degree& b) {
    Staircase out;
    out.gen = join(s.gen, b);
    vec<Degree> r;
    for (auto& d : s.rels) r.push_back(join(d, out.gen));
    out.rels = minimal_antichain(std::move(r));
    return out;
}

vec<Staircase> superlevel_staircases(const HilbertFn& h, const Degree& alpha) {
    const auto& xs = h.grid.xs;
    const auto& ys = h.grid.ys;
    auto ix0 = std::lower_bound(xs.begin(), xs.end(), alpha.x) - xs.begin();
    auto iy0 = std::lower_bound(ys.begin(), ys.end(), alpha.y) - ys.begin();
    if (ix0 == (long)xs.size() || iy0 == (long)ys.size() || xs[ix0] != alpha.x || ys[iy0] != alpha.y)
        throw std::invalid_argument("superlevel_staircases: alpha is not a grid point");
    const int top = h.values[ix0][iy0];
    vec<Staircase> out;
    for (int j = 1; j <= top; ++j) {
        Staircase s;
        s.gen = alpha;
        long prev = -1;
        for (std::size_t ix = ix0; ix < xs.size(); ++ix) {
            long found = -1;
            for (std::size_t iy = iy0; iy < ys.size(); ++iy)
                if (h.values[ix][iy] < j) { found = (long)iy; break; }
            if (found < 0) continue;
            if (prev < 0 || found < prev) {
                s.rels.push_back({xs[ix], ys[found]});
                prev = found;
            }
            if (found == iy0) break;
        }
        out.push_back(std::move(s));
    }
    return out;
}

vec<Staircase> superlevel_staircases(const GradedMatrix& m) {
    if (m.rows() == 0) return {};
    Degree alpha = m.row_degrees[0];
    for (auto& d : m.row_degrees)
        if (d != alpha) throw std::invalid_argument("superlevel_staircases: module is not uniquely generated");
    return superlevel_staircases(hilbert_function(m, induced_grid(m)), alpha);
}

HilbertFn staircase_sum(const vec<Staircase>& ss) {
    vec<Rational> xs, ys;
    for (auto& s : ss) {
        xs.push_back(s.gen.x);
        ys.push_back(s.gen.y);
        for (auto& r : s.rels) { xs.push_back(r.x); ys.push_back(r.y); }
    }
    HilbertFn h;
    h.grid = Grid(xs, ys);
    h.values.assign(h.grid.xs.size(), vec<int>(h.grid.ys.size(), 0));
    for (std::size_t i = 0; i < h.grid.xs.size(); ++i)
        for (std::size_t j = 0; j < h.grid.ys.size(); ++j)
            for (auto& s : ss) h.values[i][j] += s.contains({h.grid.xs[i], h.grid.ys[j]});
    return h;
}

// ---------------------------------------------------------------- HN factor lists

int HNFactorList::dim() const {
    int d = 0;
    for (auto& f : factors)
        for (auto& s : f.staircases) d += s.contains(alpha);
    return d;
}

HNFactorList canonical(const HNFactorList& l) {
    vec<HNFactor> sorted = l.factors;
    std::stable_sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.slope > b.slope; });
    HNFactorList out;
    out.alpha = l.alpha;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t end = i;
        vec<Staircase> all;
        while (end < sorted.size() && sorted[end].slope == sorted[i].slope) {
            for (auto& s : sorted[end].staircases) all.push_back(s);
            ++end;
        }
        Staircase anchor;
        anchor.gen = l.alpha;
        all.push_back(anchor);
        HilbertFn h = staircase_sum(all);
        // remove the contribution of the anchor
        for (std::size_t a = 0; a < h.grid.xs.size(); ++a)
            for (std::size_t b = 0; b < h.grid.ys.size(); ++b)
                if (leq(l.alpha, {h.grid.xs[a], h.grid.ys[b]})) --h.values[a][b];
        HNFactor f;
        f.slope = sorted[i].slope;
        f.staircases = superlevel_staircases(h, l.alpha);
        if (!f.staircases.empty()) out.factors.push_back(std::move(f));
        i = end;
    }
    return out;
}

bool equivalent(const HNFactorList& a, const HNFactorList& b) {
    if (a.alpha != b.alpha) return false;
    HNFactorList ca = canonical(a), cb = canonical(b);
    if (ca.factors.size() != cb.factors.size()) return false;
    for (std::size_t i = 0; i < ca.factors.size(); ++i)
        if (ca.factors[i].slope != cb.factors[i].slope || !(ca.factors[i].staircases == cb.factors[i].staircases))
            return false;
    return true;
}

int count_at(const HNFactorList& l, const Rational& theta, const Degree& b) {
    int c = 0;
    for (auto& f : l.factors) {
        if (f.slope < theta) continue;
        for (auto& s : f.staircases) c += s.contains(b);
    }
    return c;
}

// ---------------------------------------------------------------- store

Rational floor_to(const Rational& v, const Rational& eps) { return eps * Rational((v / eps).floor()); }

void SkyscraperStore::insert(HNFactorList l) {
    Degree key = l.alpha;
    entries[key] = std::move(l);
}

const HNFactorList* SkyscraperStore::locate(const Degree& a) const {
    Degree key = epsilon ? Degree{floor_to(a.x, *epsilon), floor_to(a.y, *epsilon)} : a;
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
}

int SkyscraperStore::query(const Rational& theta, const Degree& a, const Degree& b) const {
    if (!leq(a, b)) throw std::invalid_argument("skyscraper query needs a <= b");
    const HNFactorList* l = locate(a);
    return l ? count_at(*l, theta, b) : 0;
}

int skyscraper_query(const SkyscraperStore& store, const Rational& theta, const Degree& a, const Degree& b) {
    return store.query(theta, a, b);
}

bool stores_equivalent(const SkyscraperStore& a, const SkyscraperStore& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (auto& [k, l] : a.entries) {
        auto it = b.entries.find(k);
        if (it == b.entries.end() || !equivalent(l, it->second)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- erosion distance

ErosionBracket erosion_distance(const SkyscraperQuery& r, const SkyscraperQuery& s, const Rational& theta,
                                const vec<Degree>& probes, const Rational& spacing) {
    struct Pair {
        Degree a, b;
        int rv, sv;
    };
    vec<Pair> pairs;
    for (auto& a : probes)
        for (auto& b : probes)
            if (leq(a, b)) pairs.push_back({a, b, r.query(theta, a, b), s.query(theta, a, b)});
    auto passes = [&](long j) {
        Rational e = spacing * Rational(j);
        Degree shift{e, e};
        for (auto& p : pairs) {
            Degree lo = p.a - shift, hi = p.b + shift;
            if (s.query(theta, lo, hi) > p.rv) return false;
            if (r.query(theta, lo, hi) > p.sv) return false;
        }
        return true;
    };
    if (passes(0)) return {0, 0};
    long lo = 0, hi = 1;
    while (!passes(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > (1L << 30)) throw std::runtime_error("erosion_distance: no passing shift found");
    }
    while (hi - lo > 1) {
        long mid = (lo + hi) / 2;
        if (passes(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {spacing * Rational(lo), spacing * Rational(hi)};
}

} // namespace skyinv
