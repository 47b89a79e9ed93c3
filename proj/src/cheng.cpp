#include "skyinv/cheng.hpp"

#include <algorithm>
#include <cmath>

#include "skyinv/hn_core.hpp"

namespace skyinv {

namespace {

/// rows spanning the functionals that vanish on the columns of s
DenseMatrix annihilator(const DenseMatrix& s, int n, const PrimeField& f) {
    if (s.cols() == 0) return DenseMatrix::identity(n, f);
    return reduce(s.transpose()).kernel_basis.transpose();
}

/// span of the b block components (each of length np) of the columns of x
DenseMatrix block_components(const DenseMatrix& x, int b, int np, const PrimeField& f) {
    DenseMatrix parts(np, x.cols() * b, f);
    for (int c = 0; c < x.cols(); ++c)
        for (int j = 0; j < b; ++j)
            for (int r = 0; r < np; ++r) parts.at(r, c * b + j) = x.at(j * np + r, c);
    return span_basis(parts);
}

DenseMatrix rows_range(const DenseMatrix& m, int r0, int r1) {
    DenseMatrix out(r1 - r0, m.cols(), m.field());
    for (int r = r0; r < r1; ++r)
        for (int c = 0; c < m.cols(); ++c) out.at(r - r0, c) = m.at(r, c);
    return out;
}

/// nonzero rows of the reduced row echelon form (same kernel, full row rank)
DenseMatrix row_space(const DenseMatrix& m) {
    DenseMatrix e = m;
    int r = (int)rref_inplace(e).size();
    vec<int> rows(r);
    for (int i = 0; i < r; ++i) rows[i] = i;
    vec<int> cols(m.cols());
    for (int i = 0; i < m.cols(); ++i) cols[i] = i;
    return e.submatrix(rows, cols);
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

} // namespace

// ---------------------------------------------------------------- matrix spaces

DenseMatrix MatrixSpace::image(const DenseMatrix& u) const {
    DenseMatrix all(n, 0, field);
    for (auto& a : basis) all = all.hstack(a * u);
    return span_basis(all);
}

int MatrixSpace::image_dim(const DenseMatrix& u) const { return image(u).cols(); }

bool MatrixSpace::independent() const {
    DenseMatrix v(n * n_prime, (int)basis.size(), field);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n_prime; ++c) v.at(r * n_prime + c, (int)i) = basis[i].at(r, c);
    return rank(v) == (int)basis.size();
}

AlphaSpace build_A_alpha(const GradedMatrix& m, const Grid& g, const Degree& alpha,
                         const std::function<int(const Degree&)>& weight) {
    if (!g.contains(alpha)) throw std::invalid_argument("build_A_alpha: alpha is not a grid point");
    PointwiseModel from = pointwise_model(m, alpha);
    if (from.dim == 0) throw std::invalid_argument("build_A_alpha: V_alpha is zero");
    AlphaSpace out;
    out.p0 = from.dim;
    vec<std::pair<Degree, DenseMatrix>> blocks;
    for (auto& x : g.xs)
        for (auto& y : g.ys) {
            Degree b{x, y};
            if (!leq(alpha, b) || b == alpha) continue;
            DenseMatrix r = row_space(structure_map(m, from, pointwise_model(m, b)));
            if (r.rows() == 0) continue;
            int w = weight ? weight(b) : 1;
            for (int i = 0; i < w; ++i) blocks.push_back({b, r});
        }
    int n = 0;
    for (auto& [d, r] : blocks) n += r.rows();
    out.q0 = n;
    out.space.n = n;
    out.space.n_prime = out.p0;
    out.space.field = m.field;
    int off = 0;
    for (auto& [d, r] : blocks) {
        DenseMatrix a(n, out.p0, m.field);
        for (int i = 0; i < r.rows(); ++i)
            for (int c = 0; c < out.p0; ++c) a.at(off + i, c) = r.at(i, c);
        off += r.rows();
        out.space.basis.push_back(std::move(a));
        out.degrees.push_back(d);
    }
    return out;
}

// ---------------------------------------------------------------- Wong sequences

DenseMatrix blowup_image(const BlowUp& b, const DenseMatrix& x) {
    const MatrixSpace& sp = b.space;
    DenseMatrix s = sp.image(block_components(x, b.q, sp.n_prime, sp.field));
    return kron(DenseMatrix::identity(b.p, sp.field), s);
}

DenseMatrix blowup_image_naive(const BlowUp& b, const DenseMatrix& x) {
    const MatrixSpace& sp = b.space;
    DenseMatrix all(b.p * sp.n, 0, sp.field);
    for (int r = 0; r < b.p; ++r)
        for (int c = 0; c < b.q; ++c) {
            DenseMatrix e(b.p, b.q, sp.field);
            e.at(r, c) = 1;
            for (auto& a : sp.basis) all = all.hstack(kron(e, a) * x);
        }
    return span_basis(all);
}

WongResult wong_limit(const DenseMatrix& a, const BlowUp& b) {
    const MatrixSpace& sp = b.space;
    const PrimeField& f = sp.field;
    const int n = sp.n, np = sp.n_prime;
    if (a.rows() != b.p * n || a.cols() != b.q * np) throw std::invalid_argument("wong_limit: shape mismatch");

    // reduce A once; preimages are then solved on its independent columns only
    Reduction red = reduce(a);
    const DenseMatrix& c = red.column_basis;
    WongResult out;
    DenseMatrix s(n, 0, f);
    while (true) {
        DenseMatrix q = annihilator(s, n, f);
        DenseMatrix stacked(b.p * q.rows(), c.cols(), f);
        for (int t = 0; t < b.p; ++t) {
            DenseMatrix part = q * rows_range(c, t * n, (t + 1) * n);
            for (int r = 0; r < part.rows(); ++r)
                for (int k = 0; k < part.cols(); ++k) stacked.at(t * q.rows() + r, k) = part.at(r, k);
        }
        DenseMatrix x = reduce(stacked).kernel_basis;
        DenseMatrix pre(a.cols(), x.cols(), f);
        for (int k = 0; k < x.cols(); ++k)
            for (int i = 0; i < (int)red.pivots.size(); ++i) pre.at(red.pivots[i], k) = x.at(i, k);
        pre = pre.hstack(red.kernel_basis);
        out.contained = x.cols() == b.p * s.cols();
        out.state.preimage = pre;

        DenseMatrix next = sp.image(block_components(pre, b.q, np, f));
        ++out.state.steps;
        out.state.dims.push_back(next.cols());
        if (next.cols() == s.cols()) break;
        s = next;
    }
    out.state.s = s;
    return out;
}

// ---------------------------------------------------------------- shrunk subspaces

std::optional<DenseMatrix> shrunk_subspace_random(const BlowUp& b, int scale, std::uint64_t seed, int g_extra) {
    const MatrixSpace& sp = b.space;
    const PrimeField& f = sp.field;
    if (sp.basis.empty() || sp.n == 0) return DenseMatrix::identity(sp.n_prime, f);
    double lg = std::log((double)scale) / std::log((double)f.q());
    int g = std::max(1, (int)std::ceil(lg * lg - 1e-9)) + std::max(0, g_extra);
    FieldExt ext = ext_field_build(f.q(), g);
    std::mt19937_64 rng(seed);
    const int rp = scale * b.p, rq = scale * b.q;
    BlowUp big{sp, g * rp, g * rq};
    DenseMatrix a(big.p * sp.n, big.q * sp.n_prime, f);
    for (auto& ai : sp.basis) {
        DenseMatrix phi(big.p, big.q, f);
        for (int r = 0; r < rp; ++r)
            for (int c = 0; c < rq; ++c) {
                DenseMatrix e = embed_phi(ext, ext.random(rng));
                for (int i = 0; i < g; ++i)
                    for (int j = 0; j < g; ++j) phi.at(r * g + i, c * g + j) = e.at(i, j);
            }
        a = a + kron(phi, ai);
    }
    WongResult w = wong_limit(a, big);
    if (!w.contained) return std::nullopt;
    const DenseMatrix& pre = w.state.preimage;
    DenseMatrix u = span_basis(rows_range(pre, 0, sp.n_prime));
    // the preimage must be k^{bq} ⊗ U*
    if (pre.cols() != big.q * u.cols()) return std::nullopt;
    return u;
}

DenseMatrix shrunk_subspace_brute(const BlowUp& b) {
    const MatrixSpace& sp = b.space;
    DenseMatrix best = DenseMatrix(sp.n_prime, 0, sp.field);
    long best_val = 0;
    for (int k = 1; k <= sp.n_prime; ++k) {
        SubspaceIter it(sp.n_prime, k, sp.field);
        DenseMatrix u;
        while (it.next(u)) {
            long v = (long)b.q * k - (long)b.p * sp.image_dim(u);
            // strictly better only: the minimal maximizer has the smallest dimension
            if (v > best_val) {
                best_val = v;
                best = u;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------- HN driver

ChengFailure::ChengFailure(const Degree& a, int n)
    : std::runtime_error("cheng: no certified shrunk subspace at " + a.str() + " after " + std::to_string(n) +
                         " attempts"),
      alpha(a), attempts(n) {}

vec<std::pair<int, int>> farey_probes(int p, int q, int budget, int max_pq) {
    vec<std::pair<int, int>> out;
    int g = std::gcd(p, q);
    if (g == 0) return out;
    p /= g;
    q /= g;
    int lp = 0, lq = 1, rp = 1, rq = 0;
    while ((int)out.size() < budget) {
        int mp = lp + rp, mq = lq + rq;
        if (mp == p && mq == q) break;
        if ((long)mp * mq > max_pq) break;
        out.push_back({mp, mq});
        if ((long)mp * q < (long)p * mq) {
            lp = mp;
            lq = mq;
        } else {
            rp = mp;
            rq = mq;
        }
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, const Degree& alpha, std::uint64_t attempt) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : alpha.str()) h = (h ^ (unsigned char)c) * 1099511628211ULL;
    return splitmix(splitmix(seed ^ h) + attempt);
}

namespace {

struct ChengRun {
    const ChengConfig& cfg;
    ChengStats& stats;
    PrimeField f;
    Degree alpha;
    int p0 = 0;
    // structure maps from α to the weighted grid points above it
    vec<DenseMatrix> maps;
    vec<int> weights;
    std::uint64_t calls = 0;

    /// 𝒜 for the subquotient <H>/<L>, coordinates given by a complement c of L in H
    MatrixSpace space_for(const DenseMatrix& l, const DenseMatrix& c) const {
        vec<DenseMatrix> blocks;
        vec<int> w;
        for (std::size_t i = 0; i < maps.size(); ++i) {
            DenseMatrix img = span_basis(maps[i] * l);
            DenseMatrix proj = annihilator(img, maps[i].rows(), f);
            DenseMatrix r = row_space(proj * maps[i] * c);
            if (r.rows() == 0) continue;
            blocks.push_back(r);
            w.push_back(weights[i]);
        }
        MatrixSpace sp;
        sp.field = f;
        sp.n_prime = c.cols();
        for (std::size_t i = 0; i < blocks.size(); ++i) sp.n += w[i] * blocks[i].rows();
        int off = 0;
        for (std::size_t i = 0; i < blocks.size(); ++i)
            for (int k = 0; k < w[i]; ++k) {
                DenseMatrix a(sp.n, sp.n_prime, f);
                for (int r = 0; r < blocks[i].rows(); ++r)
                    for (int col = 0; col < sp.n_prime; ++col) a.at(off + r, col) = blocks[i].at(r, col);
                off += blocks[i].rows();
                sp.basis.push_back(std::move(a));
            }
        return sp;
    }

    std::optional<DenseMatrix> attempt(const BlowUp& b, int scale) {
        ++stats.shrunk_calls;
        std::uint64_t seed = mix_seed(cfg.seed ^ splitmix(calls++), alpha, (std::uint64_t)scale);
        int g = std::max(1, (int)std::ceil(std::pow(std::log((double)scale) / std::log((double)f.q()), 2) - 1e-9)) +
                cfg.g_extra;
        stats.max_blowup = std::max(stats.max_blowup, g * scale * std::max(b.p, b.q));
        auto u = shrunk_subspace_random(b, scale, seed, cfg.g_extra);
        if (!u) ++stats.failures;
        return u;
    }

    DenseMatrix with_retries(const BlowUp& b) {
        int pmax = std::max(1, b.p * b.q);
        int scale = 1;
        for (int k = 0; k < cfg.retries; ++k) {
            if (auto u = attempt(b, scale)) return *u;
            scale = std::min(scale * 2, pmax);
        }
        throw ChengFailure(alpha, cfg.retries);
    }

    /// appends the proper filtration steps strictly between l and h
    void split(const DenseMatrix& l, const DenseMatrix& h, vec<DenseMatrix>& chain) {
        // complement of L inside H
        DenseMatrix c(p0, 0, f), acc = l;
        for (int k = 0; k < h.cols(); ++k) {
            DenseMatrix col = h.select_columns({k});
            if (span_contains(acc, col)) continue;
            acc = acc.hstack(col);
            c = c.hstack(col);
        }
        const int n = c.cols();
        if (n <= 1) return;
        MatrixSpace sp = space_for(l, c);
        if (sp.n == 0) return;
        const int g = std::gcd(n, sp.n);
        const int p = n / g, q = sp.n / g;
        std::optional<DenseMatrix> u;
        if (cfg.farey) {
            for (auto [pp, qq] : farey_probes(p, q, cfg.farey_budget, cfg.farey_max_pq)) {
                auto r = attempt({sp, pp, qq}, 1);
                if (r && r->cols() > 0 && r->cols() < n) {
                    ++stats.farey_hits;
                    u = r;
                    break;
                }
            }
        }
        if (!u) u = with_retries({sp, p, q});
        if (u->cols() == 0 || u->cols() == n) return;  // semistable
        DenseMatrix mid = l.hstack(c * *u);
        split(l, mid, chain);
        chain.push_back(mid);
        split(mid, h, chain);
    }
};

} // namespace

HNFactorList hn_cheng(const GradedMatrix& m, const Grid& g, const Degree& alpha, const ChengConfig& cfg,
                      ChengStats* stats) {
    if (!g.contains(alpha)) throw std::invalid_argument("hn_cheng: alpha is not a grid point");
    ChengStats local;
    ChengRun run{cfg, stats ? *stats : local, m.field, alpha, 0, {}, {}, 0};
    HNFactorList out;
    out.alpha = alpha;
    PointwiseModel from = pointwise_model(m, alpha);
    run.p0 = from.dim;
    if (from.dim == 0) return out;

    // grid of the output: the grid plus the box corner, so last cells are closed off
    vec<Rational> xs = g.xs, ys = g.ys;
    if (cfg.box_upper) {
        if (cfg.box_upper->x > xs.back()) xs.push_back(cfg.box_upper->x);
        if (cfg.box_upper->y > ys.back()) ys.push_back(cfg.box_upper->y);
    }
    const std::size_t nx = g.xs.size(), ny = g.ys.size();
    auto area = [&](std::size_t i, std::size_t j) {
        Rational w = i + 1 < xs.size() ? xs[i + 1] - xs[i] : Rational(0);
        Rational h = j + 1 < ys.size() ? ys[j + 1] - ys[j] : Rational(0);
        return w * h;
    };

    struct Point {
        std::size_t i, j;
        DenseMatrix map;
    };
    vec<Point> pts;
    std::int64_t den = 1;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            Degree b{g.xs[i], g.ys[j]};
            if (!leq(alpha, b)) continue;
            DenseMatrix mp = structure_map(m, from, pointwise_model(m, b));
            if (rank(mp) == 0) continue;
            if (area(i, j).is_zero() && (i + 1 >= xs.size() || j + 1 >= ys.size()))
                throw std::invalid_argument("hn_cheng: support is not bounded by the grid");
            den = lcm64(den, area(i, j).den());
            pts.push_back({i, j, mp});
        }
    for (auto& pt : pts) {
        if (Degree{g.xs[pt.i], g.ys[pt.j]} == alpha) continue;
        Rational w = area(pt.i, pt.j) * Rational(den);
        if (w.is_zero()) continue;
        run.maps.push_back(pt.map);
        run.weights.push_back((int)w.num());
    }

    vec<DenseMatrix> chain;
    const DenseMatrix zero(from.dim, 0, m.field);
    const DenseMatrix whole = DenseMatrix::identity(from.dim, m.field);
    run.split(zero, whole, chain);
    chain.insert(chain.begin(), zero);
    chain.push_back(whole);

    Grid out_grid(xs, ys);
    for (std::size_t k = 1; k < chain.size(); ++k) {
        HilbertFn h{out_grid, vec<vec<int>>(xs.size(), vec<int>(ys.size(), 0))};
        Rational integral;
        for (auto& pt : pts) {
            int d = rank(pt.map * chain[k]) - rank(pt.map * chain[k - 1]);
            h.values[pt.i][pt.j] = d;
            integral += area(pt.i, pt.j) * Rational(d);
        }
        int dim = chain[k].cols() - chain[k - 1].cols();
        out.factors.push_back({superlevel_staircases(h, alpha), Rational(dim) / integral});
    }
    for (std::size_t k = 1; k < out.factors.size(); ++k)
        if (!(out.factors[k].slope < out.factors[k - 1].slope))
            throw std::logic_error("hn_cheng: factor slopes are not decreasing at " + alpha.str());
    return out;
}

} // namespace skyinv
