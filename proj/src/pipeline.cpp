#include "skyinv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <thread>

namespace skyinv {

namespace {

/// runs f(i) for i in [0, n) on up to `threads` workers; results are written by index
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    vec<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

Grid lattice_grid(const Box& box, const Rational& eps) {
    vec<Rational> xs, ys;
    for (Rational x = eps * Rational((box.x0 / eps).ceil()); x <= box.x1; x += eps) xs.push_back(x);
    for (Rational y = eps * Rational((box.y0 / eps).ceil()); y <= box.y1; y += eps) ys.push_back(y);
    return Grid(xs, ys);
}

HNFactorList hn_with_engine(const GradedMatrix& block, const Degree& alpha, const ScanConfig& cfg, const Box& box) {
    switch (cfg.engine) {
    case Engine::brute:
        return hn_filtration_at(block, alpha, cfg.brute);
    case Engine::cheng: {
        ChengConfig cc = cfg.cheng;
        cc.seed = cfg.seed;
        cc.box_upper = Degree{box.x1, box.y1};
        return hn_cheng(block, lattice_grid(box, cfg.epsilon), alpha, cc);
    }
    case Engine::exact:
        return exact_hnf_cell(block, alpha).factors_at(alpha);
    }
    return {};
}

} // namespace

Box auto_box(const GradedMatrix& m, const Rational& margin) {
    if (m.rows() == 0) return {};
    Box b{m.row_degrees[0].x, m.row_degrees[0].y, m.row_degrees[0].x, m.row_degrees[0].y};
    for (auto& d : m.row_degrees) {
        b.x0 = rmin(b.x0, d.x);
        b.y0 = rmin(b.y0, d.y);
        b.x1 = rmax(b.x1, d.x);
        b.y1 = rmax(b.y1, d.y);
    }
    for (auto& d : m.col_degrees) {
        b.x1 = rmax(b.x1, d.x);
        b.y1 = rmax(b.y1, d.y);
    }
    b.x1 += margin;
    b.y1 += margin;
    return b;
}

GradedMatrix clip_to_box(const GradedMatrix& m, const Box& box) {
    GradedMatrix out = m;
    for (int i = 0; i < m.rows(); ++i) {
        const Degree& d = m.row_degrees[i];
        out.add_column({rmax(box.x1, d.x), d.y}, {{i, 1}});
        out.add_column({d.x, rmax(box.y1, d.y)}, {{i, 1}});
    }
    return minimize(out);
}

vec<Degree> epsilon_points(const Box& box, const Rational& eps) {
    if (eps <= 0) throw std::invalid_argument("epsilon must be positive");
    vec<Degree> out;
    for (Rational y = eps * Rational((box.y0 / eps).ceil()); y < box.y1; y += eps)
        for (Rational x = eps * Rational((box.x0 / eps).ceil()); x < box.x1; x += eps) out.push_back({x, y});
    return out;
}

vec<GradedMatrix> summands(const GradedMatrix& clipped) {
    vec<GradedMatrix> out;
    for (auto& b : connected_components(clipped))
        if (!b.rows.empty()) out.push_back(block_matrix(clipped, b));
    return out;
}

// ---------------------------------------------------------------- approximation

SkyscraperStore approx_skyscraper(const GradedMatrix& m, const ScanConfig& cfg, PipelineStats* stats) {
    const Box box = cfg.box ? *cfg.box : auto_box(m, cfg.margin);
    SkyscraperStore store;
    store.epsilon = cfg.epsilon;
    const vec<GradedMatrix> parts = summands(clip_to_box(m, box));
    const vec<Degree> pts = epsilon_points(box, cfg.epsilon);
    vec<vec<HNFactorList>> lists(pts.size());
    vec<vec<char>> used(pts.size(), vec<char>(parts.size(), 0));
    parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
        for (std::size_t s = 0; s < parts.size(); ++s) {
            if (pointwise_model(parts[s], pts[i]).dim == 0) continue;
            used[i][s] = 1;
            lists[i].push_back(hn_with_engine(parts[s], pts[i], cfg, box));
        }
    });
    if (stats) stats->work.assign(parts.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (stats)
            for (std::size_t s = 0; s < parts.size(); ++s) stats->work[s] += used[i][s];
        if (lists[i].empty()) continue;
        store.insert(merge_factors(lists[i]));
    }
    return store;
}

// ---------------------------------------------------------------- exact

std::pair<int, int> cell_index(const Grid& g, const Degree& b) {
    int ix = (int)(std::upper_bound(g.xs.begin(), g.xs.end(), b.x) - g.xs.begin()) - 1;
    int iy = (int)(std::upper_bound(g.ys.begin(), g.ys.end(), b.y) - g.ys.begin()) - 1;
    return {ix, iy};
}

namespace {

bool has_cell(const Grid& g, std::pair<int, int> c) {
    // the last lines bound the support, their cells are zero
    return c.first >= 0 && c.second >= 0 && c.first + 1 < (int)g.xs.size() && c.second + 1 < (int)g.ys.size();
}

SubdivTree cell_tree(const GradedMatrix& part, const Grid& g, std::pair<int, int> c) {
    Degree lo{g.xs[c.first], g.ys[c.second]};
    Degree hi{g.xs[c.first + 1], g.ys[c.second + 1]};
    return exact_hnf_cell(part, lo, hi);
}

} // namespace

ExactSkyscraper exact_skyscraper(const GradedMatrix& m, std::optional<Box> box, const Rational& margin, int threads) {
    ExactSkyscraper ex;
    ex.box = box ? *box : auto_box(m, margin);
    for (auto& part : summands(clip_to_box(m, ex.box))) ex.parts.push_back({part, induced_grid(part), {}});
    for (auto& s : ex.parts) {
        vec<std::pair<int, int>> cells;
        for (int i = 0; i + 1 < (int)s.grid.xs.size(); ++i)
            for (int j = 0; j + 1 < (int)s.grid.ys.size(); ++j)
                if (pointwise_model(s.module, {s.grid.xs[i], s.grid.ys[j]}).dim > 0) cells.push_back({i, j});
        vec<SubdivTree> trees(cells.size());
        parallel_for(cells.size(), threads, [&](std::size_t k) { trees[k] = cell_tree(s.module, s.grid, cells[k]); });
        for (std::size_t k = 0; k < cells.size(); ++k) s.cells.emplace(cells[k], std::move(trees[k]));
    }
    return ex;
}

HNFactorList ExactSkyscraper::factors_at(const Degree& beta) const {
    {
        std::lock_guard<std::mutex> lock(*mutex_);
        auto it = cache_.find(beta);
        if (it != cache_.end()) return it->second;
    }
    vec<HNFactorList> lists;
    for (auto& s : parts) {
        auto c = cell_index(s.grid, beta);
        if (!has_cell(s.grid, c)) continue;
        auto it = s.cells.find(c);
        if (it == s.cells.end()) continue;
        HNFactorList l = it->second.factors_at(beta);
        if (!l.factors.empty()) lists.push_back(std::move(l));
    }
    HNFactorList out = lists.empty() ? HNFactorList{beta, {}} : merge_factors(lists);
    std::lock_guard<std::mutex> lock(*mutex_);
    cache_.emplace(beta, out);
    return out;
}

int ExactSkyscraper::query(const Rational& theta, const Degree& a, const Degree& b) const {
    if (!leq(a, b)) throw std::invalid_argument("skyscraper query needs a <= b");
    return count_at(factors_at(a), theta, b);
}

SkyscraperStore ExactSkyscraper::snapshot(const Rational& eps) const {
    SkyscraperStore store;
    store.epsilon = eps;
    for (auto& p : epsilon_points(box, eps)) {
        HNFactorList l = factors_at(p);
        if (!l.factors.empty()) store.insert(std::move(l));
    }
    return store;
}

std::size_t ExactSkyscraper::cell_count() const {
    std::size_t n = 0;
    for (auto& s : parts) n += s.cells.size();
    return n;
}

// ---------------------------------------------------------------- scan

SkyscraperStore parallel_grid_scan(const GradedMatrix& m, const ScanConfig& cfg, PipelineStats* stats) {
    const Box box = cfg.box ? *cfg.box : auto_box(m, cfg.margin);
    SkyscraperStore store;
    store.epsilon = cfg.epsilon;
    struct Pointer {
        GradedMatrix module;
        Grid grid;
        int row = -1;  // cell row of the pointer; moving it evicts the cache
        std::map<int, std::optional<SubdivTree>> cache;  // by cell column
        long work = 0;
    };
    vec<Pointer> ptr;
    for (auto& part : summands(clip_to_box(m, box))) ptr.push_back({part, induced_grid(part), -1, {}, 0});
    std::size_t max_cached = 0;

    for (const Degree& a : epsilon_points(box, cfg.epsilon)) {
        // advance all pointers, computing newly entered cells in parallel
        vec<std::size_t> fresh;
        vec<std::pair<int, int>> where(ptr.size());
        for (std::size_t s = 0; s < ptr.size(); ++s) {
            Pointer& p = ptr[s];
            where[s] = cell_index(p.grid, a);
            if (!has_cell(p.grid, where[s])) continue;
            if (where[s].second != p.row) {
                p.cache.clear();
                p.row = where[s].second;
            }
            if (!p.cache.count(where[s].first)) fresh.push_back(s);
        }
        vec<std::optional<SubdivTree>> made(fresh.size());
        parallel_for(fresh.size(), cfg.threads, [&](std::size_t k) {
            Pointer& p = ptr[fresh[k]];
            auto c = where[fresh[k]];
            if (pointwise_model(p.module, {p.grid.xs[c.first], p.grid.ys[c.second]}).dim > 0)
                made[k] = cell_tree(p.module, p.grid, c);
        });
        for (std::size_t k = 0; k < fresh.size(); ++k) {
            Pointer& p = ptr[fresh[k]];
            if (made[k]) ++p.work;
            p.cache[where[fresh[k]].first] = std::move(made[k]);
        }

        vec<HNFactorList> lists;
        for (std::size_t s = 0; s < ptr.size(); ++s) {
            Pointer& p = ptr[s];
            max_cached = std::max(max_cached, p.cache.size());
            if (!has_cell(p.grid, where[s])) continue;
            const auto& tree = p.cache[where[s].first];
            if (!tree) continue;
            HNFactorList l = tree->factors_at(a);
            if (!l.factors.empty()) lists.push_back(std::move(l));
        }
        if (!lists.empty()) store.insert(merge_factors(lists));
    }
    if (stats) {
        stats->work.clear();
        for (auto& p : ptr) stats->work.push_back(p.work);
        stats->max_cached = max_cached;
    }
    return store;
}

// ---------------------------------------------------------------- landscapes

Rational landscape_value(const SkyscraperQuery& q, const Degree& alpha, int k, const Rational& theta,
                         const Rational& h_max, const Rational& tol, Anchor anchor) {
    auto passes = [&](const Rational& h) {
        Degree lo = anchor == Anchor::center ? Degree{alpha.x - h, alpha.y - h} : alpha;
        return q.query(theta, lo, {alpha.x + h, alpha.y + h}) >= k;
    };
    if (!passes(0)) return 0;
    if (passes(h_max)) return h_max;
    Rational lo = 0, hi = h_max;
    while (hi - lo > tol) {
        Rational mid = (lo + hi) / Rational(2);
        (passes(mid) ? lo : hi) = mid;
    }
    return lo;
}

vec<LandscapeRow> filtered_landscape(const SkyscraperQuery& q, const Box& box, const vec<int>& ks,
                                     const vec<Rational>& thetas, int resolution, const Rational& tol,
                                     Anchor anchor) {
    if (resolution < 2) throw std::invalid_argument("landscape resolution must be at least 2");
    const Rational h_max = rmax(box.x1 - box.x0, box.y1 - box.y0);
    vec<LandscapeRow> out;
    for (int k : ks)
        for (auto& th : thetas)
            for (int j = 0; j < resolution; ++j)
                for (int i = 0; i < resolution; ++i) {
                    Rational x = box.x0 + (box.x1 - box.x0) * Rational(i, resolution - 1);
                    Rational y = box.y0 + (box.y1 - box.y0) * Rational(j, resolution - 1);
                    out.push_back({x, y, k, th, landscape_value(q, {x, y}, k, th, h_max, tol, anchor)});
                }
    return out;
}

vec<IntervalFlag> factor_interval_check(const SkyscraperStore& store) {
    vec<IntervalFlag> out;
    for (auto& [a, l] : store.entries)
        for (std::size_t i = 0; i < l.factors.size(); ++i)
            if (l.factors[i].staircases.size() > 1) out.push_back({a, (int)i, (int)l.factors[i].staircases.size()});
    return out;
}

} // namespace skyinv
