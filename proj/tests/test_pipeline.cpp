#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "skyinv/pipeline.hpp"

using namespace skyinv;
using namespace fixtures;

namespace {

GradedMatrix doubled(const GradedMatrix& m) { return direct_sum(m, m); }

vec<Degree> keys(const SkyscraperStore& s) {
    vec<Degree> out;
    for (auto& [a, l] : s.entries) out.push_back(a);
    return out;
}

} // namespace

TEST_CASE("clipping and boxes") {
    Box b = auto_box(cross());
    CHECK(b == Box{0, 0, 4, 4});
    GradedMatrix free_module(PrimeField(2));
    free_module.add_row(D(1, 2));
    GradedMatrix c = clip_to_box(free_module, {0, 0, 3, 3});
    CHECK(c.cols() == 2);
    CHECK(integral_dim(c) == 2);
    // clipping a bounded module inside the box changes nothing pointwise
    CHECK(integral_dim(clip_to_box(cross(), b)) == 6);
    CHECK(epsilon_points({0, 0, 1, 1}, R(1, 2)) == vec<Degree>{D(0, 0), D(R(1, 2), 0), D(0, R(1, 2)), D(R(1, 2), R(1, 2))});
}

TEST_CASE("approximation examples") {
    ScanConfig cfg;
    SkyscraperStore s = approx_skyscraper(cross(), cfg);
    CHECK(keys(s) == vec<Degree>{D(0, 0), D(0, 1), D(0, 2), D(1, 1), D(2, 1)});
    const HNFactorList& l = s.entries.at(D(0, 1));
    REQUIRE(l.factors.size() == 2);
    CHECK(l.factors[0].slope == R(1, 2));
    CHECK(l.factors[1].slope == R(1, 3));

    GradedMatrix zero(PrimeField(2));
    CHECK(approx_skyscraper(zero, cfg).entries.empty());

    SkyscraperStore d = approx_skyscraper(doubled(cross()), cfg);
    REQUIRE(keys(d) == keys(s));
    for (auto& [a, ls] : s.entries) {
        const HNFactorList& ld = d.entries.at(a);
        // every factor appears twice, with the same staircases
        REQUIRE(ld.factors.size() == 2 * ls.factors.size());
        for (std::size_t i = 0; i < ls.factors.size(); ++i)
            for (int j = 0; j < 2; ++j) {
                CHECK(ld.factors[2 * i + j].slope == ls.factors[i].slope);
                CHECK(ld.factors[2 * i + j].staircases.size() == ls.factors[i].staircases.size());
            }
    }

    ScanConfig cc = cfg;
    cc.engine = Engine::cheng;
    CHECK(stores_equivalent(approx_skyscraper(cross(), cc), s));
    cc.engine = Engine::exact;
    CHECK(stores_equivalent(approx_skyscraper(cross(), cc), s));
    cc.threads = 3;
    CHECK(stores_equivalent(approx_skyscraper(cross(), cc), s));
}

TEST_CASE("exact skyscraper queries") {
    ExactSkyscraper ex = exact_skyscraper(cross());
    CHECK(ex.parts.size() == 2);
    CHECK(ex.query(0, D(0, 1), D(0, 2)) == 1);
    CHECK(ex.query(1, D(0, R(19, 10)), D(R(1, 2), R(39, 20))) == 1);
    CHECK(ex.query(R(2, 5), D(0, 1), D(0, 2)) == 1);
    CHECK(ex.query(R(3, 5), D(0, 1), D(0, 2)) == 0);
    CHECK(ex.query(0, D(-1, -1), D(0, 0)) == 0);
    CHECK(ex.query(0, D(5, 5), D(6, 6)) == 0);
    CHECK_THROWS(ex.query(0, D(1, 1), D(0, 0)));
    CHECK(stores_equivalent(ex.snapshot(1), approx_skyscraper(cross(), ScanConfig{})));
}

TEST_CASE("exact queries at theta zero are ranks") {
    std::mt19937_64 rng(211);
    for (int s = 0; s < 12; ++s) {
        GradedMatrix m = random_presentation(rng, PrimeField(2 + s % 2), 1 + rng() % 3, 3, 2, rng() % 4);
        Box box = auto_box(m);
        GradedMatrix c = clip_to_box(m, box);
        ExactSkyscraper ex = exact_skyscraper(m, box);
        for (int k = 0; k < 50; ++k) {
            Degree a{random_coord(rng, 3, 4), random_coord(rng, 3, 4)};
            Degree b{a.x + random_coord(rng, 2, 4), a.y + random_coord(rng, 2, 4)};
            CHECK(ex.query(-1, a, b) == rank(structure_map(c, a, b)));
            CHECK(ex.query(1000, a, b) == 0);
        }
    }
}

TEST_CASE("grid scan equals approximation") {
    std::mt19937_64 rng(223);
    for (Rational eps : {R(1), R(1, 2)}) {
        PipelineStats sa, ss;
        ScanConfig cfg;
        cfg.epsilon = eps;
        SkyscraperStore a = approx_skyscraper(cross(), cfg, &sa);
        SkyscraperStore s = parallel_grid_scan(cross(), cfg, &ss);
        CHECK(stores_equivalent(a, s));
        REQUIRE(sa.work.size() == ss.work.size());
        for (std::size_t i = 0; i < sa.work.size(); ++i) CHECK(ss.work[i] <= sa.work[i]);
    }
    for (int k = 0; k < 15; ++k) {
        GradedMatrix m = random_presentation(rng, PrimeField(2), 1 + rng() % 3, 3, 2, rng() % 4);
        ScanConfig cfg;
        cfg.epsilon = R(1, 1 + (int)(rng() % 3));
        cfg.threads = 1 + k % 2;
        PipelineStats sa, ss;
        SkyscraperStore a = approx_skyscraper(m, cfg, &sa);
        SkyscraperStore s = parallel_grid_scan(m, cfg, &ss);
        CHECK(stores_equivalent(a, s));
        for (std::size_t i = 0; i < sa.work.size(); ++i) CHECK(ss.work[i] <= sa.work[i]);
    }
}

TEST_CASE("scan cache stays within one row") {
    GradedMatrix m = staircase_module(D(0, 0), {D(2, 0), D(1, 1), D(0, 3)});
    ScanConfig cfg;
    cfg.epsilon = R(1, 2);
    PipelineStats st;
    SkyscraperStore s = parallel_grid_scan(m, cfg, &st);
    for (auto& [a, l] : s.entries) CHECK(l.factors.size() == 1);
    Grid g = induced_grid(m);
    CHECK(st.max_cached <= g.xs.size());

    // two summands with interleaved grids: the floor pointers
    GradedMatrix two = direct_sum(staircase_module(D(0, 0), {D(R(3, 2), 0), D(0, 2)}),
                                  staircase_module(D(R(1, 2), R(1, 2)), {D(2, R(1, 2)), D(R(1, 2), R(5, 2))}));
    ExactSkyscraper ex = exact_skyscraper(two);
    REQUIRE(ex.parts.size() == 2);
    std::mt19937_64 rng(227);
    for (int k = 0; k < 10; ++k) {
        Degree p{random_coord(rng, 2, 4), random_coord(rng, 2, 4)};
        for (auto& part : ex.parts) {
            auto c = cell_index(part.grid, p);
            ExtDegree f = grid_floor(p, part.grid);
            CHECK((c.first < 0) == (f.x.inf < 0));
            CHECK((c.second < 0) == (f.y.inf < 0));
            if (c.first >= 0) CHECK(part.grid.xs[c.first] == f.x.v);
            if (c.second >= 0) CHECK(part.grid.ys[c.second] == f.y.v);
        }
    }
}

TEST_CASE("landscapes") {
    ExactSkyscraper ex = exact_skyscraper(cross());
    Rational h = landscape_value(ex, D(R(1, 4), R(5, 4)), 1, 0, 4, R(1, 64));
    CHECK(h > 0);
    CHECK(h <= R(1, 4));
    CHECK(landscape_value(ex, D(R(1, 4), R(5, 4)), 1, 5, 4, R(1, 64)) == 0);
    CHECK(landscape_value(ex, D(R(1, 4), R(5, 4)), 3, 0, 4, R(1, 64)) == 0);

    Box box{0, 0, 3, 3};
    vec<LandscapeRow> rows = filtered_landscape(ex, box, {1, 2}, {0, R(2, 5), 1}, 4, R(1, 32));
    CHECK(rows.size() == 2 * 3 * 16);
    // non-increasing in θ and in k
    auto at = [&](int k, int t, int i) { return rows[(k * 3 + t) * 16 + i].lambda; };
    for (int i = 0; i < 16; ++i) {
        for (int k = 0; k < 2; ++k)
            for (int t = 0; t + 1 < 3; ++t) CHECK(at(k, t + 1, i) <= at(k, t, i));
        for (int t = 0; t < 3; ++t) CHECK(at(1, t, i) <= at(0, t, i));
    }
    CHECK(filtered_landscape(ex, box, {1}, {0}, 2, R(1, 8)).size() == 4);
    CHECK(landscape_value(ex, D(0, 1), 1, 0, 4, R(1, 64), Anchor::source) > 0);
}

TEST_CASE("interval check") {
    CHECK(factor_interval_check(approx_skyscraper(cross(), ScanConfig{})).empty());
    SkyscraperStore st = approx_skyscraper(stable(), ScanConfig{});
    auto flags = factor_interval_check(st);
    REQUIRE(!flags.empty());
    CHECK(flags[0].alpha == D(0, 0));
    CHECK(flags[0].thickness == 2);
    CHECK(factor_interval_check(SkyscraperStore{}).empty());
}
