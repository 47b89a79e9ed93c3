#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "skyinv/cheng.hpp"

using namespace skyinv;
using namespace fixtures;

TEST_CASE("matrix space of the cross") {
    Grid g = integer_grid(3);
    AlphaSpace a = build_A_alpha(cross(), g, D(0, 1));
    CHECK(a.p0 == 2);
    CHECK(a.q0 == 3);
    CHECK(a.space.basis.size() == 3);
    CHECK(a.space.independent());
    CHECK(a.degrees == vec<Degree>{D(0, 2), D(1, 1), D(2, 1)});
    CHECK_THROWS_AS(build_A_alpha(cross(), g, D(2, 2)), std::invalid_argument);
    // nothing nonzero above (0,2) on this grid
    AlphaSpace corner = build_A_alpha(cross(), g, D(0, 2));
    CHECK(corner.p0 == 1);
    CHECK(corner.q0 == 0);
    CHECK(corner.space.basis.empty());
    AlphaSpace thin = build_A_alpha(cross_vertical(), integer_grid(4), D(0, 0));
    for (auto& b : thin.space.basis) CHECK(b.cols() == 1);
    AlphaSpace weighted = build_A_alpha(cross(), g, D(0, 1), [](const Degree& d) { return d.x == 2 ? 2 : 1; });
    CHECK(weighted.q0 == 4);
    CHECK(weighted.space.basis.size() == 4);
}

TEST_CASE("wong limit examples") {
    PrimeField f(2);
    MatrixSpace id{{DenseMatrix::identity(2, f)}, 2, 2, f};
    WongResult w = wong_limit(DenseMatrix::identity(2, f), {id, 1, 1});
    CHECK(w.contained);
    CHECK(w.state.s.cols() == 0);
    CHECK(w.state.preimage.cols() == 0);
    CHECK(shrunk_subspace_brute({id, 1, 1}).cols() == 0);

    DenseMatrix e11(2, 2, f), e21(2, 2, f);
    e11.at(0, 0) = 1;
    e21.at(1, 0) = 1;
    MatrixSpace col{{e11, e21}, 2, 2, f};
    WongResult w2 = wong_limit(e11, {col, 1, 1});
    CHECK(w2.contained);
    CHECK(w2.state.s.cols() == 0);
    REQUIRE(w2.state.preimage.cols() == 1);
    CHECK(w2.state.preimage.column(0) == vec<elem>{0, 1});
    DenseMatrix brute = shrunk_subspace_brute({col, 1, 1});
    REQUIRE(brute.cols() == 1);
    CHECK(brute.column(0) == vec<elem>{0, 1});
    auto rnd = shrunk_with_retries({col, 1, 1}, 5);
    REQUIRE(rnd);
    CHECK(same_span(*rnd, brute));
    // p = 2 in the square blow-up still returns span{e2}
    auto scaled = shrunk_subspace_random({col, 1, 1}, 2, 9);
    if (scaled) CHECK(same_span(*scaled, brute));

    MatrixSpace empty{{}, 2, 3, f};
    auto all = shrunk_subspace_random({empty, 1, 1}, 1, 1);
    REQUIRE(all);
    CHECK(all->cols() == 3);
}

TEST_CASE("block image equals the naive blow-up image") {
    std::mt19937_64 rng(73);
    for (int s = 0; s < 50; ++s) {
        PrimeField f(s % 2 ? 3 : 2);
        MatrixSpace sp = random_space(rng, f, 1 + rng() % 3, 1 + rng() % 3, 1 + rng() % 3);
        BlowUp b{sp, 1 + (int)(rng() % 3), 1 + (int)(rng() % 3)};
        DenseMatrix x = DenseMatrix::random(b.q * sp.n_prime, 1 + rng() % 3, f, rng);
        CHECK(same_span(blowup_image(b, x), blowup_image_naive(b, x)));
    }
}

TEST_CASE("wong sequences are monotone and short") {
    std::mt19937_64 rng(79);
    for (int s = 0; s < 50; ++s) {
        PrimeField f(2);
        MatrixSpace sp = random_space(rng, f, 1 + rng() % 4, 1 + rng() % 4, 1 + rng() % 4);
        BlowUp b{sp, 1 + (int)(rng() % 2), 1 + (int)(rng() % 2)};
        DenseMatrix a(b.p * sp.n, b.q * sp.n_prime, f);
        for (auto& ai : sp.basis) a = a + kron(DenseMatrix::random(b.p, b.q, f, rng), ai);
        WongResult w = wong_limit(a, b);
        for (std::size_t i = 1; i < w.state.dims.size(); ++i) CHECK(w.state.dims[i - 1] <= w.state.dims[i]);
        CHECK(w.state.steps <= std::min(b.p * sp.n, b.q * sp.n_prime) + 1);
    }
}

TEST_CASE("randomized shrunk subspaces are the minimal maximizers") {
    std::mt19937_64 rng(83);
    int checked = 0;
    for (int s = 0; s < 80; ++s) {
        PrimeField f(2);
        MatrixSpace sp = random_space(rng, f, 1 + rng() % 4, 1 + rng() % 4, 1 + rng() % 4);
        BlowUp b{sp, 1 + (int)(rng() % 3), 1 + (int)(rng() % 3)};
        DenseMatrix brute = shrunk_subspace_brute(b);
        auto u = shrunk_with_retries(b, 1000 + s);
        REQUIRE(u);
        CHECK(same_span(*u, brute));
        ++checked;
    }
    CHECK(checked == 80);
}

TEST_CASE("blow-up scaling of the minimal shrunk subspace") {
    std::mt19937_64 rng(89);
    for (int s = 0; s < 15; ++s) {
        PrimeField f(2);
        MatrixSpace sp = random_space(rng, f, 1 + rng() % 2, 1 + rng() % 2, 1 + rng() % 3);
        DenseMatrix u = shrunk_subspace_brute({sp, 1, 1});
        MatrixSpace big;
        big.field = f;
        big.n = 2 * sp.n;
        big.n_prime = 2 * sp.n_prime;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                DenseMatrix e(2, 2, f);
                e.at(r, c) = 1;
                for (auto& a : sp.basis) big.basis.push_back(kron(e, a));
            }
        DenseMatrix ubig = shrunk_subspace_brute({big, 1, 1});
        CHECK(same_span(ubig, kron(DenseMatrix::identity(2, f), u)));
    }
}

TEST_CASE("farey probes") {
    CHECK(farey_probes(2, 5, 6, 36) == vec<std::pair<int, int>>{{1, 1}, {1, 2}, {1, 3}});
    CHECK(farey_probes(4, 10, 6, 36) == vec<std::pair<int, int>>{{1, 1}, {1, 2}, {1, 3}});
    CHECK(farey_probes(1, 1, 6, 36).empty());
    CHECK(farey_probes(1, 9, 3, 36).size() == 3);
    CHECK(farey_probes(1, 40, 6, 4).size() == 4);
}

TEST_CASE("hn_cheng examples") {
    ChengConfig cfg;
    cfg.box_upper = D(3, 3);
    HNFactorList l = hn_cheng(cross(), integer_grid(3), D(0, 1), cfg);
    REQUIRE(l.factors.size() == 2);
    CHECK(l.factors[0].slope == R(1, 2));
    CHECK(l.factors[1].slope == R(1, 3));
    CHECK(equivalent(l, hn_filtration_at(cross(), D(0, 1))));

    HNFactorList s = hn_cheng(stable(), integer_grid(4), D(0, 0));
    REQUIRE(s.factors.size() == 1);
    CHECK(s.factors[0].slope == R(2, 9));

    HNFactorList v = hn_cheng(cross_vertical(), integer_grid(4), D(0, 0));
    REQUIRE(v.factors.size() == 1);
    CHECK(v.factors[0].slope == R(1, 3));

    CHECK(hn_cheng(cross(), integer_grid(4), D(3, 3)).factors.empty());
    CHECK_THROWS_AS(hn_cheng(cross(), integer_grid(3), D(0, 1)), std::invalid_argument);
}

TEST_CASE("hn_cheng without farey probes and with no retries") {
    ChengConfig cfg;
    cfg.farey = false;
    CHECK(equivalent(hn_cheng(cross(), integer_grid(4), D(0, 1), cfg), hn_filtration_at(cross(), D(0, 1))));
    cfg.retries = 0;
    CHECK_THROWS_AS(hn_cheng(cross(), integer_grid(4), D(0, 1), cfg), ChengFailure);
}

TEST_CASE("hn_cheng agrees with brute force on random modules") {
    std::mt19937_64 rng(97);
    int compared = 0;
    for (elem q : {2u, 3u}) {
        for (int s = 0; s < 30; ++s) {
            GradedMatrix m = random_uniquely_generated(rng, PrimeField(q), 1 + rng() % 3, 3, 1, rng() % 6);
            if (m.rows() == 0) continue;
            ChengConfig cfg;
            cfg.seed = s;
            HNFactorList c = hn_cheng(m, integer_grid(4), D(0, 0), cfg);
            HNFactorList b = hn_filtration_at(m, D(0, 0));
            CHECK(equivalent(c, b));
            ++compared;
        }
    }
    CHECK(compared > 50);
}
