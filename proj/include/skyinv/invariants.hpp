#pragma once

#include <map>
#include <optional>

#include "skyinv/grmat.hpp"

namespace skyinv {

struct BettiTable {
    vec<Degree> b0, b1, b2;
};

BettiTable betti_numbers(const GradedMatrix& m);
/// componentwise join of all degrees in the table
Degree betti_bound(const BettiTable& bt);
/// ∫ dim V over the plane, from the alternating sum over Betti degrees against the bound B
Rational integral_dim(const BettiTable& bt, const Degree& bound);
Rational integral_dim(const GradedMatrix& m);
/// dim V_α / ∫ dim <V_α>
Rational slope_at(const GradedMatrix& m, const Degree& alpha);

/**
 * @brief Pointwise dimensions on a grid; the value of a cell is the dimension at its lower corner.
 */
struct HilbertFn {
    Grid grid;
    vec<vec<int>> values;  // values[ix][iy]

    int at(const Degree& d) const;
    int max() const;
};

HilbertFn hilbert_function(const GradedMatrix& m, const Grid& g);
/// Σ over cells of value·area; the last row and column must vanish (bounded support)
Rational hilbert_integral(const HilbertFn& h);

struct Staircase {
    Degree gen;
    vec<Degree> rels;  // antichain, x ascending

    bool contains(const Degree& b) const;
    friend bool operator==(const Staircase& a, const Staircase& b) { return a.gen == b.gen && a.rels == b.rels; }
};

bool staircase_contains(const Staircase& s, const Degree& b);
/// normalize an arbitrary relation list to a sorted antichain of minimal elements
vec<Degree> minimal_antichain(vec<Degree> rels);
/// the staircase restricted to the upset of b (b must lie in its support)
Staircase restrict_staircase(const Staircase& s, const Degree& b);

/// Superlevel sets {dim ≥ j} of a uniquely generated module, j = 1..thickness.
vec<Staircase> superlevel_staircases(const GradedMatrix& m);
/// Superlevel sets of a grid function that is non-increasing above alpha (alpha a grid point).
vec<Staircase> superlevel_staircases(const HilbertFn& h, const Degree& alpha);
/// Pointwise sum of indicator functions, sampled on the grid of all staircase coordinates.
HilbertFn staircase_sum(const vec<Staircase>& ss);

struct HNFactor {
    vec<Staircase> staircases;
    Rational slope;
};

struct HNFactorList {
    Degree alpha;
    vec<HNFactor> factors;

    int dim() const;
};

/// Equal slopes merged into one factor, staircases recomputed from the summed Hilbert function.
HNFactorList canonical(const HNFactorList& l);
bool equivalent(const HNFactorList& a, const HNFactorList& b);
/// Σ over factors with slope ≥ θ of the number of staircases containing b.
int count_at(const HNFactorList& l, const Rational& theta, const Degree& b);

class SkyscraperQuery {
public:
    virtual ~SkyscraperQuery() = default;
    /// s^θ(a, b) for a ≤ b
    virtual int query(const Rational& theta, const Degree& a, const Degree& b) const = 0;
};

/**
 * @brief Dictionary α -> HN factor list. Keys snap through ⌊·⌋ on the ε-grid when epsilon is set.
 */
struct SkyscraperStore : SkyscraperQuery {
    std::map<Degree, HNFactorList> entries;
    std::optional<Rational> epsilon;

    void insert(HNFactorList l);
    const HNFactorList* locate(const Degree& a) const;
    int query(const Rational& theta, const Degree& a, const Degree& b) const override;
};

int skyscraper_query(const SkyscraperStore& store, const Rational& theta, const Degree& a, const Degree& b);
/// Entrywise equivalence of two stores (same keys, equivalent factor lists).
bool stores_equivalent(const SkyscraperStore& a, const SkyscraperStore& b);

struct ErosionBracket {
    Rational lower, upper;
};

/**
 * @brief Smallest multiple of `spacing` for which both shifted inequalities hold on all probe
 * pairs a ≤ b; the result is the bracket [largest failing, smallest passing].
 */
ErosionBracket erosion_distance(const SkyscraperQuery& r, const SkyscraperQuery& s, const Rational& theta,
                                const vec<Degree>& probes, const Rational& spacing);

Rational floor_to(const Rational& v, const Rational& eps);

} // namespace skyinv
