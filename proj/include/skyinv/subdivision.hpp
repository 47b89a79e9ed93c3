#pragma once

#include <optional>

#include "skyinv/hn_core.hpp"

namespace skyinv {

/**
 * @brief Truncated inverse-slope polynomial p̃(δ) = c0 − cy·δ1 − cx·δ2 in offsets δ = β − α.
 * The full inverse slope is p̃(δ) + δ1·δ2.
 */
struct SlopePoly {
    Rational c0, cx, cy;

    Rational truncated(const Rational& d1, const Rational& d2) const { return c0 - cy * d1 - cx * d2; }
    Rational full(const Rational& d1, const Rational& d2) const { return truncated(d1, d2) + d1 * d2; }
    friend bool operator==(const SlopePoly& a, const SlopePoly& b) {
        return a.c0 == b.c0 && a.cx == b.cx && a.cy == b.cy;
    }
    std::string str() const;
};

/// ∫ dim of a one-parameter presentation given by row and column positions, via column reduction.
Rational line_integral(const vec<Rational>& row_pos, const vec<Rational>& col_pos, const vec<vec<elem>>& cols,
                       const PrimeField& f);

/// Slope polynomial of a module generated at a single degree α (bounded support).
SlopePoly slope_polynomial(const GradedMatrix& n);

using Point2 = std::pair<Rational, Rational>;

/// a·δ1 + b·δ2 ≤ c
struct HalfPlane {
    Rational a, b, c;
    bool holds(const Point2& p) const { return a * p.first + b * p.second <= c; }
};

struct ConvexRegion {
    vec<Point2> vertices;  // counter-clockwise
    vec<HalfPlane> constraints;

    static ConvexRegion rectangle(const Rational& w, const Rational& h);
    ConvexRegion clipped(const HalfPlane& hp) const;
    ConvexRegion intersect(const ConvexRegion& other) const;
    Rational area() const;
    bool empty_interior() const { return area().is_zero(); }
    bool contains(const Point2& p) const;
};

struct EnvelopeFace {
    int id = 0;
    ConvexRegion region;
};

/**
 * @brief Minimisation diagram of the planes p̃_i over a convex region: one face per id whose plane
 * attains the minimum on a set with nonempty interior.
 */
vec<EnvelopeFace> lower_envelope(const vec<SlopePoly>& polys, const ConvexRegion& cell);

struct MaxSlopeFace {
    ConvexRegion region;
    DenseMatrix basis;
    SlopePoly poly;
    int id = 0;  // smaller ids win ties; larger subspaces get smaller ids
};

/// For every point β of a face, <basis> restricted to ↑β has the highest slope among submodules of <V_β>.
vec<MaxSlopeFace> all_max_slope(const GradedMatrix& n, const ConvexRegion& cell);

struct SubdivNode {
    int parent = -1;
    vec<int> children;
    ConvexRegion region;
    DenseMatrix basis;  // cumulative subspace of V_α
    vec<Staircase> staircases;  // the factor added at this node
    SlopePoly poly;
    int id = 0;
};

/**
 * @brief Nested subdivision of a cell [α, α + (w, h)) into regions with a constant HN type.
 * Node 0 is the root with the zero subspace.
 */
struct SubdivTree {
    Degree alpha;
    Rational w, h;
    vec<SubdivNode> nodes;

    vec<int> path(const Degree& beta) const;
    HNFactorList factors_at(const Degree& beta) const;
    int depth() const;
    bool in_cell(const Degree& beta) const;
};

/// Exact HN subdivision of the cell at α; by default the first cell of the grid induced by <V_α>.
SubdivTree exact_hnf_cell(const GradedMatrix& m, const Degree& alpha, std::optional<Degree> cell_upper = {});

} // namespace skyinv
