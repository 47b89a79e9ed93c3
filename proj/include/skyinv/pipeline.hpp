#pragma once

#include <memory>
#include <mutex>
#include <optional>

#include "skyinv/cheng.hpp"
#include "skyinv/subdivision.hpp"

namespace skyinv {

struct Box {
    Rational x0, y0, x1, y1;

    bool contains(const Degree& d) const { return d.x >= x0 && d.y >= y0 && d.x < x1 && d.y < y1; }
    friend bool operator==(const Box& a, const Box& b) {
        return a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1;
    }
};

/// lower corner at the least generator coordinates, upper corner at the largest degree plus margin
Box auto_box(const GradedMatrix& m, const Rational& margin = 1);
/// Appends relations capping every generator at the box's upper sides, then minimizes.
GradedMatrix clip_to_box(const GradedMatrix& m, const Box& box);

enum class Engine { brute, cheng, exact };

struct ScanConfig {
    Rational epsilon = 1;
    Engine engine = Engine::brute;
    std::optional<Box> box;
    Rational margin = 1;
    std::uint64_t seed = 1;
    ChengConfig cheng;
    BruteForceOptions brute;
    int threads = 1;
};

/// Points of εℤ² inside the box (half-open), in colexicographic order.
vec<Degree> epsilon_points(const Box& box, const Rational& eps);

struct PipelineStats {
    vec<long> work;  // per summand: HN computations (approx) or cell subdivisions (scan)
    std::size_t max_cached = 0;
};

/// Summands of the clipped module, one per connected component with a nonzero row.
vec<GradedMatrix> summands(const GradedMatrix& clipped);

/// ε-approximation: HN filtrations at every point of εℤ² in the support, keys snapped by ⌊·⌋.
SkyscraperStore approx_skyscraper(const GradedMatrix& m, const ScanConfig& cfg, PipelineStats* stats = nullptr);

/**
 * @brief Exact skyscraper invariant: one subdivision tree per summand and grid cell.
 * Queries locate the cell of β in every summand, walk the tree path and merge the factors.
 */
class ExactSkyscraper : public SkyscraperQuery {
public:
    struct Summand {
        GradedMatrix module;
        Grid grid;
        std::map<std::pair<int, int>, SubdivTree> cells;
    };

    Box box;
    vec<Summand> parts;

    HNFactorList factors_at(const Degree& beta) const;
    int query(const Rational& theta, const Degree& a, const Degree& b) const override;
    /// store with the exact factor lists at every ε-point of the box
    SkyscraperStore snapshot(const Rational& eps) const;
    std::size_t cell_count() const;

private:
    mutable std::map<Degree, HNFactorList> cache_;
    std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

ExactSkyscraper exact_skyscraper(const GradedMatrix& m, std::optional<Box> box = {}, const Rational& margin = 1,
                                 int threads = 1);

/// floor of a point on a grid as cell indices; -1 below the first line
std::pair<int, int> cell_index(const Grid& g, const Degree& b);

/**
 * @brief Colexicographic sweep over the ε-points with one pointer per summand. A summand's cell
 * subdivision is computed when its pointer enters the cell and dropped when the pointer changes row.
 */
SkyscraperStore parallel_grid_scan(const GradedMatrix& m, const ScanConfig& cfg, PipelineStats* stats = nullptr);

enum class Anchor { center, source };

struct LandscapeRow {
    Rational x, y;
    int k;
    Rational theta;
    Rational lambda;
};

/// λ_k^θ(α) = sup{h ≥ 0 : s^θ(α − h, α + h) ≥ k}, by bisection to within `tol`, capped at h_max.
Rational landscape_value(const SkyscraperQuery& q, const Degree& alpha, int k, const Rational& theta,
                         const Rational& h_max, const Rational& tol, Anchor anchor = Anchor::center);

/// Evaluates on a resolution × resolution grid spanning the box, rows ordered by (k, θ, y, x).
vec<LandscapeRow> filtered_landscape(const SkyscraperQuery& q, const Box& box, const vec<int>& ks,
                                     const vec<Rational>& thetas, int resolution, const Rational& tol,
                                     Anchor anchor = Anchor::center);

struct IntervalFlag {
    Degree alpha;
    int factor;
    int thickness;
};

/// Factors that are not interval modules (more than one superlevel staircase).
vec<IntervalFlag> factor_interval_check(const SkyscraperStore& store);

} // namespace skyinv
