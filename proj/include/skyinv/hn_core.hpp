#pragma once

#include <cstdint>

#include "skyinv/invariants.hpp"

namespace skyinv {

/**
 * @brief Enumerates the k-dimensional subspaces of F_q^t through their reduced row echelon forms,
 * pivot patterns in lexicographic order, free entries counted in base q.
 */
class SubspaceIter {
public:
    SubspaceIter(int t, int k, PrimeField f);
    /// basis vectors as columns of a t×k matrix; false once exhausted
    bool next(DenseMatrix& basis);

    static std::uint64_t gaussian_binomial(int t, int k, std::uint64_t q);

private:
    int t_, k_;
    PrimeField f_;
    vec<int> pivots_;
    vec<std::pair<int, int>> free_;  // (row, column) positions
    vec<elem> counter_;
    bool started_ = false;
    bool done_ = false;

    void load_pattern();
    bool next_pattern();
};

struct SlopeRecord {
    DenseMatrix basis;  // t×k
    Rational inv_slope;
    int dim() const { return basis.cols(); }
};

struct BruteForceOptions {
    bool filter = true;
};

struct BruteForceStats {
    std::uint64_t evaluated = 0;
    vec<int> skipped_strata;
};

/// ∫ dim <U> / dim U for the subspace spanned by the columns of basis (M minimal, uniquely generated).
Rational inverse_slope(const GradedMatrix& m, const DenseMatrix& basis);

/**
 * @brief Highest slope submodule generated by a subspace of V_α = F_q^t.
 * Among maximizers the largest one is returned (it is unique and is the first HN step).
 */
SlopeRecord brute_force_max_slope(const GradedMatrix& m, const BruteForceOptions& opt = {},
                                  BruteForceStats* stats = nullptr);

/// The presentation of <V_α> with all generators at α, minimized.
GradedMatrix uniquely_generated_at(const GradedMatrix& m, const Degree& alpha);

HNFactorList hn_filtration_at(const GradedMatrix& m, const Degree& alpha, const BruteForceOptions& opt = {});

HNFactorList merge_factors(const vec<HNFactorList>& lists);

} // namespace skyinv
