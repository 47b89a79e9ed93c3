#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>

#include "skyinv/invariants.hpp"

namespace skyinv {

/// A linear subspace of N×N' matrices given by a basis.
struct MatrixSpace {
    vec<DenseMatrix> basis;
    int n = 0;        // rows
    int n_prime = 0;  // columns
    PrimeField field;

    /// dim 𝒜U for U spanned by the columns of u
    int image_dim(const DenseMatrix& u) const;
    /// basis of 𝒜U
    DenseMatrix image(const DenseMatrix& u) const;
    bool independent() const;
};

/// k^{p×q} ⊗ 𝒜: p scales the row side, q the column side.
struct BlowUp {
    MatrixSpace space;
    int p = 1, q = 1;
};

/// Result of building the matrix space of a uniquely generated module at α.
struct AlphaSpace {
    MatrixSpace space;
    int p0 = 0;             // dim V_α
    int q0 = 0;             // weighted Σ dim V_β over upper grid points
    vec<Degree> degrees;    // one per basis matrix (a degree repeats when its weight exceeds one)
};

/**
 * @brief Matrix space of the module generated at α, sampled on the grid points above α.
 * Each grid point β with dim V_β > 0 contributes `weights(β)` basis matrices, each carrying
 * V_{α→β} in its own row block.
 */
AlphaSpace build_A_alpha(const GradedMatrix& m, const Grid& g, const Degree& alpha,
                         const std::function<int(const Degree&)>& weight = nullptr);

struct WongState {
    DenseMatrix s;         // W = k^{rows} ⊗ S, basis of S ⊆ k^N as columns
    DenseMatrix preimage;  // basis of A^{-1}(W)
    int steps = 0;
    vec<int> dims;         // dim S after each step
};

struct WongResult {
    WongState state;
    bool contained = false;  // W ⊆ Im A
};

/**
 * @brief Wong sequence of A inside the blow-up k^{a×b} ⊗ 𝒜 (A is aN × bN').
 * Images are computed on S ⊆ k^N only: 𝒜^{blow}(X) = k^a ⊗ 𝒜(block components of X).
 */
WongResult wong_limit(const DenseMatrix& a, const BlowUp& b);

/// 𝒜^{blow}(X) computed from the explicit blow-up basis E_rc ⊗ A_i; reference for tests.
DenseMatrix blowup_image_naive(const BlowUp& b, const DenseMatrix& x);
/// 𝒜^{blow}(X) through block components, expanded to k^{pN}.
DenseMatrix blowup_image(const BlowUp& b, const DenseMatrix& x);

/**
 * @brief Randomized minimal shrunk subspace: the smallest U ⊆ k^{N'} maximizing q·dim U − p·dim 𝒜U,
 * or nullopt when the random element does not certify. `scale` is the extra square blow-up size,
 * the random element lives over an extension of degree max(1, ⌈log_q(scale)²⌉) + g_extra.
 */
std::optional<DenseMatrix> shrunk_subspace_random(const BlowUp& b, int scale, std::uint64_t seed, int g_extra = 2);

/// Exhaustive minimal maximizer of q·dim U − p·dim 𝒜U; small sizes only.
DenseMatrix shrunk_subspace_brute(const BlowUp& b);

struct ChengConfig {
    std::uint64_t seed = 1;
    int retries = 8;
    int g_extra = 2;
    bool farey = true;
    int farey_budget = 6;
    int farey_max_pq = 36;
    /// upper corner of the support box; bounds the cells of the last grid lines
    std::optional<Degree> box_upper;
};

struct ChengStats {
    int shrunk_calls = 0;
    int failures = 0;
    int farey_hits = 0;
    int max_blowup = 0;
};

class ChengFailure : public std::runtime_error {
public:
    ChengFailure(const Degree& a, int attempts);
    Degree alpha;
    int attempts;
};

/**
 * @brief HN filtration of <V_α> sampled on the grid, found by splitting at minimal shrunk subspaces.
 * Grid points are weighted by cell area, so with a grid containing all Betti coordinates the
 * result matches hn_filtration_at.
 */
HNFactorList hn_cheng(const GradedMatrix& m, const Grid& g, const Degree& alpha, const ChengConfig& cfg = {},
                      ChengStats* stats = nullptr);

/// Stern–Brocot mediants on the way to p/q, excluding p/q itself.
vec<std::pair<int, int>> farey_probes(int p, int q, int budget, int max_pq);

std::uint64_t mix_seed(std::uint64_t seed, const Degree& alpha, std::uint64_t attempt);

} // namespace skyinv
