#include "skyinv/hn_core.hpp"

#include <algorithm>
#include <stdexcept>

namespace skyinv {

// ---------------------------------------------------------------- subspace enumeration

SubspaceIter::SubspaceIter(int t, int k, PrimeField f) : t_(t), k_(k), f_(f) {
    if (k < 0 || k > t) done_ = true;
    pivots_.resize(std::max(k, 0));
    for (int i = 0; i < k_ && !done_; ++i) pivots_[i] = i;
    if (!done_) load_pattern();
}

void SubspaceIter::load_pattern() {
    free_.clear();
    vec<char> is_pivot(t_, 0);
    for (int p : pivots_) is_pivot[p] = 1;
    for (int r = 0; r < k_; ++r)
        for (int c = pivots_[r] + 1; c < t_; ++c)
            if (!is_pivot[c]) free_.push_back({r, c});
    counter_.assign(free_.size(), 0);
}

bool SubspaceIter::next_pattern() {
    int i = k_ - 1;
    while (i >= 0 && pivots_[i] == t_ - k_ + i) --i;
    if (i < 0) return false;
    ++pivots_[i];
    for (int j = i + 1; j < k_; ++j) pivots_[j] = pivots_[j - 1] + 1;
    load_pattern();
    return true;
}

bool SubspaceIter::next(DenseMatrix& basis) {
    if (done_) return false;
    if (started_) {
        // advance the free-entry counter, then the pivot pattern
        std::size_t i = 0;
        while (i < counter_.size() && ++counter_[i] == f_.q()) { counter_[i] = 0; ++i; }
        if (i == counter_.size() && !next_pattern()) {
            done_ = true;
            return false;
        }
    }
    started_ = true;
    basis = DenseMatrix(t_, k_, f_);
    for (int r = 0; r < k_; ++r) basis.at(pivots_[r], r) = 1;
    // most significant free entry first, so the counter's order is lexicographic
    for (std::size_t i = 0; i < free_.size(); ++i) {
        auto [r, c] = free_[free_.size() - 1 - i];
        basis.at(c, r) = counter_[i];
    }
    return true;
}

std::uint64_t SubspaceIter::gaussian_binomial(int t, int k, std::uint64_t q) {
    if (k < 0 || k > t) return 0;
    // product formula, exact in integers for the small sizes used here
    unsigned __int128 num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        unsigned __int128 a = 1, b = 1;
        for (int j = 0; j < t - i; ++j) a *= q;
        for (int j = 0; j < i + 1; ++j) b *= q;
        num *= (a - 1);
        den *= (b - 1);
    }
    return (std::uint64_t)(num / den);
}

// ---------------------------------------------------------------- brute force

namespace {

GradedMatrix subspace_generators(const GradedMatrix& m, const DenseMatrix& basis) {
    GradedMatrix s(m.field);
    s.row_degrees = m.row_degrees;
    const Degree alpha = m.row_degrees.at(0);
    for (int c = 0; c < basis.cols(); ++c) s.add_column_dense(alpha, basis.column(c));
    return s;
}

void check_uniquely_generated(const GradedMatrix& m) {
    if (m.rows() == 0) throw std::invalid_argument("zero thickness");
    const Degree alpha = m.row_degrees[0];
    for (auto& d : m.row_degrees)
        if (d != alpha) throw std::invalid_argument("module is not uniquely generated");
    for (auto& d : m.col_degrees)
        if (d == alpha) throw std::invalid_argument("presentation is not minimal at its generator degree");
}

} // namespace

Rational inverse_slope(const GradedMatrix& m, const DenseMatrix& basis) {
    GradedMatrix n = submodule_presentation(m, subspace_generators(m, basis));
    return integral_dim(n) / Rational(basis.cols());
}

SlopeRecord brute_force_max_slope(const GradedMatrix& m, const BruteForceOptions& opt, BruteForceStats* stats) {
    check_uniquely_generated(m);
    const int t = m.rows();
    const std::uint64_t q = m.field.q();
    BruteForceStats st;
    SlopeRecord best;
    bool have = false;
    auto consider = [&](const DenseMatrix& b) {
        Rational inv = inverse_slope(m, b);
        ++st.evaluated;
        if (!have || inv < best.inv_slope || (inv == best.inv_slope && b.cols() > best.dim())) {
            best.basis = b;
            best.inv_slope = inv;
            have = true;
        }
        return inv;
    };

    vec<Rational> line_inv;
    {
        SubspaceIter it(t, 1, m.field);
        DenseMatrix b;
        while (it.next(b)) line_inv.push_back(consider(b));
    }
    for (int k = 2; k <= t; ++k) {
        if (opt.filter) {
            Rational bound = best.inv_slope * Rational(k);
            std::uint64_t high = 0;
            for (auto& v : line_inv) high += v <= bound;
            if (high < SubspaceIter::gaussian_binomial(k, 1, q)) {
                st.skipped_strata.push_back(k);
                continue;
            }
        }
        SubspaceIter it(t, k, m.field);
        DenseMatrix b;
        while (it.next(b)) consider(b);
    }
    if (stats) *stats = st;
    return best;
}

GradedMatrix uniquely_generated_at(const GradedMatrix& m, const Degree& alpha) {
    PointwiseModel pm = pointwise_model(m, alpha);
    GradedMatrix s = generators_at(m, alpha, DenseMatrix::identity(pm.dim, m.field));
    return submodule_presentation(m, s);
}

HNFactorList hn_filtration_at(const GradedMatrix& m, const Degree& alpha, const BruteForceOptions& opt) {
    HNFactorList out;
    out.alpha = alpha;
    GradedMatrix n = uniquely_generated_at(m, alpha);
    while (n.rows() > 0) {
        SlopeRecord rec = brute_force_max_slope(n, opt);
        GradedMatrix factor = submodule_presentation(n, subspace_generators(n, rec.basis));
        out.factors.push_back({superlevel_staircases(factor), Rational(1) / rec.inv_slope});
        if (rec.dim() == n.rows()) break;
        n = quotient_presentation(n, rec.basis).pres;
    }
    return out;
}

HNFactorList merge_factors(const vec<HNFactorList>& lists) {
    HNFactorList out;
    if (lists.empty()) return out;
    out.alpha = lists[0].alpha;
    for (auto& l : lists) {
        if (l.alpha != out.alpha) throw std::invalid_argument("merge_factors: mismatched base degrees");
        for (auto& f : l.factors) out.factors.push_back(f);
    }
    std::stable_sort(out.factors.begin(), out.factors.end(), [](auto& a, auto& b) { return a.slope > b.slope; });
    return out;
}

} // namespace skyinv
