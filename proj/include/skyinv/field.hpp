#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

namespace skyinv {

template <typename T>
using vec = std::vector<T>;

using elem = std::uint32_t;

/**
 * @brief The prime field F_q, q ≤ 2^16. Elements are integers in [0, q).
 */
class PrimeField {
public:
    PrimeField() : PrimeField(2) {}
    explicit PrimeField(elem q);

    elem q() const { return q_; }
    elem add(elem a, elem b) const { elem s = a + b; return s >= q_ ? s - q_ : s; }
    elem sub(elem a, elem b) const { return a >= b ? a - b : a + q_ - b; }
    elem neg(elem a) const { return a == 0 ? 0 : q_ - a; }
    elem mul(elem a, elem b) const { return (elem)(((std::uint64_t)a * b) % q_); }
    elem inv(elem a) const;
    elem div(elem a, elem b) const { return mul(a, inv(b)); }
    elem pow(elem a, std::uint64_t e) const;
    elem random(std::mt19937_64& rng) const { return (elem)(rng() % q_); }

    static bool is_prime(std::uint64_t n);

    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.q_ == b.q_; }
    friend bool operator!=(const PrimeField& a, const PrimeField& b) { return a.q_ != b.q_; }

private:
    elem q_;
    std::shared_ptr<const vec<elem>> inv_;
};

/**
 * @brief Dense row-major matrix over a prime field.
 */
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols, PrimeField f = PrimeField(2))
        : rows_(rows), cols_(cols), f_(f), data_((std::size_t)rows * cols, 0) {}

    static DenseMatrix identity(int n, PrimeField f);
    static DenseMatrix random(int rows, int cols, PrimeField f, std::mt19937_64& rng);
    /// columns given as vectors of equal length `rows`
    static DenseMatrix from_columns(const vec<vec<elem>>& cols, int rows, PrimeField f);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const PrimeField& field() const { return f_; }

    elem& at(int i, int j) { return data_[(std::size_t)i * cols_ + j]; }
    elem at(int i, int j) const { return data_[(std::size_t)i * cols_ + j]; }
    elem* row_ptr(int i) { return data_.data() + (std::size_t)i * cols_; }
    const elem* row_ptr(int i) const { return data_.data() + (std::size_t)i * cols_; }

    vec<elem> column(int j) const;
    vec<vec<elem>> columns() const;
    bool is_zero() const;

    DenseMatrix transpose() const;
    DenseMatrix operator*(const DenseMatrix& b) const;
    DenseMatrix operator+(const DenseMatrix& b) const;
    DenseMatrix scaled(elem c) const;
    vec<elem> apply(const vec<elem>& v) const;
    DenseMatrix hstack(const DenseMatrix& b) const;
    DenseMatrix vstack(const DenseMatrix& b) const;
    DenseMatrix submatrix(const vec<int>& rows, const vec<int>& cols) const;
    DenseMatrix select_columns(const vec<int>& cols) const;

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.f_ == b.f_ && a.data_ == b.data_;
    }
    friend bool operator!=(const DenseMatrix& a, const DenseMatrix& b) { return !(a == b); }

private:
    int rows_ = 0;
    int cols_ = 0;
    PrimeField f_;
    vec<elem> data_;
};

/// Row-reduce in place to reduced row echelon form; returns pivot columns.
vec<int> rref_inplace(DenseMatrix& m);

struct Reduction {
    int rank = 0;
    DenseMatrix column_basis;  // rows × rank, pivot columns of the input
    DenseMatrix kernel_basis;  // cols × (cols - rank)
    vec<int> pivots;
};

Reduction reduce(const DenseMatrix& m);
int rank(const DenseMatrix& m);
DenseMatrix kron(const DenseMatrix& x, const DenseMatrix& a);

/// Reduced basis of the span of the given columns (as columns of the result).
DenseMatrix span_basis(const DenseMatrix& cols);
/// Is every column of `b` in the column span of `a`.
bool span_contains(const DenseMatrix& a, const DenseMatrix& b);

/**
 * @brief Extension field F_{q^g} = F_q[x]/(modulus), elements are coefficient vectors of length g.
 */
class FieldExt {
public:
    PrimeField base;
    int g = 1;
    vec<elem> modulus;  // monic, length g+1, low degree first
    DenseMatrix companion;

    vec<elem> mul(const vec<elem>& a, const vec<elem>& b) const;
    vec<elem> add(const vec<elem>& a, const vec<elem>& b) const;
    vec<elem> random(std::mt19937_64& rng) const;
};

FieldExt ext_field_build(elem q, int g);
/// φ(x) = Σ x_j C^j, a g×g matrix over the base field.
DenseMatrix embed_phi(const FieldExt& L, const vec<elem>& x);
/// Irreducibility of a monic polynomial (low degree first).
bool is_irreducible(const vec<elem>& poly, const PrimeField& f);

} // namespace skyinv
