#pragma once

#include <optional>
#include <ostream>
#include <utility>

#include "skyinv/field.hpp"
#include "skyinv/rational.hpp"

namespace skyinv {

struct Degree {
    Rational x, y;

    Degree() = default;
    Degree(Rational x_, Rational y_) : x(x_), y(y_) {}

    /// lexicographic total order (x, then y), used for keys and sorting
    friend bool operator<(const Degree& a, const Degree& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
    friend bool operator==(const Degree& a, const Degree& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Degree& a, const Degree& b) { return !(a == b); }
    std::string str() const { return "(" + x.str() + "," + y.str() + ")"; }
};

inline std::ostream& operator<<(std::ostream& os, const Degree& d) { return os << d.str(); }

/// componentwise partial order
inline bool leq(const Degree& a, const Degree& b) { return a.x <= b.x && a.y <= b.y; }
inline bool colex_less(const Degree& a, const Degree& b) { return a.y < b.y || (a.y == b.y && a.x < b.x); }
inline Degree join(const Degree& a, const Degree& b) { return {rmax(a.x, b.x), rmax(a.y, b.y)}; }
inline Degree meet(const Degree& a, const Degree& b) { return {rmin(a.x, b.x), rmin(a.y, b.y)}; }
inline Degree operator+(const Degree& a, const Degree& b) { return {a.x + b.x, a.y + b.y}; }
inline Degree operator-(const Degree& a, const Degree& b) { return {a.x - b.x, a.y - b.y}; }

/// A grid coordinate possibly replaced by a ±∞ sentinel.
struct ExtCoord {
    int inf = 0;  // -1, 0, +1
    Rational v;
    bool finite() const { return inf == 0; }
    friend bool operator==(const ExtCoord& a, const ExtCoord& b) {
        return a.inf == b.inf && (a.inf != 0 || a.v == b.v);
    }
};

struct ExtDegree {
    ExtCoord x, y;
    bool finite() const { return x.finite() && y.finite(); }
    Degree value() const { return {x.v, y.v}; }
};

struct Grid {
    vec<Rational> xs, ys;

    Grid() = default;
    Grid(vec<Rational> xs_, vec<Rational> ys_);
    bool contains(const Degree& d) const;
    std::size_t size() const { return xs.size() * ys.size(); }
    static Grid regular(Rational x0, Rational x1, Rational y0, Rational y1, Rational step);
};

ExtCoord coord_floor(const vec<Rational>& cs, const Rational& v);
ExtCoord coord_ceil(const vec<Rational>& cs, const Rational& v);
ExtDegree grid_floor(const Degree& a, const Grid& g);
ExtDegree grid_ceil(const Degree& a, const Grid& g);

using SparseColumn = vec<std::pair<int, elem>>;

/**
 * @brief Homogeneous matrix presenting coker(A[R] -> A[G]); rows are generators, columns are relations.
 * Columns are sparse and sorted by row index.
 */
struct GradedMatrix {
    PrimeField field;
    vec<Degree> row_degrees;
    vec<Degree> col_degrees;
    vec<SparseColumn> columns;

    GradedMatrix() = default;
    explicit GradedMatrix(PrimeField f) : field(f) {}

    int rows() const { return (int)row_degrees.size(); }
    int cols() const { return (int)col_degrees.size(); }

    void add_row(const Degree& d) { row_degrees.push_back(d); }
    /// entries may be unsorted and contain zeros or repeated rows; they are normalized
    void add_column(const Degree& d, SparseColumn entries);
    void add_column_dense(const Degree& d, const vec<elem>& v);

    elem entry(int i, int j) const;
    vec<elem> dense_column(int j) const;
    DenseMatrix dense() const;

    bool is_homogeneous() const;
    /// throws std::invalid_argument naming the first offending entry
    void validate() const;
};

bool operator==(const GradedMatrix& a, const GradedMatrix& b);

/// Minimal generating set of the syzygy module {v : M v = 0}; rows indexed by the columns of M.
GradedMatrix kernel(const GradedMatrix& m);

/// Minimal presentation of coker M. If kept_rows is given it receives the surviving row indices.
GradedMatrix minimize(const GradedMatrix& m, vec<int>* kept_rows = nullptr);

/**
 * @brief Presentation of the submodule generated by the columns of S (a graded matrix
 * over the rows of M, its column degrees are the generator degrees). Returned minimized.
 */
GradedMatrix submodule_presentation(const GradedMatrix& m, const GradedMatrix& s);

/// Columns of `basis` (dim V_α × k) as generators at α, over the rows of a uniquely generated M.
GradedMatrix generators_at(const GradedMatrix& m, const Degree& alpha, const DenseMatrix& basis);

struct QuotientResult {
    GradedMatrix pres;
    vec<int> kept_rows;  // rows of the input that index the quotient's generators
};

/// Presentation of <V_α>/<W> for M uniquely generated at α and W spanned by the columns of B.
QuotientResult quotient_presentation(const GradedMatrix& m, const DenseMatrix& b);

GradedMatrix shift_join(const GradedMatrix& m, const Degree& alpha);

struct RestrictStats {
    int dropped_rows = 0;
    int dropped_cols = 0;
};

GradedMatrix grid_restrict(const GradedMatrix& m, const Grid& g, RestrictStats* stats = nullptr);

/**
 * @brief Vector space model of V_γ: a basis of the cokernel given by generator rows.
 */
struct PointwiseModel {
    Degree degree;
    int dim = 0;
    vec<int> active_rows;
    vec<int> basis_rows;
    /// reduced echelon basis of the image at γ, as (pivot row, dense vector over all rows)
    vec<std::pair<int, vec<elem>>> image;
    PrimeField field;

    /// coordinates in basis_rows of the class of v (dense over all rows of M; inactive rows ignored)
    vec<elem> coords(vec<elem> v) const;
};

PointwiseModel pointwise_model(const GradedMatrix& m, const Degree& gamma);
DenseMatrix structure_map(const GradedMatrix& m, const Degree& gamma, const Degree& delta);
DenseMatrix structure_map(const GradedMatrix& m, const PointwiseModel& from, const PointwiseModel& to);

struct Block {
    vec<int> rows;
    vec<int> cols;
};

vec<Block> connected_components(const GradedMatrix& m);
GradedMatrix block_matrix(const GradedMatrix& m, const Block& b);

Grid induced_grid(const GradedMatrix& m);
GradedMatrix direct_sum(const GradedMatrix& a, const GradedMatrix& b);

} // namespace skyinv
