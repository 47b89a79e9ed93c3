#include "skyinv/field.hpp"

#include <stdexcept>

namespace skyinv {

PrimeField::PrimeField(elem q) : q_(q) {
    if (q < 2 || q > 65536 || !is_prime(q)) throw std::invalid_argument("field order must be a prime ≤ 2^16");
    auto t = std::make_shared<vec<elem>>(q, 0);
    for (elem a = 1; a < q; ++a) {
        if ((*t)[a] != 0) continue;
        elem b = pow(a, q - 2);
        (*t)[a] = b;
        (*t)[b] = a;
    }
    inv_ = t;
}

bool PrimeField::is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

elem PrimeField::inv(elem a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    return (*inv_)[a];
}

elem PrimeField::pow(elem a, std::uint64_t e) const {
    std::uint64_t r = 1, b = a % q_;
    while (e) {
        if (e & 1) r = r * b % q_;
        b = b * b % q_;
        e >>= 1;
    }
    return (elem)r;
}

// ---------------------------------------------------------------- DenseMatrix

DenseMatrix DenseMatrix::identity(int n, PrimeField f) {
    DenseMatrix m(n, n, f);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

DenseMatrix DenseMatrix::random(int rows, int cols, PrimeField f, std::mt19937_64& rng) {
    DenseMatrix m(rows, cols, f);
    for (auto& x : m.data_) x = f.random(rng);
    return m;
}

DenseMatrix DenseMatrix::from_columns(const vec<vec<elem>>& cols, int rows, PrimeField f) {
    DenseMatrix m(rows, (int)cols.size(), f);
    for (int j = 0; j < (int)cols.size(); ++j)
        for (int i = 0; i < rows; ++i) m.at(i, j) = cols[j][i];
    return m;
}

vec<elem> DenseMatrix::column(int j) const {
    vec<elem> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = at(i, j);
    return c;
}

vec<vec<elem>> DenseMatrix::columns() const {
    vec<vec<elem>> out;
    for (int j = 0; j < cols_; ++j) out.push_back(column(j));
    return out;
}

bool DenseMatrix::is_zero() const {
    for (elem x : data_)
        if (x) return false;
    return true;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_, f_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& b) const {
    if (cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    DenseMatrix c(rows_, b.cols_, f_);
    const std::uint64_t q = f_.q();
    vec<std::uint64_t> acc(b.cols_);
    for (int i = 0; i < rows_; ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (int k = 0; k < cols_; ++k) {
            elem a = at(i, k);
            if (!a) continue;
            const elem* br = b.row_ptr(k);
            for (int j = 0; j < b.cols_; ++j) acc[j] += (std::uint64_t)a * br[j];
            if ((k & 1023) == 1023)
                for (auto& x : acc) x %= q;
        }
        for (int j = 0; j < b.cols_; ++j) c.at(i, j) = (elem)(acc[j] % q);
    }
    return c;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw std::invalid_argument("matrix sum: shape mismatch");
    DenseMatrix c = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) c.data_[k] = f_.add(data_[k], b.data_[k]);
    return c;
}

DenseMatrix DenseMatrix::scaled(elem s) const {
    DenseMatrix c = *this;
    for (auto& x : c.data_) x = f_.mul(x, s);
    return c;
}

vec<elem> DenseMatrix::apply(const vec<elem>& v) const {
    vec<elem> out(rows_, 0);
    for (int i = 0; i < rows_; ++i) {
        std::uint64_t s = 0;
        for (int j = 0; j < cols_; ++j) s += (std::uint64_t)at(i, j) * v[j];
        out[i] = (elem)(s % f_.q());
    }
    return out;
}

DenseMatrix DenseMatrix::hstack(const DenseMatrix& b) const {
    if (rows_ != b.rows_) throw std::invalid_argument("hstack: row mismatch");
    DenseMatrix c(rows_, cols_ + b.cols_, f_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) c.at(i, j) = at(i, j);
        for (int j = 0; j < b.cols_; ++j) c.at(i, cols_ + j) = b.at(i, j);
    }
    return c;
}

DenseMatrix DenseMatrix::vstack(const DenseMatrix& b) const {
    if (cols_ != b.cols_) throw std::invalid_argument("vstack: column mismatch");
    DenseMatrix c(rows_ + b.rows_, cols_, f_);
    std::copy(data_.begin(), data_.end(), c.data_.begin());
    std::copy(b.data_.begin(), b.data_.end(), c.data_.begin() + data_.size());
    return c;
}

DenseMatrix DenseMatrix::submatrix(const vec<int>& rs, const vec<int>& cs) const {
    DenseMatrix c((int)rs.size(), (int)cs.size(), f_);
    for (int i = 0; i < (int)rs.size(); ++i)
        for (int j = 0; j < (int)cs.size(); ++j) c.at(i, j) = at(rs[i], cs[j]);
    return c;
}

DenseMatrix DenseMatrix::select_columns(const vec<int>& cs) const {
    vec<int> rs(rows_);
    for (int i = 0; i < rows_; ++i) rs[i] = i;
    return submatrix(rs, cs);
}

// ---------------------------------------------------------------- elimination

vec<int> rref_inplace(DenseMatrix& m) {
    const PrimeField& f = m.field();
    const elem q = f.q();
    const int R = m.rows(), C = m.cols();
    vec<int> pivots;
    int r = 0;
    for (int c = 0; c < C && r < R; ++c) {
        int p = -1;
        for (int i = r; i < R; ++i)
            if (m.at(i, c)) { p = i; break; }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < C; ++j) std::swap(m.at(p, j), m.at(r, j));
        elem* pr = m.row_ptr(r);
        if (pr[c] != 1) {
            elem s = f.inv(pr[c]);
            for (int j = c; j < C; ++j) pr[j] = f.mul(pr[j], s);
        }
        for (int i = 0; i < R; ++i) {
            if (i == r) continue;
            elem* ri = m.row_ptr(i);
            elem a = ri[c];
            if (!a) continue;
            if (q == 2) {
                for (int j = c; j < C; ++j) ri[j] ^= pr[j];
            } else {
                elem na = q - a;
                for (int j = c; j < C; ++j) {
                    if (!pr[j]) continue;
                    ri[j] = (elem)((ri[j] + (std::uint64_t)na * pr[j]) % q);
                }
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

Reduction reduce(const DenseMatrix& m) {
    DenseMatrix e = m;
    Reduction out;
    out.pivots = rref_inplace(e);
    out.rank = (int)out.pivots.size();
    out.column_basis = m.select_columns(out.pivots);
    const PrimeField& f = m.field();
    vec<char> is_pivot(m.cols(), 0);
    for (int c : out.pivots) is_pivot[c] = 1;
    out.kernel_basis = DenseMatrix(m.cols(), m.cols() - out.rank, f);
    int k = 0;
    for (int c = 0; c < m.cols(); ++c) {
        if (is_pivot[c]) continue;
        out.kernel_basis.at(c, k) = 1;
        for (int r = 0; r < out.rank; ++r) out.kernel_basis.at(out.pivots[r], k) = f.neg(e.at(r, c));
        ++k;
    }
    return out;
}

int rank(const DenseMatrix& m) {
    DenseMatrix e = m;
    return (int)rref_inplace(e).size();
}

DenseMatrix kron(const DenseMatrix& x, const DenseMatrix& a) {
    if (x.field() != a.field()) throw std::invalid_argument("kron: field mismatch");
    const PrimeField& f = a.field();
    DenseMatrix out(x.rows() * a.rows(), x.cols() * a.cols(), f);
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) {
            elem s = x.at(i, j);
            if (!s) continue;
            for (int k = 0; k < a.rows(); ++k)
                for (int l = 0; l < a.cols(); ++l)
                    out.at(i * a.rows() + k, j * a.cols() + l) = f.mul(s, a.at(k, l));
        }
    return out;
}

DenseMatrix span_basis(const DenseMatrix& cols) {
    DenseMatrix t = cols.transpose();
    auto piv = rref_inplace(t);
    DenseMatrix out(cols.rows(), (int)piv.size(), cols.field());
    for (int r = 0; r < (int)piv.size(); ++r)
        for (int i = 0; i < cols.rows(); ++i) out.at(i, r) = t.at(r, i);
    return out;
}

bool span_contains(const DenseMatrix& a, const DenseMatrix& b) {
    if (b.cols() == 0) return true;
    return rank(a.hstack(b)) == rank(a);
}

// ---------------------------------------------------------------- extensions

namespace {

using poly = vec<elem>;

void trim(poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

poly poly_mod(poly a, const poly& m, const PrimeField& f) {
    trim(a);
    const int dm = (int)m.size() - 1;
    elem lead_inv = f.inv(m.back());
    while ((int)a.size() - 1 >= dm) {
        elem c = f.mul(a.back(), lead_inv);
        int shift = (int)a.size() - 1 - dm;
        for (int i = 0; i <= dm; ++i) a[shift + i] = f.sub(a[shift + i], f.mul(c, m[i]));
        trim(a);
    }
    return a;
}

poly poly_mulmod(const poly& a, const poly& b, const poly& m, const PrimeField& f) {
    if (a.empty() || b.empty()) return {};
    poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = f.add(c[i + j], f.mul(a[i], b[j]));
    return poly_mod(c, m, f);
}

poly poly_powmod(poly base, std::uint64_t e, const poly& m, const PrimeField& f) {
    poly r{1};
    base = poly_mod(base, m, f);
    while (e) {
        if (e & 1) r = poly_mulmod(r, base, m, f);
        base = poly_mulmod(base, base, m, f);
        e >>= 1;
    }
    return r;
}

poly poly_gcd(poly a, poly b, const PrimeField& f) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        poly r = poly_mod(a, b, f);
        a = b;
        b = r;
    }
    return a;
}

// x^(q^k) mod m
poly frobenius_power(int k, const poly& m, const PrimeField& f) {
    poly x{0, 1};
    poly r = poly_mod(x, m, f);
    for (int i = 0; i < k; ++i) r = poly_powmod(r, f.q(), m, f);
    return r;
}

bool divides(const poly& d, const poly& p, const PrimeField& f) { return poly_mod(p, d, f).empty(); }

} // namespace

bool is_irreducible(const vec<elem>& p_in, const PrimeField& f) {
    poly p = p_in;
    trim(p);
    const int n = (int)p.size() - 1;
    if (n < 1) return false;
    if (n == 1) return true;
    // exhaustive trial division when the candidate set is small
    double work = 0;
    for (int d = 1; d <= n / 2; ++d) {
        double c = 1;
        for (int i = 0; i < d; ++i) c *= f.q();
        work += c;
    }
    if (n <= 8 && work <= 2e5) {
        for (int d = 1; d <= n / 2; ++d) {
            std::uint64_t count = 1;
            for (int i = 0; i < d; ++i) count *= f.q();
            for (std::uint64_t code = 0; code < count; ++code) {
                poly cand(d + 1, 0);
                cand[d] = 1;
                std::uint64_t c = code;
                for (int i = 0; i < d; ++i) { cand[i] = (elem)(c % f.q()); c /= f.q(); }
                if (divides(cand, p, f)) return false;
            }
        }
        return true;
    }
    // Rabin's test
    poly x{0, 1};
    if (frobenius_power(n, p, f) != poly_mod(x, p, f)) return false;
    for (int r = 2; r <= n; ++r) {
        if (n % r != 0 || !PrimeField::is_prime(r)) continue;
        poly h = frobenius_power(n / r, p, f);
        h.resize(std::max<std::size_t>(h.size(), 2), 0);
        h[1] = f.sub(h[1], 1);
        trim(h);
        poly g = poly_gcd(p, h, f);
        if (g.size() != 1) return false;
    }
    return true;
}

FieldExt ext_field_build(elem q, int g) {
    if (g < 1) throw std::invalid_argument("extension degree must be ≥ 1");
    FieldExt L;
    L.base = PrimeField(q);
    L.g = g;
    const PrimeField& f = L.base;
    if (g == 1) {
        L.modulus = {0, 1};
        L.companion = DenseMatrix(1, 1, f);
        return L;
    }
    // tails enumerated with the x^{g-1} coefficient most significant
    vec<elem> tail(g, 0);
    for (;;) {
        poly cand(tail);
        cand.push_back(1);
        if (cand[0] != 0 && is_irreducible(cand, f)) {
            L.modulus = cand;
            break;
        }
        int i = 0;
        while (i < g && ++tail[i] == q) { tail[i] = 0; ++i; }
        if (i == g) throw std::logic_error("no irreducible polynomial found");
    }
    L.companion = DenseMatrix(g, g, f);
    for (int i = 1; i < g; ++i) L.companion.at(i, i - 1) = 1;
    for (int i = 0; i < g; ++i) L.companion.at(i, g - 1) = f.neg(L.modulus[i]);
    return L;
}

vec<elem> FieldExt::mul(const vec<elem>& a, const vec<elem>& b) const {
    poly r = poly_mulmod(a, b, modulus, base);
    r.resize(g, 0);
    return r;
}

vec<elem> FieldExt::add(const vec<elem>& a, const vec<elem>& b) const {
    vec<elem> r(g);
    for (int i = 0; i < g; ++i) r[i] = base.add(a[i], b[i]);
    return r;
}

vec<elem> FieldExt::random(std::mt19937_64& rng) const {
    vec<elem> r(g);
    for (auto& x : r) x = base.random(rng);
    return r;
}

DenseMatrix embed_phi(const FieldExt& L, const vec<elem>& x) {
    const PrimeField& f = L.base;
    if ((int)x.size() != L.g) throw std::invalid_argument("embed_phi: wrong coefficient length");
    if (L.g == 1) {
        DenseMatrix m(1, 1, f);
        m.at(0, 0) = x[0];
        return m;
    }
    DenseMatrix out(L.g, L.g, f);
    DenseMatrix power = DenseMatrix::identity(L.g, f);
    for (int j = 0; j < L.g; ++j) {
        if (x[j]) out = out + power.scaled(x[j]);
        power = power * L.companion;
    }
    return out;
}

} // namespace skyinv
