#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace skyinv {

/**
 * @brief Exact rational with 64-bit numerator and denominator, always reduced, den > 0.
 * Intermediate products use 128-bit integers; results that do not fit throw std::overflow_error.
 */
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    static Rational parse(const std::string& s);

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from128(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from128((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return from128((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
    }
    Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    int sign() const { return (num_ > 0) - (num_ < 0); }
    bool is_zero() const { return num_ == 0; }
    double to_double() const { return (double)num_ / (double)den_; }

    /// largest integer ≤ value
    std::int64_t floor() const;
    std::int64_t ceil() const { return -(-*this).floor(); }

    std::string str() const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;

    void assign(__int128 n, __int128 d);
    static Rational from128(__int128 n, __int128 d) { Rational r; r.assign(n, d); return r; }
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

inline Rational rabs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline Rational rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace skyinv
