#include "skyinv/rational.hpp"

#include <cctype>
#include <limits>

namespace skyinv {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits64(__int128 v) {
    return v >= (__int128)std::numeric_limits<std::int64_t>::min() &&
           v <= (__int128)std::numeric_limits<std::int64_t>::max();
}

} // namespace

void Rational::assign(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n == 0) d = 1;
    if (!fits64(n) || !fits64(d)) throw std::overflow_error("rational overflow");
    num_ = (std::int64_t)n;
    den_ = (std::int64_t)d;
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace((unsigned char)c)) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty number");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational a = parse(s.substr(0, slash));
        Rational b = parse(s.substr(slash + 1));
        return a / b;
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') { neg = s[i] == '-'; ++i; }
    __int128 n = 0, d = 1;
    bool digits = false, dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit((unsigned char)c)) {
            n = n * 10 + (c - '0');
            if (dot) d *= 10;
            digits = true;
            if (n > ((__int128)1 << 100) || d > ((__int128)1 << 100))
                throw std::overflow_error("number too long: " + raw);
        } else if (c == '.' && !dot) {
            dot = true;
        } else if ((c == 'e' || c == 'E') && digits) {
            long e = std::stol(s.substr(i + 1));
            if (e > 30 || e < -30) throw std::overflow_error("exponent out of range: " + raw);
            for (; e > 0; --e) n *= 10;
            for (; e < 0; ++e) d *= 10;
            i = s.size();
            break;
        } else {
            throw std::invalid_argument("not a number: " + raw);
        }
    }
    if (!digits) throw std::invalid_argument("not a number: " + raw);
    Rational r;
    r.assign(neg ? -n : n, d);
    return r;
}

} // namespace skyinv
