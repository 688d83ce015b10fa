#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fk {

// Exact rational arithmetic on 64-bit integers. Mean spacings, rotation
// bands and pinned-set intervals are kept exact; doubles appear only where
// positions are measured.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

inline Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
inline Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
inline Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }

// Comparisons go through 128-bit products so large denominators cannot wrap.
inline int compare(Rational a, Rational b) {
    const __int128 lhs = static_cast<__int128>(a.num) * b.den;
    const __int128 rhs = static_cast<__int128>(b.num) * a.den;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

inline bool operator==(Rational a, Rational b) { return compare(a, b) == 0; }
inline bool operator!=(Rational a, Rational b) { return compare(a, b) != 0; }
inline bool operator<(Rational a, Rational b) { return compare(a, b) < 0; }
inline bool operator<=(Rational a, Rational b) { return compare(a, b) <= 0; }
inline bool operator>(Rational a, Rational b) { return compare(a, b) > 0; }
inline bool operator>=(Rational a, Rational b) { return compare(a, b) >= 0; }

// Parses "p/q" or a bare integer.
inline Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return {std::stoll(text), 1};
        return {std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1))};
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + text + "'");
    }
}

// Best rational approximation with denominator <= max_den (continued fractions).
inline Rational approximate_rational(double x, std::int64_t max_den) {
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        const auto a = static_cast<std::int64_t>(std::floor(r));
        const std::int64_t p2 = a * p1 + p0;
        const std::int64_t q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        const double frac = r - static_cast<double>(a);
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    return {p1, q1};
}

}  // namespace fk
