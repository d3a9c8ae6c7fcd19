#include "loadfair/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "loadfair/errors.hpp"

namespace loadfair {

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw ValidationError("rational with zero denominator");
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

Rational Rational::from_double(double v) {
    if (!std::isfinite(v)) throw ValidationError("non-finite rational value");
    if (v == 0.0) return Rational(0, 1);
    const bool neg = v < 0;
    double x = neg ? -v : v;
    // Continued-fraction convergents; stop when the convergent reproduces
    // the input within 1e-9 or the denominator grows past 1e9.
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = x;
    for (int it = 0; it < 64; ++it) {
        const double a_d = std::floor(frac);
        if (a_d > 9.0e17) break;
        const auto a = static_cast<std::int64_t>(a_d);
        const std::int64_t p2 = a * p1 + p0;
        const std::int64_t q2 = a * q1 + q0;
        if (q2 > 1000000000) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - x) <= 1e-9 * (1.0 + std::abs(x))) break;
        const double rem = frac - a_d;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    if (q1 == 0) throw ValidationError("cannot approximate value as a rational");
    return Rational(neg ? -p1 : p1, q1);
}

Rational Rational::parse(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            const std::int64_t n = std::stoll(s.substr(0, slash));
            const std::int64_t d = std::stoll(s.substr(slash + 1));
            return Rational(n, d);
        }
        if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
            s.find('E') == std::string::npos) {
            return Rational(std::stoll(s), 1);
        }
        return from_double(std::stod(s));
    } catch (const std::invalid_argument&) {
        throw ParseError("bad rational literal: '" + s + "'");
    } catch (const std::out_of_range&) {
        throw ParseError("rational literal out of range: '" + s + "'");
    }
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

bool Rational::le_times(std::int64_t count, std::int64_t scale) const {
    // count <= num/den * scale  <=>  count*den <= num*scale
    return static_cast<__int128>(count) * den <= static_cast<__int128>(num) * scale;
}

bool Rational::ge_times(std::int64_t count, std::int64_t scale) const {
    return static_cast<__int128>(count) * den >= static_cast<__int128>(num) * scale;
}

bool Rational::operator<=(const Rational& o) const {
    return static_cast<__int128>(num) * o.den <= static_cast<__int128>(o.num) * den;
}

}  // namespace loadfair
