#pragma once

#include <cstdint>
#include <string>

namespace loadfair {

// Exact nonnegative rational used for the fairness parameters alpha/beta.
// Fairness in the model is a counting constraint, so comparisons against
// integer counts must never go through floating point.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;  // > 0, gcd(num, den) == 1

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);

    // Snaps a double to the simplest fraction within 1e-9 (continued
    // fractions, denominator <= 1e9). Inputs like 0.2 or 1/3 given as a
    // decimal recover the intended exact value; exact control is available
    // via parse("p/q").
    static Rational from_double(double v);

    // Accepts "p/q", a decimal literal, or an integer literal.
    static Rational parse(const std::string& s);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    // count <= (*this) * scale, exactly.
    bool le_times(std::int64_t count, std::int64_t scale) const;
    // count >= (*this) * scale, exactly.
    bool ge_times(std::int64_t count, std::int64_t scale) const;

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<=(const Rational& o) const;
};

}  // namespace loadfair
