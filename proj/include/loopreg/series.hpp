#ifndef LOOPREG_SERIES_HPP
#define LOOPREG_SERIES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loopreg/types.hpp"

namespace loopreg {
namespace series {

// Exact rational number. Always gcd-normalized with positive denominator;
// arithmetic stays exact for the small exponent coefficients that occur here.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n); // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d);

    bool is_zero() const { return num == 0; }
    double to_double() const { return double(num) / double(den); }

    Rational operator+(const Rational& o) const;
    Rational operator-() const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const; // exact cross-multiplied compare
};

std::string to_string(const Rational& r);

// The three regulator scales a term may carry.
enum class Scale { K = 0, delta = 1, xi = 2 };
inline constexpr int n_scales = 3;
const char* scale_name(Scale s);
std::optional<Scale> scale_from_name(const std::string& name);

// Linear form c0 + cd*d + ca*alpha + cb*beta with exact rational
// coefficients. Scale-freeness is decided by the exact zero test below,
// never by comparing floating-point exponent values.
struct SymbolicExponent {
    Rational c0, cd, ca, cb;

    bool is_zero() const;
    bool operator==(const SymbolicExponent& o) const;
    SymbolicExponent operator+(const SymbolicExponent& o) const;
    double value(double d, double alpha, double beta) const;
};

// One series term: numeric coefficient (masses folded in) times a product
// of scale powers and integer powers of ln(scale). An absent scale is an
// exactly-zero exponent and zero log power.
struct Term {
    double coeff = 0.0;
    SymbolicExponent exponent[n_scales];
    int log_power[n_scales] = {0, 0, 0};

    bool scale_free() const;
};

// Truncated expansion with the numeric (d, alpha, beta) context it was
// built at, so exponents can be resolved when the series is evaluated.
struct FormalSeries {
    double d = 0.0;
    double alpha = 0.0;
    std::optional<double> beta;
    std::vector<Term> terms;
    std::string truncation_note;
};

// Merge like terms by exact signature, drop zero coefficients, and order
// terms lexicographically by signature. Idempotent.
FormalSeries normalize(const FormalSeries& s);

// Keep exactly the terms with zero exponent AND zero log power in `scale`;
// drop every other term. Log-tagged terms count as scale-dependent.
FormalSeries extract_scale(const FormalSeries& s, Scale scale);

// Keep exactly the terms free of ALL listed scales. Equals sequential
// extract_scale composition in any order.
FormalSeries extract_multi(const FormalSeries& s, const std::vector<Scale>& scales);

// Numeric value at concrete scale values (keys "K", "delta", "xi").
// Throws DomainError when a term needs a scale that is missing or not
// positive.
double eval_at(const FormalSeries& s, const std::map<std::string, double>& scale_values);

// Text form, one term per line as
//   coeff * K^(c0 + cd*d + ca*alpha + cb*beta) * lnK^p * ...
// with rationals rendered exactly as num/den and coefficients at 17
// significant digits; round-trips losslessly through from_text.
std::string to_text(const FormalSeries& s);
FormalSeries from_text(const std::string& text);

struct CommutationReport {
    bool passed = false;
    double lhs = 0.0;      // alpha * extracted value at alpha + 1
    double rhs = 0.0;      // minus the central m2-difference quotient at alpha
    double residual = 0.0; // relative mismatch
};

// Checks that index raising under the scale-free extraction matches the
// negative mass derivative: alpha * extract(series at alpha+1) equals
// -d/dm2 extract(series at alpha), the central difference taken with
// step h. Passes when the relative residual is within 1e-5.
CommutationReport commutes_with_mass_derivative(const Params& p, const SchemeSpec& s, double h);

} // namespace series
} // namespace loopreg

#endif
