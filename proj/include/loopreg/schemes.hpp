#ifndef LOOPREG_SCHEMES_HPP
#define LOOPREG_SCHEMES_HPP

#include "loopreg/series.hpp"
#include "loopreg/types.hpp"

namespace loopreg {
namespace schemes {

// Value/expansion pair returned by the two-mass operations.
struct SchemeSplit {
    EvalResult value;
    series::FormalSeries expansion;
};

// Sharp-cutoff value through the Gauss hypergeometric closed form.
// Finite for every real alpha with K > 0, m2 > 0, d > 0.
EvalResult cutoff_eval(const Params& p, const SchemeSpec& s);

// Large-K expansion: the scale-free part is exactly one term carrying the
// dimensionally continued value; the K-tagged terms carry the symbolic
// exponent d - 2*alpha - 2n. Needs K^2 > m2; throws PoleError when a
// denominator d/2 - alpha - n vanishes for some n <= n_max (evaluate at a
// nearby non-integer dimension instead; no automatic log resummation).
series::FormalSeries cutoff_series(const Params& p, const SchemeSpec& s, long n_max = 40);

// Gaussian-damped value through the confluent hypergeometric (second kind)
// closed form.
EvalResult gaussian_eval(const Params& p, const SchemeSpec& s);

// Small-delta expansion with two branches: integer powers of delta whose
// leading term is the continued value, and the mirror branch with symbolic
// exponents alpha - d/2 + n. Needs delta*m2 < 1 and non-integer alpha - d/2.
series::FormalSeries gaussian_series(const Params& p, const SchemeSpec& s, long n_max = 40);

// Two-propagator cutoff: value through the first Appell function, series
// with K-free part equal to the two-mass continued value. Needs
// K^2 > M2 >= m2 > 0.
SchemeSplit two_mass_cutoff(const Params& p, const SchemeSpec& s, long n_max = 40);

// Two-propagator Gaussian: no special-function closed form exists, so the
// value is quadrature ground truth; the expansion combines finite-range
// quadrature pieces with accelerated tail sums and carries the continued
// value as its delta-free content. Needs delta*M2 < 1.
SchemeSplit two_mass_gaussian(const Params& p, const SchemeSpec& s, long n_max = 40);

// Momentum window [1/K, K]; the massive case is the exact difference of
// two cutoff evaluations, the massless case a closed form. K = 1 is the
// degenerate empty window with value exactly 0.
EvalResult ir_window_eval(const Params& p, const SchemeSpec& s);

// Gaussian UV damping with the momentum region below delta removed;
// evaluated by quadrature of the defining integral.
EvalResult gaussian_ir_eval(const Params& p, const SchemeSpec& s);

// Damping e^(-delta p^2 - xi / p^2) on the full momentum range, evaluated
// by quadrature; with xi = delta (family two_sided_gaussian) both scales
// coincide. The massless value has an exact Bessel-K cross-check.
EvalResult two_sided_eval(const Params& p, const SchemeSpec& s);

// Momentum window [delta, K] as an exact difference of cutoff evaluations
// (closed form when massless).
EvalResult separate_cutoff_eval(const Params& p, const SchemeSpec& s);

enum class DemoKind { mellin, quartic };

// The two deliberately incomplete regulators, quarantined behind
// provenance = demo. The Mellin monomial regulator throws DivergentInput
// for alpha <= 0 (its documented failure region); the quartic-denominator
// regulator is fixed to the d = 3, alpha = 1 radial shape and needs
// 0 < a < 1/4.
EvalResult incomplete_demo(DemoKind kind, const Params& p, const SchemeSpec& s);

// Family dispatch: evaluate any scheme (two-mass parameter sets route to
// the two-mass operations, demo families to incomplete_demo).
EvalResult scheme_eval(const Params& p, const SchemeSpec& s);

// Family dispatch for expansions in the regulator scales. Every non-demo
// family is covered; windowed and two-sided families assemble their terms
// from the cutoff/gaussian building blocks plus their own boundary pieces.
// The scale-free content always reduces to the dimensionally continued
// value. Two-sided expansions additionally need d/2 away from integers.
series::FormalSeries scheme_series(const Params& p, const SchemeSpec& s, long n_max = 40);

} // namespace schemes
} // namespace loopreg

#endif
