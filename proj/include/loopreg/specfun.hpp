#ifndef LOOPREG_SPECFUN_HPP
#define LOOPREG_SPECFUN_HPP

#include <functional>

namespace loopreg {
namespace specfun {

enum class Method { series, integral_representation, recurrence, reflection, closed_form };

const char* method_name(Method m);

// Value, an honest absolute-error estimate, and which route produced it.
struct SpecValue {
    double value = 0.0;
    double abs_err = 0.0;
    Method method = Method::closed_form;
};

// Gamma function on the real axis. Relative accuracy a comfortable margin
// under 1e-12 for |x| <= 50. Arguments within pole_tolerance of a
// non-positive integer raise PoleError.
SpecValue gamma(double x);

// 1/Gamma(x); exactly 0 at (and within pole_tolerance of) the poles.
// The natural form for gamma factors appearing in denominators.
double rgamma(double x);

// Rising factorial (x)_n, n >= 0.
SpecValue pochhammer(double x, long n);

// Generalized binomial coefficient C(r, n) = r(r-1)...(r-n+1)/n!.
double binom(double r, long n);

// Result of the accelerated alternating-series summation below.
struct AltSum {
    double value = 0.0;
    double abs_err = 0.0;
    long terms_used = 0;
};

// Sums sum_{n>=0} term(n) for series whose terms eventually alternate in
// sign with smoothly varying magnitude (the binomial-series tails used
// throughout). Leading terms are added directly until strict alternation
// sets in; the remainder goes through an Euler transform, which also sums
// the oscillatory cases that only converge in the Abel sense. term() is
// called with n strictly increasing, so stateful lambdas are fine.
// abs_err combines the final transform increment with a machine floor
// proportional to the largest tail term (the cancellation limit).
AltSum alt_sum(const std::function<double(long)>& term, long budget);

// Beta function through the expansion
//   B(x,y) = sum_n C(-(x+y), n) [1/(x+n) + 1/(y+n)],
// terms symmetric in x <-> y bitwise. n_terms caps the total number of
// terms consumed. Agrees with gamma(x) gamma(y) / gamma(x+y) within the
// combined error bars.
SpecValue beta_series(double x, double y, long n_terms = 400);

// Gauss hypergeometric 2F1(a, b; c; z) for z <= 1 - z_margin.
//   z in (-1, 1 - z_margin): power series (after a Pfaff map on (-1, -0.7],
//   which keeps the evaluation a power series at a better argument);
//   z <= -1: Euler integral representation under the quadrature contract.
// Terminating polynomial cases (a or b a non-positive integer) are summed
// exactly for any z.
SpecValue hyp2f1(double a, double b, double c, double z);

inline constexpr double z_margin = 1e-6;

// Tricomi confluent function U(a, b, z), z > 0, via the two-branch
// connection formula through 1F1. Integer b degenerates the connection
// formula; when a > 0 the defining integral
//   U(a,b,z) = (1/Gamma(a)) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt
// takes over, otherwise PoleError.
SpecValue tricomi_u(double a, double b, double z);

// Generalized exponential integral of real order,
//   E_omega(x) = int_1^inf e^{-xt} t^{-omega} dt,
// for x > 0 (any omega) or x = 0 (omega > 1, where it is 1/(omega-1)).
SpecValue expint(double omega, double x);

// Modified Bessel K_nu(x), x > 0, from the cosh integral representation
//   K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt.
// Even in nu by construction.
SpecValue bessel_k(double nu, double x);

// First Appell function F1(a; b1, b2; c; v, w) for v, w < 1 via its
// single-integral representation, requiring c > a > 0:
//   F1 = Gamma(c)/(Gamma(a)Gamma(c-a))
//        int_0^1 x^{a-1} (1-x)^{c-a-1} (1-xv)^{-b1} (1-xw)^{-b2} dx.
SpecValue appell_f1(double a, double b1, double b2, double c, double v, double w);

} // namespace specfun
} // namespace loopreg

#endif
