#ifndef LOOPREG_DIMREG_HPP
#define LOOPREG_DIMREG_HPP

#include <string>

#include "loopreg/types.hpp"

namespace loopreg {
namespace dimreg {

enum class VerdictKind { convergent, continued, pole, unsupported };
const char* verdict_name(VerdictKind k);

struct DomainVerdict {
    VerdictKind kind = VerdictKind::unsupported;
    std::string reason;
};

// Total, pure classification of a parameter point. With both propagator
// powers present the effective power is alpha + beta.
//   unsupported : d <= 0 or non-finite inputs
//   pole        : alpha - d/2 within pole_tolerance of a non-positive integer
//   convergent  : 2*alpha - d > 0 strictly (defining integral converges)
//   continued   : everything else (value defined by analytic continuation)
DomainVerdict classify(const Params& p);

// The analytically continued one-loop value
//   (m2)^(d/2 - alpha) (4 pi)^(-d/2) Gamma(alpha - d/2) / Gamma(alpha).
// Requires m2 > 0; throws PoleError at pole verdicts and DomainError for
// unsupported ones.
EvalResult master_one_loop(const Params& p);

// Scaleless integrals carry the value zero by convention; returned
// explicitly (never silently substituted for a massive evaluation).
EvalResult veltman_scaleless(double d, double alpha);

// alpha * master at alpha+1, cross-checked against the negative central
// finite difference of master in m2 at step 1e-5*m2; throws
// RecurrenceViolation when the two routes disagree beyond 1e-6 relative.
EvalResult lower_index(const Params& p);

// Two-propagator master value via the Gauss hypergeometric closed form;
// requires M2 >= m2 > 0 (callers swap using the integrand symmetry).
EvalResult two_mass_master(const Params& p);

// The same value through the split form: a finite-range quadrature piece
// plus an accelerated double tail sum with n_max terms per index.
EvalResult two_mass_series(const Params& p, long n_max = 40);

} // namespace dimreg
} // namespace loopreg

#endif
