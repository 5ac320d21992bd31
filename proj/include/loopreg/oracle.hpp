#ifndef LOOPREG_ORACLE_HPP
#define LOOPREG_ORACLE_HPP

#include <cstdint>
#include <functional>

#include "loopreg/types.hpp"

namespace loopreg {
namespace oracle {

enum class Decay { power, exponential, gaussian };

// Integration request over [a, b] (finite) or [a, inf) (semi-infinite).
// Semi-infinite domains are mapped to a finite interval first: power decay
// through the rational stretch t = a + (x/(1-x))^3, exponential/gaussian
// decay through the double-exponential map t = a + exp((pi/2) sinh u).
struct QuadratureRequest {
    std::function<double(double)> integrand;
    double a = 0.0;
    double b = 0.0;            // ignored when semi_infinite
    bool semi_infinite = false;
    Decay decay = Decay::power;
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 10000;
};

struct QuadratureResult {
    double value = 0.0;
    double err_est = 0.0;
    int subdivisions_used = 0;
    bool converged = false;
};

// Adaptive Gauss-Kronrod 7/15 with a worst-interval heap. The rule has no
// endpoint nodes, so integrable endpoint singularities only cost extra
// subdivision. Throws NonConvergence when the budget is exhausted with the
// error estimate still above tolerance; a returned result is always trusted.
QuadratureResult integrate(const QuadratureRequest& req);

// Angular volume over the momentum-space normalization: Omega_d / (2 pi)^d
// = 2 / ((4 pi)^(d/2) Gamma(d/2)).
double radial_measure(double d);

// Direct quadrature of a scheme family's regularized radial integral,
// with the measure above folded into value and error estimate. Ground
// truth for every scheme evaluation. Demo families integrate the bare
// radial-reduced integrand of their defining displays (no measure factor).
QuadratureResult scheme_oracle(const Params& p, const SchemeSpec& s, double tol = 1e-10);

} // namespace oracle
} // namespace loopreg

#endif
