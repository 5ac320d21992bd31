#include "loopreg/dimreg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "loopreg/errors.hpp"
#include "loopreg/oracle.hpp"
#include "loopreg/specfun.hpp"

namespace loopreg {
namespace dimreg {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

double effective_alpha(const Params& p) {
    return p.two_mass() ? p.alpha + *p.beta : p.alpha;
}

double rel_err(const specfun::SpecValue& v) {
    return v.value != 0.0 ? v.abs_err / std::fabs(v.value) : 0.0;
}

} // namespace

const char* verdict_name(VerdictKind k) {
    switch (k) {
    case VerdictKind::convergent: return "convergent";
    case VerdictKind::continued: return "continued";
    case VerdictKind::pole: return "pole";
    case VerdictKind::unsupported: return "unsupported";
    }
    return "?";
}

DomainVerdict classify(const Params& p) {
    if (!std::isfinite(p.d) || !std::isfinite(p.alpha) || !std::isfinite(p.m2) ||
        (p.beta && !std::isfinite(*p.beta)) || (p.M2 && !std::isfinite(*p.M2)))
        return {VerdictKind::unsupported, "non-finite parameter"};
    if (!(p.d > 0.0))
        return {VerdictKind::unsupported, "d <= 0 is outside the supported dimension range"};

    const double a = effective_alpha(p);
    const double x = a - p.d / 2.0;
    const double k = std::round(x);
    if (k <= 0.0 && std::fabs(x - k) < pole_tolerance)
        return {VerdictKind::pole, "alpha - d/2 = " + std::to_string(x) +
                                       " lies on a non-positive integer"};
    if (2.0 * a - p.d > 0.0)
        return {VerdictKind::convergent, "2*alpha - d > 0: defining integral converges"};
    return {VerdictKind::continued, "value defined by analytic continuation"};
}

EvalResult master_one_loop(const Params& p) {
    const DomainVerdict v = classify(p);
    if (v.kind == VerdictKind::pole) {
        const double x = effective_alpha(p) - p.d / 2.0;
        const double k = std::round(x);
        throw PoleError("master_one_loop", k, std::fabs(x - k));
    }
    if (v.kind == VerdictKind::unsupported)
        throw DomainError("master_one_loop: " + v.reason);
    if (!(p.m2 > 0.0))
        throw DomainError("master_one_loop: needs m2 > 0 (scaleless values are a "
                          "separate, explicit operation)");
    if (p.two_mass())
        throw DomainError("master_one_loop: two-mass points go through two_mass_master");

    const specfun::SpecValue g = specfun::gamma(p.alpha - p.d / 2.0);
    const double rg = specfun::rgamma(p.alpha);
    const double powers =
        std::pow(p.m2, p.d / 2.0 - p.alpha) * std::pow(4.0 * M_PI, -p.d / 2.0);
    const double value = powers * g.value * rg;
    const double rel = rel_err(g) +
                       eps * (4.0 + std::fabs((p.d / 2.0 - p.alpha) * std::log(p.m2)) +
                              p.d / 2.0 * std::log(4.0 * M_PI));
    return {value, std::fabs(value) * rel, Provenance::closed_form, ""};
}

EvalResult veltman_scaleless(double d, double alpha) {
    (void)d;
    (void)alpha;
    return {0.0, 0.0, Provenance::closed_form, "Veltman/Hadamard"};
}

EvalResult lower_index(const Params& p) {
    Params up = p;
    up.alpha += 1.0;
    for (const Params* q : {&p, static_cast<const Params*>(&up)}) {
        const DomainVerdict v = classify(*q);
        if (v.kind == VerdictKind::pole) {
            const double x = q->alpha - q->d / 2.0;
            const double k = std::round(x);
            throw PoleError("lower_index", k, std::fabs(x - k));
        }
        if (v.kind == VerdictKind::unsupported)
            throw DomainError("lower_index: " + v.reason);
    }

    const EvalResult raised = master_one_loop(up);
    EvalResult out{p.alpha * raised.value, std::fabs(p.alpha) * raised.abs_err,
                   Provenance::closed_form, ""};

    const double h = 1e-5 * p.m2;
    Params plus = p, minus = p;
    plus.m2 += h;
    minus.m2 -= h;
    const double fd =
        -(master_one_loop(plus).value - master_one_loop(minus).value) / (2.0 * h);
    const double denom = std::max({std::fabs(out.value), std::fabs(fd), 1e-300});
    const double residual = std::fabs(out.value - fd) / denom;
    if (residual > 1e-6)
        throw RecurrenceViolation(
            "lower_index: index step disagrees with the mass derivative: residual = " +
            std::to_string(residual));
    return out;
}

EvalResult two_mass_master(const Params& p) {
    if (!p.two_mass())
        throw DomainError("two_mass_master: needs beta and M2");
    if (!(p.m2 > 0.0) || !(*p.M2 >= p.m2))
        throw DomainError("two_mass_master: needs M2 >= m2 > 0 (swap the propagators "
                          "to restore the mass ordering)");
    const DomainVerdict v = classify(p);
    if (v.kind == VerdictKind::pole) {
        const double x = effective_alpha(p) - p.d / 2.0;
        const double k = std::round(x);
        throw PoleError("two_mass_master", k, std::fabs(x - k));
    }
    if (v.kind == VerdictKind::unsupported)
        throw DomainError("two_mass_master: " + v.reason);

    const double ab = p.alpha + *p.beta;
    const double z = 1.0 - p.m2 / *p.M2;
    const specfun::SpecValue g = specfun::gamma(ab - p.d / 2.0);
    const double rg = specfun::rgamma(ab);
    const specfun::SpecValue f = specfun::hyp2f1(ab - p.d / 2.0, p.alpha, ab, z);
    const double powers =
        std::pow(*p.M2, p.d / 2.0 - ab) * std::pow(4.0 * M_PI, -p.d / 2.0);
    const double value = powers * g.value * rg * f.value;
    const double rel = rel_err(g) + rel_err(f) + 8.0 * eps;
    return {value, std::fabs(value) * rel, Provenance::closed_form, ""};
}

EvalResult two_mass_series(const Params& p, long n_max) {
    if (!p.two_mass())
        throw DomainError("two_mass_series: needs beta and M2");
    if (!(p.m2 > 0.0) || !(*p.M2 >= p.m2))
        throw DomainError("two_mass_series: needs M2 >= m2 > 0");
    if (n_max < 1)
        throw DomainError("two_mass_series: n_max must be >= 1");
    const DomainVerdict v = classify(p);
    if (v.kind == VerdictKind::pole) {
        const double x = effective_alpha(p) - p.d / 2.0;
        const double k = std::round(x);
        throw PoleError("two_mass_series", k, std::fabs(x - k));
    }
    if (v.kind == VerdictKind::unsupported)
        throw DomainError("two_mass_series: " + v.reason);

    const double d = p.d, alpha = p.alpha, beta = *p.beta;
    const double m2 = p.m2, M2 = *p.M2;
    const double half_measure = oracle::radial_measure(d) / 2.0;

    // Finite piece: u in [0, M2], mapped to w = u / M2.
    oracle::QuadratureRequest req;
    req.integrand = [d, alpha, beta, m2, M2](double w) {
        return std::pow(w, d / 2.0 - 1.0) * std::pow(M2 * w + m2, -alpha) *
               std::pow(w + 1.0, -beta);
    };
    req.a = 0.0;
    req.b = 1.0;
    req.rel_tol = 1e-12;
    req.abs_tol = 0.0;
    const oracle::QuadratureResult q = oracle::integrate(req);
    const double head = half_measure * std::pow(M2, d / 2.0 - beta) * q.value;

    // Tail beyond u = M2, each inner sum accelerated.
    const long budget = std::max<long>(n_max, 48);
    const double ratio = m2 / M2;
    double binom_a = 1.0;
    auto outer = [&](long n) mutable -> double {
        if (n > 0)
            binom_a *= (-alpha - double(n) + 1.0) / double(n);
        double binom_b = 1.0;
        auto inner = [&, n](long k) mutable -> double {
            if (k > 0)
                binom_b *= (-beta - double(k) + 1.0) / double(k);
            return binom_b / (d / 2.0 - alpha - beta - double(n) - double(k));
        };
        const specfun::AltSum sk = specfun::alt_sum(inner, budget);
        return binom_a * std::pow(ratio, double(n)) * sk.value;
    };
    const specfun::AltSum sn = specfun::alt_sum(outer, budget);

    const double tail_scale = half_measure * std::pow(M2, d / 2.0 - alpha - beta);
    const double value = head - tail_scale * sn.value;
    const double abs_err = half_measure * std::pow(M2, d / 2.0 - beta) * q.err_est +
                           std::fabs(tail_scale) * (sn.abs_err + 64.0 * eps * std::fabs(sn.value));
    return {value, abs_err, Provenance::series,
            "finite-range quadrature piece plus accelerated double tail sum"};
}

} // namespace dimreg
} // namespace loopreg
