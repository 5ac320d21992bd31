#include "loopreg/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "loopreg/dimreg.hpp"
#include "loopreg/errors.hpp"
#include "loopreg/oracle.hpp"
#include "loopreg/specfun.hpp"

namespace loopreg {

const char* family_name(Family f) {
    switch (f) {
    case Family::cutoff_uv: return "cutoff";
    case Family::gaussian_uv: return "gaussian";
    case Family::ir_window: return "ir_window";
    case Family::gaussian_ir: return "gaussian_ir";
    case Family::two_sided_gaussian: return "two_sided";
    case Family::separate_cutoff: return "separate_cutoff";
    case Family::separate_two_sided: return "separate_two_sided";
    case Family::mellin_demo: return "mellin";
    case Family::quartic_demo: return "quartic";
    }
    return "unknown";
}

const char* provenance_name(Provenance p) {
    switch (p) {
    case Provenance::closed_form: return "closed_form";
    case Provenance::series: return "series";
    case Provenance::quadrature: return "quadrature";
    case Provenance::demo: return "demo";
    }
    return "unknown";
}

void SchemeSpec::validate() const {
    const std::string fn = family_name(family);
    auto need = [&](const std::optional<double>& v, const char* name) {
        if (!v.has_value()) throw DomainError(fn + ": scale " + name + " must be set");
        if (!std::isfinite(*v)) throw DomainError(fn + ": scale " + name + " must be finite");
    };
    auto need_positive = [&](const std::optional<double>& v, const char* name) {
        need(v, name);
        if (!(*v > 0.0)) throw DomainError(fn + ": scale " + name + " must be > 0");
    };
    auto absent = [&](const std::optional<double>& v, const char* name) {
        if (v.has_value()) throw DomainError(fn + ": scale " + name + " must not be set");
    };
    switch (family) {
    case Family::cutoff_uv:
        need_positive(K, "K");
        absent(delta, "delta"); absent(xi, "xi"); absent(z, "z"); absent(a, "a");
        break;
    case Family::gaussian_uv:
    case Family::gaussian_ir:
    case Family::two_sided_gaussian:
        need_positive(delta, "delta");
        absent(K, "K"); absent(xi, "xi"); absent(z, "z"); absent(a, "a");
        break;
    case Family::ir_window:
        need_positive(K, "K");
        if (!(*K >= 1.0)) throw DomainError("ir_window: needs K >= 1 (K = 1 is the empty window)");
        absent(delta, "delta"); absent(xi, "xi"); absent(z, "z"); absent(a, "a");
        break;
    case Family::separate_cutoff:
        need_positive(K, "K");
        need_positive(delta, "delta");
        if (!(*K > *delta)) throw DomainError("separate_cutoff: needs K > delta");
        absent(xi, "xi"); absent(z, "z"); absent(a, "a");
        break;
    case Family::separate_two_sided:
        need_positive(delta, "delta");
        need_positive(xi, "xi");
        absent(K, "K"); absent(z, "z"); absent(a, "a");
        break;
    case Family::mellin_demo:
        need(z, "z");
        absent(K, "K"); absent(delta, "delta"); absent(xi, "xi"); absent(a, "a");
        break;
    case Family::quartic_demo:
        need_positive(a, "a");
        absent(K, "K"); absent(delta, "delta"); absent(xi, "xi"); absent(z, "z");
        break;
    }
}

namespace schemes {

using series::FormalSeries;
using series::Rational;
using series::Scale;
using series::SymbolicExponent;
using series::Term;

namespace {

const double four_pi = 4.0 * M_PI;

double half_measure(double d) { return oracle::radial_measure(d) / 2.0; }

void check_point(const Params& p, const char* fn, bool allow_massless) {
    if (!(std::isfinite(p.d) && std::isfinite(p.alpha) && std::isfinite(p.m2)))
        throw DomainError(std::string(fn) + ": non-finite parameters");
    if (!(p.d > 0.0)) throw DomainError(std::string(fn) + ": needs d > 0");
    if (allow_massless) {
        if (!(p.m2 >= 0.0)) throw DomainError(std::string(fn) + ": needs m2 >= 0");
    } else {
        if (!(p.m2 > 0.0)) throw DomainError(std::string(fn) + ": needs m2 > 0");
    }
}

void require_single_mass(const Params& p, const char* fn) {
    if (p.two_mass())
        throw DomainError(std::string(fn) +
                          ": two-mass parameter sets route through the two-mass operations");
}

void check_two_mass(const Params& p, const char* fn) {
    if (!p.two_mass()) throw DomainError(std::string(fn) + ": needs beta and M2 set");
    if (!(std::isfinite(p.d) && std::isfinite(p.alpha) && std::isfinite(p.m2) &&
          std::isfinite(*p.beta) && std::isfinite(*p.M2)))
        throw DomainError(std::string(fn) + ": non-finite parameters");
    if (!(p.d > 0.0)) throw DomainError(std::string(fn) + ": needs d > 0");
    if (!(p.m2 > 0.0)) throw DomainError(std::string(fn) + ": needs m2 > 0");
    if (!(*p.M2 >= p.m2))
        throw DomainError(std::string(fn) +
                          ": mass ordering is M2 >= m2 > 0; swap the two propagators to reorder");
}

void require_family(const SchemeSpec& s, Family f, const char* fn) {
    if (s.family != f)
        throw DomainError(std::string(fn) + ": expects family " + family_name(f) + ", got " +
                          family_name(s.family));
    s.validate();
}

// PoleError when x sits within pole_tolerance of an integer in [lo, hi].
void screen_integers_in(double x, double lo, double hi, const char* fn) {
    const double r = std::round(x);
    if (r >= lo - 0.5 && r <= hi + 0.5 && std::fabs(x - r) < pole_tolerance)
        throw PoleError(fn, r, std::fabs(x - r));
}

void screen_any_integer(double x, const char* fn) {
    const double r = std::round(x);
    if (std::fabs(x - r) < pole_tolerance) throw PoleError(fn, r, std::fabs(x - r));
}

SymbolicExponent lin_exp(Rational c0, Rational cd, Rational ca, Rational cb) {
    SymbolicExponent e;
    e.c0 = c0;
    e.cd = cd;
    e.ca = ca;
    e.cb = cb;
    return e;
}

Term const_term(double coeff) {
    Term t;
    t.coeff = coeff;
    return t;
}

Term power_term(double coeff, Scale sc, SymbolicExponent e) {
    Term t;
    t.coeff = coeff;
    t.exponent[int(sc)] = e;
    return t;
}

Term power_term2(double coeff, Scale s1, SymbolicExponent e1, Scale s2, SymbolicExponent e2) {
    Term t;
    t.coeff = coeff;
    t.exponent[int(s1)] = e1;
    t.exponent[int(s2)] = e2;
    return t;
}

std::map<std::string, double> spec_scales(const SchemeSpec& s) {
    std::map<std::string, double> sv;
    if (s.K) sv["K"] = *s.K;
    if (s.delta) sv["delta"] = *s.delta;
    if (s.xi) sv["xi"] = *s.xi;
    return sv;
}

// |numeric value| of a single term at the series' own parameter context.
double term_magnitude(const FormalSeries& ctx, const Term& t,
                      const std::map<std::string, double>& sv) {
    FormalSeries one;
    one.d = ctx.d;
    one.alpha = ctx.alpha;
    one.beta = ctx.beta;
    one.terms.push_back(t);
    return std::fabs(series::eval_at(one, sv));
}

// Shared truncation sanity gate: the final retained term of the deepest
// block must be small against the running total at the given scales.
FormalSeries finish_series(FormalSeries fs, const std::map<std::string, double>& sv,
                           double tail_mag, const char* fn) {
    const double total = std::fabs(series::eval_at(fs, sv));
    if (tail_mag > 1e-3 * total)
        throw NonConvergence(std::string(fn) +
                             ": final retained term is not small against the running total at "
                             "the given scales; outside the asymptotic regime or n_max too low");
    return series::normalize(fs);
}

EvalResult from_oracle(const Params& p, const SchemeSpec& s) {
    const oracle::QuadratureResult q = oracle::scheme_oracle(p, s, 1e-11);
    EvalResult r;
    r.value = q.value;
    r.abs_err = q.err_est;
    r.provenance = Provenance::quadrature;
    return r;
}

// UV tail common to the hard-cutoff family: terms
//   hm * C(-alpha, n) m2^n / (d/2 - alpha - n) * K^(d - 2 alpha - 2n).
// Returns the magnitude of the final appended term at the given scales.
double append_uv_tail(FormalSeries& fs, const Params& p, long n_max,
                      const std::map<std::string, double>& sv, const char* fn) {
    const double h = p.d / 2.0;
    screen_integers_in(h - p.alpha, 0.0, double(n_max), fn);
    const double hm = half_measure(p.d);
    double last = 0.0;
    for (long n = 0; n <= n_max; ++n) {
        const double c = hm * specfun::binom(-p.alpha, n) * std::pow(p.m2, double(n)) /
                         (h - p.alpha - double(n));
        const Term t = power_term(
            c, Scale::K, lin_exp(Rational(-2 * n), Rational(1), Rational(-2), Rational(0)));
        fs.terms.push_back(t);
        if (n == n_max) last = term_magnitude(fs, t, sv);
    }
    return last;
}

// Window boundary tail below the mass scale: minus the small-X cutoff
// expansion, terms -hm * C(-alpha, n) m2^(-alpha - n) / (d/2 + n) * X^(d + 2n)
// placed on `sc` with exponent sign `inverse` (X = 1/K) or not (X = delta).
double append_low_tail(FormalSeries& fs, const Params& p, long n_max, Scale sc, bool inverse,
                       const std::map<std::string, double>& sv) {
    const double h = p.d / 2.0;
    const double hm = half_measure(p.d);
    double last = 0.0;
    for (long n = 0; n <= n_max; ++n) {
        const double c = -hm * specfun::binom(-p.alpha, n) * std::pow(p.m2, -p.alpha - double(n)) /
                         (h + double(n));
        const SymbolicExponent e =
            inverse ? lin_exp(Rational(-2 * n), Rational(-1), Rational(0), Rational(0))
                    : lin_exp(Rational(2 * n), Rational(1), Rational(0), Rational(0));
        const Term t = power_term(c, sc, e);
        fs.terms.push_back(t);
        if (n == n_max) last = term_magnitude(fs, t, sv);
    }
    return last;
}

// Both branches of the Gaussian-damping expansion: integer powers of delta
// whose n = 0 coefficient is the continued value, and the mirror branch
// with exponents alpha - d/2 + n.
double append_gaussian_branches(FormalSeries& fs, const Params& p, long n_max, double /*dl*/,
                                const std::map<std::string, double>& sv, const char* fn) {
    const double h = p.d / 2.0;
    screen_any_integer(p.alpha - h, fn);
    const EvalResult master = dimreg::master_one_loop(p);
    double tail = 0.0;
    double c = master.value;
    for (long n = 0; n <= n_max; ++n) {
        if (n > 0) c *= (h + double(n) - 1.0) * p.m2 / ((h - p.alpha + double(n)) * double(n));
        const Term t =
            power_term(c, Scale::delta, lin_exp(Rational(n), Rational(0), Rational(0), Rational(0)));
        fs.terms.push_back(t);
        if (n == n_max) tail = std::max(tail, term_magnitude(fs, t, sv));
    }
    const double hm = half_measure(p.d);
    for (long n = 0; n <= n_max; ++n) {
        const double g = specfun::gamma(h - p.alpha - double(n)).value;
        const double cB = hm * specfun::binom(-p.alpha, n) * std::pow(p.m2, double(n)) * g;
        const Term t = power_term(
            cB, Scale::delta, lin_exp(Rational(n), Rational(-1, 2), Rational(1), Rational(0)));
        fs.terms.push_back(t);
        if (n == n_max) tail = std::max(tail, term_magnitude(fs, t, sv));
    }
    return tail;
}

void fold_xi_onto_delta(FormalSeries& fs) {
    constexpr int di = int(Scale::delta);
    constexpr int xii = int(Scale::xi);
    for (Term& t : fs.terms) {
        t.exponent[di] = t.exponent[di] + t.exponent[xii];
        t.log_power[di] += t.log_power[xii];
        t.exponent[xii] = SymbolicExponent{};
        t.log_power[xii] = 0;
    }
}

// All blocks of the two-sided expansion on separate delta/xi slots.
double append_two_sided_terms(FormalSeries& fs, const Params& p, long n_max, double dl,
                              double xi_val, const std::map<std::string, double>& sv,
                              const char* fn) {
    const double h = p.d / 2.0;
    const double hm = half_measure(p.d);
    double tail = 0.0;
    if (p.m2 == 0.0) {
        if (!(dl * xi_val < 1.0))
            throw DomainError(std::string(fn) + ": massless expansion needs delta*xi < 1");
        screen_any_integer(p.alpha - h, fn);
        for (long n = 0; n <= n_max; ++n) {
            const double fac = ((n % 2 == 0) ? 1.0 : -1.0) / std::tgamma(double(n) + 1.0);
            const Term tlow = power_term2(
                hm * fac * specfun::gamma(h - p.alpha - double(n)).value, Scale::delta,
                lin_exp(Rational(n), Rational(-1, 2), Rational(1), Rational(0)), Scale::xi,
                lin_exp(Rational(n), Rational(0), Rational(0), Rational(0)));
            const Term thigh = power_term2(
                hm * fac * specfun::gamma(p.alpha - h - double(n)).value, Scale::xi,
                lin_exp(Rational(n), Rational(1, 2), Rational(-1), Rational(0)), Scale::delta,
                lin_exp(Rational(n), Rational(0), Rational(0), Rational(0)));
            fs.terms.push_back(tlow);
            fs.terms.push_back(thigh);
            if (n == n_max) {
                tail = std::max(term_magnitude(fs, tlow, sv), term_magnitude(fs, thigh, sv));
            }
        }
        return tail;
    }
    if (!(dl * p.m2 < 1.0))
        throw DomainError(std::string(fn) + ": needs delta*m2 < 1 (small UV damping)");
    if (!(xi_val < p.m2))
        throw DomainError(std::string(fn) + ": needs xi < m2 (small IR damping)");
    screen_any_integer(h, fn);
    screen_any_integer(p.alpha - h, fn);
    // analytic block: both dampings expanded, the radial integral continued
    const long kj_cap = std::min(n_max, long(16));
    for (long k = 0; k <= kj_cap; ++k) {
        for (long j = 0; j + k <= kj_cap; ++j) {
            const double sgn = ((k + j) % 2 == 0) ? 1.0 : -1.0;
            const double fac =
                sgn / (std::tgamma(double(k) + 1.0) * std::tgamma(double(j) + 1.0));
            const specfun::SpecValue B =
                specfun::beta_series(h + double(k) - double(j), p.alpha - h - double(k) + double(j));
            const double c = hm * fac * std::pow(p.m2, h - p.alpha + double(k) - double(j)) * B.value;
            const Term t = power_term2(
                c, Scale::delta, lin_exp(Rational(k), Rational(0), Rational(0), Rational(0)),
                Scale::xi, lin_exp(Rational(j), Rational(0), Rational(0), Rational(0)));
            fs.terms.push_back(t);
            if (k + j == kj_cap) tail = std::max(tail, term_magnitude(fs, t, sv));
        }
    }
    // small-momentum remainder: xi keeps a symbolic power
    const long nk_cap = std::min(n_max, long(24));
    for (long k = 0; k <= nk_cap; ++k) {
        const double sgn_k = (k % 2 == 0) ? 1.0 : -1.0;
        const double kfac = sgn_k / std::tgamma(double(k) + 1.0);
        for (long n = 0; n + k <= nk_cap; ++n) {
            const double c = hm * kfac * specfun::binom(-p.alpha, n) *
                             std::pow(p.m2, -p.alpha - double(n)) *
                             specfun::gamma(-h - double(n) - double(k)).value;
            const Term t = power_term2(
                c, Scale::delta, lin_exp(Rational(k), Rational(0), Rational(0), Rational(0)),
                Scale::xi, lin_exp(Rational(n + k), Rational(1, 2), Rational(0), Rational(0)));
            fs.terms.push_back(t);
            if (n + k == nk_cap) tail = std::max(tail, term_magnitude(fs, t, sv));
        }
    }
    // large-momentum remainder: delta keeps a symbolic power
    for (long j = 0; j <= nk_cap; ++j) {
        const double sgn_j = (j % 2 == 0) ? 1.0 : -1.0;
        const double jfac = sgn_j / std::tgamma(double(j) + 1.0);
        for (long n = 0; n + j <= nk_cap; ++n) {
            const double c = hm * jfac * specfun::binom(-p.alpha, n) *
                             std::pow(p.m2, double(n)) *
                             specfun::gamma(h - p.alpha - double(n) - double(j)).value;
            const Term t = power_term2(
                c, Scale::xi, lin_exp(Rational(j), Rational(0), Rational(0), Rational(0)),
                Scale::delta,
                lin_exp(Rational(n + j), Rational(-1, 2), Rational(1), Rational(0)));
            fs.terms.push_back(t);
            if (n + j == nk_cap) tail = std::max(tail, term_magnitude(fs, t, sv));
        }
    }
    return tail;
}

FormalSeries context_series(const Params& p) {
    FormalSeries fs;
    fs.d = p.d;
    fs.alpha = p.alpha;
    if (p.two_mass()) fs.beta = *p.beta;
    return fs;
}

std::string note_text(const char* fmt, long a, long b = -1, long c = -1) {
    char buf[160];
    if (c >= 0)
        std::snprintf(buf, sizeof buf, fmt, a, b, c);
    else if (b >= 0)
        std::snprintf(buf, sizeof buf, fmt, a, b);
    else
        std::snprintf(buf, sizeof buf, fmt, a);
    return buf;
}

} // namespace

EvalResult cutoff_eval(const Params& p, const SchemeSpec& s) {
    require_family(s, Family::cutoff_uv, "cutoff_eval");
    require_single_mass(p, "cutoff_eval");
    check_point(p, "cutoff_eval", false);
    const double K = *s.K;
    const double h = p.d / 2.0;
    const specfun::SpecValue F = specfun::hyp2f1(p.alpha, h, 1.0 + h, -(K * K) / p.m2);
    const specfun::SpecValue g = specfun::gamma(1.0 + h);
    const double pref = std::pow(K, p.d) * std::pow(four_pi, -h) / (g.value * std::pow(p.m2, p.alpha));
    EvalResult r;
    r.value = pref * F.value;
    r.abs_err = std::fabs(pref) * F.abs_err +
                std::fabs(r.value) * (g.abs_err / g.value + 4e-15);
    r.provenance = Provenance::closed_form;
    return r;
}

EvalResult gaussian_eval(const Params& p, const SchemeSpec& s) {
    require_family(s, Family::gaussian_uv, "gaussian_eval");
    require_single_mass(p, "gaussian_eval");
    check_point(p, "gaussian_eval", false);
    const double h = p.d / 2.0;
    const specfun::SpecValue U = specfun::tricomi_u(h, h + 1.0 - p.alpha, p.m2 * *s.delta);
    const double pref = std::pow(p.m2, h - p.alpha) * std::pow(four_pi, -h);
    EvalResult r;
    r.value = pref * U.value;
    r.abs_err = pref * U.abs_err + 4e-15 * std::fabs(r.value);
    r.provenance = Provenance::closed_form;
    return r;
}

EvalResult ir_window_eval(const Params& p, const SchemeSpec& s) {
    require_family(s, Family::ir_window, "ir_window_eval");
    require_single_mass(p, "ir_window_eval");
    check_point(p, "ir_window_eval", true);
    const double K = *s.K;
    if (K == 1.0) {
        EvalResult r;
        r.provenance = Provenance::closed_form;
        r.note = "empty window";
        return r;
    }
    if (p.m2 == 0.0) {
        const double x = p.d / 2.0 - p.alpha;
        if (std::fabs(x) < pole_tolerance)
            throw PoleError("ir_window_eval", p.d / 2.0, std::fabs(x));
        const double hm = half_measure(p.d);
        EvalResult r;
        r.value = hm * (std::pow(K, 2.0 * x) - std::pow(K, -2.0 * x)) / x;
        r.abs_err = 1e-13 * std::fabs(r.value);
        r.provenance = Provenance::closed_form;
        return r;
    }
    SchemeSpec hi;
    hi.family = Family::cutoff_uv;
    hi.K = K;
    SchemeSpec lo = hi;
    lo.K = 1.0 / K;
    const EvalResult top = cutoff_eval(p, hi);
    const EvalResult bottom = cutoff_eval(p, lo);
    EvalResult r;
    r.value = top.value - bottom.value;
    r.abs_err = top.abs_err + bottom.abs_err;
    r.provenance = Provenance::closed_form;
    return r;
}

EvalResult separate_cutoff_eval(const Params& p, const SchemeSpec& s) {
    require_family(s, Family::separate_cutoff, "separate_cutoff_eval");
    require_single_mass(p, "separate_cutoff_eval");
    check_point(p, "separate_cutoff_eval", true);
    const double K = *s.K;
    const double dl = *s.delta;
    if (p.m2 == 0.0) {
        const double x = p.d / 2.0 - p.alpha;
        if (std::fabs(x) < pole_tolerance)
            throw PoleError("separate_cutoff_eval", p.d / 2.0, std::fabs(x));
        const double hm = half_measure(p.d);
        EvalResult r;
        r.value = hm * (std::pow(K, 2.0 * x) - std::pow(dl, 2.0 * x)) / x;
        r.abs_err = 1e-13 * std::fabs(r.value);
        r.provenance = Provenance::closed_form;
        return r;
    }
    SchemeSpec hi;
    hi.family = Family::cutoff_uv;
    hi.K = K;
    SchemeSpec lo = hi;
    lo.K = dl;
    const EvalResult top = cutoff_eval(p, hi);
    const EvalResult bottom = cutoff_eval(p, lo);
    EvalResult r;
    r.value = top.value - bottom.value;
    r.abs_err = top.abs_err + bottom.abs_err;
    r.provenance = Provenance::closed_form;
    return r;
}

EvalResult gaussian_ir_eval(const Params& p, const SchemeSpec& s) {
    require_family(s, Family::gaussian_ir, "gaussian_ir_eval");
    require_single_mass(p, "gaussian_ir_eval");
    check_point(p, "gaussian_ir_eval", true);
    return from_oracle(p, s);
}

EvalResult two_sided_eval(const Params& p, const SchemeSpec& s) {
    if (s.family != Family::two_sided_gaussian && s.family != Family::separate_two_sided)
        throw DomainError(std::string("two_sided_eval: expects family two_sided or ") +
                          "separate_two_sided, got " + family_name(s.family));
    s.validate();
    require_single_mass(p, "two_sided_eval");
    check_point(p, "two_sided_eval", true);
    return from_oracle(p, s);
}

EvalResult incomplete_demo(DemoKind kind, const Params& p, const SchemeSpec& s) {
    if (kind == DemoKind::mellin) {
        require_family(s, Family::mellin_demo, "incomplete_demo");
        require_single_mass(p, "incomplete_demo");
        check_point(p, "incomplete_demo", false);
        if (!(p.alpha > 0.0))
            throw DivergentInput(
                "incomplete_demo: the monomial regulator only shifts the large-momentum power; "
                "for alpha <= 0 the regulated integral still diverges");
        const double x = p.d / 2.0 + *s.z;
        const double y = p.alpha - x;
        const specfun::SpecValue B = specfun::beta_series(x, y);
        const double pref = std::pow(p.m2, x - p.alpha);
        EvalResult r;
        r.value = pref * B.value;
        r.abs_err = pref * B.abs_err + 4e-15 * std::fabs(r.value);
        r.provenance = Provenance::demo;
        return r;
    }
    require_family(s, Family::quartic_demo, "incomplete_demo");
    require_single_mass(p, "incomplete_demo");
    if (!(p.alpha > 0.0))
        throw DivergentInput(
            "incomplete_demo: a polynomial denominator cannot tame alpha <= 0; "
            "the regulated integral still diverges");
    if (!(std::fabs(p.d - 3.0) < 1e-12 && std::fabs(p.alpha - 1.0) < 1e-12))
        throw DomainError(
            "incomplete_demo: the quartic regulator is defined for the d = 3, alpha = 1 "
            "radial shape only");
    const double a = *s.a;
    if (!(a < 0.25)) throw DomainError("incomplete_demo: needs 0 < a < 1/4");
    const double root = std::sqrt(1.0 - 4.0 * a);
    const double wp = (1.0 + root) / (2.0 * a);
    const double wm = 1.0 / (a * wp); // the roots multiply to 1/a; avoids cancellation
    EvalResult r;
    r.value = (M_PI / (2.0 * a)) * (std::sqrt(wp) - std::sqrt(wm)) / (wp - wm);
    r.abs_err = 4e-15 * std::fabs(r.value);
    r.provenance = Provenance::demo;
    return r;
}

EvalResult scheme_eval(const Params& p, const SchemeSpec& s) {
    switch (s.family) {
    case Family::cutoff_uv:
        return p.two_mass() ? two_mass_cutoff(p, s).value : cutoff_eval(p, s);
    case Family::gaussian_uv:
        return p.two_mass() ? two_mass_gaussian(p, s).value : gaussian_eval(p, s);
    case Family::ir_window: return ir_window_eval(p, s);
    case Family::gaussian_ir: return gaussian_ir_eval(p, s);
    case Family::two_sided_gaussian:
    case Family::separate_two_sided: return two_sided_eval(p, s);
    case Family::separate_cutoff: return separate_cutoff_eval(p, s);
    case Family::mellin_demo: return incomplete_demo(DemoKind::mellin, p, s);
    case Family::quartic_demo: return incomplete_demo(DemoKind::quartic, p, s);
    }
    throw DomainError("scheme_eval: unknown family");
}

series::FormalSeries cutoff_series(const Params& p, const SchemeSpec& s, long n_max) {
    require_family(s, Family::cutoff_uv, "cutoff_series");
    require_single_mass(p, "cutoff_series");
    check_point(p, "cutoff_series", false);
    if (n_max < 0) throw DomainError("cutoff_series: needs n_max >= 0");
    const double K = *s.K;
    if (!(K * K > p.m2))
        throw DomainError("cutoff_series: needs K^2 > m2 (large-cutoff regime)");
    FormalSeries fs = context_series(p);
    const auto sv = spec_scales(s);
    const double tail = append_uv_tail(fs, p, n_max, sv, "cutoff_series");
    fs.terms.push_back(const_term(dimreg::master_one_loop(p).value));
    fs.truncation_note =
        note_text("cutoff tail truncated at n = %ld; first omitted power is K^(d - 2 alpha - %ld)",
                  n_max, 2 * (n_max + 1));
    return finish_series(std::move(fs), sv, tail, "cutoff_series");
}

series::FormalSeries gaussian_series(const Params& p, const SchemeSpec& s, long n_max) {
    require_family(s, Family::gaussian_uv, "gaussian_series");
    require_single_mass(p, "gaussian_series");
    check_point(p, "gaussian_series", false);
    if (n_max < 0) throw DomainError("gaussian_series: needs n_max >= 0");
    const double dl = *s.delta;
    if (!(dl * p.m2 < 1.0))
        throw DomainError("gaussian_series: needs delta*m2 < 1 (small-damping regime)");
    FormalSeries fs = context_series(p);
    const auto sv = spec_scales(s);
    const double tail = append_gaussian_branches(fs, p, n_max, dl, sv, "gaussian_series");
    fs.truncation_note = note_text("both damping branches truncated at n = %ld", n_max);
    return finish_series(std::move(fs), sv, tail, "gaussian_series");
}

namespace {

FormalSeries ir_window_series(const Params& p, const SchemeSpec& s, long n_max) {
    require_family(s, Family::ir_window, "ir_window_series");
    require_single_mass(p, "ir_window_series");
    check_point(p, "ir_window_series", true);
    if (n_max < 0) throw DomainError("ir_window_series: needs n_max >= 0");
    const double K = *s.K;
    FormalSeries fs = context_series(p);
    const auto sv = spec_scales(s);
    if (p.m2 == 0.0) {
        const double x = p.d / 2.0 - p.alpha;
        if (std::fabs(x) < pole_tolerance)
            throw PoleError("ir_window_series", p.d / 2.0, std::fabs(x));
        const double hm = half_measure(p.d);
        fs.terms.push_back(power_term(
            hm / x, Scale::K, lin_exp(Rational(0), Rational(1), Rational(-2), Rational(0))));
        fs.terms.push_back(power_term(
            -hm / x, Scale::K, lin_exp(Rational(0), Rational(-1), Rational(2), Rational(0))));
        fs.truncation_note = "exact closed form; nothing truncated";
        return finish_series(std::move(fs), sv, 0.0, "ir_window_series");
    }
    if (!(K * K > p.m2))
        throw DomainError("ir_window_series: needs K^2 > m2 (wide-window regime)");
    if (!(K * K * p.m2 > 1.0))
        throw DomainError("ir_window_series: needs K^2 m2 > 1 (wide-window regime)");
    double tail = append_uv_tail(fs, p, n_max, sv, "ir_window_series");
    tail = std::max(tail, append_low_tail(fs, p, n_max, Scale::K, true, sv));
    fs.terms.push_back(const_term(dimreg::master_one_loop(p).value));
    fs.truncation_note = note_text("window edge tails truncated at n = %ld", n_max);
    return finish_series(std::move(fs), sv, tail, "ir_window_series");
}

FormalSeries separate_cutoff_series(const Params& p, const SchemeSpec& s, long n_max) {
    require_family(s, Family::separate_cutoff, "separate_cutoff_series");
    require_single_mass(p, "separate_cutoff_series");
    check_point(p, "separate_cutoff_series", true);
    if (n_max < 0) throw DomainError("separate_cutoff_series: needs n_max >= 0");
    const double K = *s.K;
    const double dl = *s.delta;
    FormalSeries fs = context_series(p);
    const auto sv = spec_scales(s);
    if (p.m2 == 0.0) {
        const double x = p.d / 2.0 - p.alpha;
        if (std::fabs(x) < pole_tolerance)
            throw PoleError("separate_cutoff_series", p.d / 2.0, std::fabs(x));
        const double hm = half_measure(p.d);
        fs.terms.push_back(power_term(
            hm / x, Scale::K, lin_exp(Rational(0), Rational(1), Rational(-2), Rational(0))));
        fs.terms.push_back(power_term(
            -hm / x, Scale::delta, lin_exp(Rational(0), Rational(1), Rational(-2), Rational(0))));
        fs.truncation_note = "exact closed form; nothing truncated";
        return finish_series(std::move(fs), sv, 0.0, "separate_cutoff_series");
    }
    if (!(K * K > p.m2))
        throw DomainError("separate_cutoff_series: needs K^2 > m2 (wide-window regime)");
    if (!(dl * dl < p.m2))
        throw DomainError("separate_cutoff_series: needs delta^2 < m2 (wide-window regime)");
    double tail = append_uv_tail(fs, p, n_max, sv, "separate_cutoff_series");
    tail = std::max(tail, append_low_tail(fs, p, n_max, Scale::delta, false, sv));
    fs.terms.push_back(const_term(dimreg::master_one_loop(p).value));
    fs.truncation_note = note_text("window edge tails truncated at n = %ld", n_max);
    return finish_series(std::move(fs), sv, tail, "separate_cutoff_series");
}

FormalSeries gaussian_ir_series(const Params& p, const SchemeSpec& s, long n_max) {
    require_family(s, Family::gaussian_ir, "gaussian_ir_series");
    require_single_mass(p, "gaussian_ir_series");
    check_point(p, "gaussian_ir_series", true);
    if (n_max < 0) throw DomainError("gaussian_ir_series: needs n_max >= 0");
    const double dl = *s.delta;
    const double h = p.d / 2.0;
    const double hm = half_measure(p.d);
    const long j_cap = std::min(n_max, long(8));
    FormalSeries fs = context_series(p);
    const auto sv = spec_scales(s);
    if (p.m2 == 0.0) {
        screen_any_integer(p.alpha - h, "gaussian_ir_series");
        fs.terms.push_back(power_term(
            hm * specfun::gamma(h - p.alpha).value, Scale::delta,
            lin_exp(Rational(0), Rational(-1, 2), Rational(1), Rational(0))));
        double tail = 0.0;
        for (long j = 0; j <= j_cap; ++j) {
            const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
            const double c = -hm * sgn /
                             (std::tgamma(double(j) + 1.0) * (h - p.alpha + double(j)));
            const Term t = power_term(
                c, Scale::delta, lin_exp(Rational(3 * j), Rational(1), Rational(-2), Rational(0)));
            fs.terms.push_back(t);
            if (j == j_cap) tail = term_magnitude(fs, t, sv);
        }
        fs.truncation_note = note_text("removed-region powers truncated at j = %ld", j_cap);
        return finish_series(std::move(fs), sv, tail, "gaussian_ir_series");
    }
    if (!(dl * dl < p.m2))
        throw DomainError("gaussian_ir_series: needs delta^2 < m2 (thin removed region)");
    double tail = append_gaussian_branches(fs, p, n_max, dl, sv, "gaussian_ir_series");
    const double measure = 2.0 * hm;
    for (long n = 0; n <= n_max; ++n) {
        const double cn = measure * specfun::binom(-p.alpha, n) * std::pow(p.m2, -p.alpha - double(n));
        for (long j = 0; j <= j_cap; ++j) {
            const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
            const double c = -cn * sgn /
                             (std::tgamma(double(j) + 1.0) * (p.d + 2.0 * double(n) + 2.0 * double(j)));
            const Term t = power_term(
                c, Scale::delta,
                lin_exp(Rational(2 * n + 3 * j), Rational(1), Rational(0), Rational(0)));
            fs.terms.push_back(t);
            if (n == n_max && j == j_cap) tail = std::max(tail, term_magnitude(fs, t, sv));
        }
    }
    fs.truncation_note = note_text(
        "damping branches truncated at n = %ld, removed-region powers at j = %ld", n_max, j_cap);
    return finish_series(std::move(fs), sv, tail, "gaussian_ir_series");
}

FormalSeries two_sided_series(const Params& p, const SchemeSpec& s, long n_max) {
    if (s.family != Family::two_sided_gaussian && s.family != Family::separate_two_sided)
        throw DomainError(std::string("two_sided_series: expects family two_sided or ") +
                          "separate_two_sided, got " + family_name(s.family));
    s.validate();
    require_single_mass(p, "two_sided_series");
    check_point(p, "two_sided_series", true);
    if (n_max < 0) throw DomainError("two_sided_series: needs n_max >= 0");
    const bool folded = (s.family == Family::two_sided_gaussian);
    const double dl = *s.delta;
    const double xi_val = folded ? dl : *s.xi;
    FormalSeries fs = context_series(p);
    auto sv = spec_scales(s);
    if (folded) sv["xi"] = dl; // building happens on separate slots before the fold
    const double tail =
        append_two_sided_terms(fs, p, n_max, dl, xi_val, sv, "two_sided_series");
    if (folded) {
        fold_xi_onto_delta(fs);
        sv.erase("xi");
    }
    if (p.m2 == 0.0) {
        fs.truncation_note = note_text("both damping branches truncated at n = %ld", n_max);
    } else {
        fs.truncation_note = note_text(
            "analytic block truncated at k + j = %ld, remainder blocks at n + k = %ld",
            std::min(n_max, long(16)), std::min(n_max, long(24)));
    }
    return finish_series(std::move(fs), sv, tail, "two_sided_series");
}

} // namespace

SchemeSplit two_mass_cutoff(const Params& p, const SchemeSpec& s, long n_max) {
    require_family(s, Family::cutoff_uv, "two_mass_cutoff");
    check_two_mass(p, "two_mass_cutoff");
    if (n_max < 0) throw DomainError("two_mass_cutoff: needs n_max >= 0");
    const double K = *s.K;
    const double beta = *p.beta;
    const double M2 = *p.M2;
    if (!(K * K > M2))
        throw DomainError("two_mass_cutoff: needs K^2 > M2 (cutoff above both masses)");
    const double h = p.d / 2.0;
    const specfun::SpecValue F =
        specfun::appell_f1(h, p.alpha, beta, h + 1.0, -(K * K) / p.m2, -(K * K) / M2);
    const specfun::SpecValue g = specfun::gamma(1.0 + h);
    const double pref = std::pow(K, p.d) * std::pow(four_pi, -h) /
                        (g.value * std::pow(p.m2, p.alpha) * std::pow(M2, beta));
    SchemeSplit out;
    out.value.value = pref * F.value;
    out.value.abs_err = std::fabs(pref) * F.abs_err + 4e-15 * std::fabs(out.value.value);
    out.value.provenance = Provenance::closed_form;

    FormalSeries fs = context_series(p);
    const auto sv = spec_scales(s);
    const long cap = std::min(n_max, long(40));
    screen_integers_in(h - p.alpha - beta, 0.0, double(2 * cap), "two_mass_cutoff");
    const double hm = half_measure(p.d);
    double tail = 0.0;
    for (long n = 0; n <= cap; ++n) {
        const double an = specfun::binom(-p.alpha, n) * std::pow(p.m2, double(n));
        for (long k = 0; n + k <= cap; ++k) {
            const double c = hm * an * specfun::binom(-beta, k) * std::pow(M2, double(k)) /
                             (h - p.alpha - beta - double(n) - double(k));
            const Term t = power_term(
                c, Scale::K,
                lin_exp(Rational(-2 * (n + k)), Rational(1), Rational(-2), Rational(-2)));
            fs.terms.push_back(t);
            if (n + k == cap) tail = std::max(tail, term_magnitude(fs, t, sv));
        }
    }
    fs.terms.push_back(const_term(dimreg::two_mass_master(p).value));
    fs.truncation_note = note_text("cutoff tail truncated at n + k = %ld", cap);
    out.expansion = finish_series(std::move(fs), sv, tail, "two_mass_cutoff");
    return out;
}

SchemeSplit two_mass_gaussian(const Params& p, const SchemeSpec& s, long n_max) {
    require_family(s, Family::gaussian_uv, "two_mass_gaussian");
    check_two_mass(p, "two_mass_gaussian");
    if (n_max < 0) throw DomainError("two_mass_gaussian: needs n_max >= 0");
    const double dl = *s.delta;
    const double beta = *p.beta;
    const double M2 = *p.M2;
    if (!(dl * M2 < 1.0))
        throw DomainError("two_mass_gaussian: needs delta*M2 < 1 (small-damping regime)");
    SchemeSplit out;
    out.value = from_oracle(p, s);

    const double h = p.d / 2.0;
    const double hm = half_measure(p.d);
    screen_any_integer(h - p.alpha - beta, "two_mass_gaussian");
    FormalSeries fs = context_series(p);
    const auto sv = spec_scales(s);
    double tail = 0.0;
    // finite-range block: quadrature moments of the undamped integrand below M2
    const long n1 = std::min(n_max, long(12));
    for (long n = 0; n <= n1; ++n) {
        oracle::QuadratureRequest req;
        const double alpha = p.alpha;
        const double m2 = p.m2;
        const double hn = h + double(n);
        req.integrand = [alpha, beta, m2, M2, hn](double w) {
            return std::pow(w, hn - 1.0) * std::pow(M2 * w + m2, -alpha) *
                   std::pow(w + 1.0, -beta);
        };
        req.a = 0.0;
        req.b = 1.0;
        req.rel_tol = 1e-12;
        req.abs_tol = 0.0;
        const oracle::QuadratureResult q = oracle::integrate(req);
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        const double c = hm * sgn / std::tgamma(double(n) + 1.0) *
                         std::pow(M2, h - beta + double(n)) * q.value;
        const Term t = power_term(
            c, Scale::delta, lin_exp(Rational(n), Rational(0), Rational(0), Rational(0)));
        fs.terms.push_back(t);
        if (n == n1) tail = std::max(tail, term_magnitude(fs, t, sv));
    }
    // tail block, integer delta powers: accelerated sums over the heavier propagator
    const long n2 = std::min(n_max, long(40));
    for (long n = 0; n <= n2; ++n) {
        const double an = specfun::binom(-p.alpha, n) * std::pow(p.m2, double(n));
        for (long j = 0; j <= std::min(n_max, long(8)); ++j) {
            const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
            const double denom_shift = p.alpha + beta + double(n) - h - double(j);
            const specfun::AltSum S = specfun::alt_sum(
                [beta, denom_shift](long k) {
                    return specfun::binom(-beta, k) / (denom_shift + double(k));
                },
                400);
            const double c = hm * an * sgn / std::tgamma(double(j) + 1.0) *
                             std::pow(M2, h - p.alpha - beta - double(n) + double(j)) * S.value;
            const Term t = power_term(
                c, Scale::delta, lin_exp(Rational(j), Rational(0), Rational(0), Rational(0)));
            fs.terms.push_back(t);
            if (n == n2 && j == std::min(n_max, long(8)))
                tail = std::max(tail, term_magnitude(fs, t, sv));
        }
    }
    // tail block, symbolic delta powers carried by the damped moments
    const long nk_cap = std::min(n_max, long(24));
    for (long n = 0; n <= nk_cap; ++n) {
        const double an = specfun::binom(-p.alpha, n) * std::pow(p.m2, double(n));
        for (long k = 0; n + k <= nk_cap; ++k) {
            const double c = hm * an * specfun::binom(-beta, k) * std::pow(M2, double(k)) *
                             specfun::gamma(h - p.alpha - beta - double(n) - double(k)).value;
            const Term t = power_term(
                c, Scale::delta,
                lin_exp(Rational(n + k), Rational(-1, 2), Rational(1), Rational(1)));
            fs.terms.push_back(t);
            if (n + k == nk_cap) tail = std::max(tail, term_magnitude(fs, t, sv));
        }
    }
    fs.truncation_note = note_text(
        "finite-range block to n = %ld, tail sums to n = %ld, damped moments to n + k = %ld",
        n1, n2, nk_cap);
    out.expansion = finish_series(std::move(fs), sv, tail, "two_mass_gaussian");
    return out;
}

series::FormalSeries scheme_series(const Params& p, const SchemeSpec& s, long n_max) {
    switch (s.family) {
    case Family::cutoff_uv:
        return p.two_mass() ? two_mass_cutoff(p, s, n_max).expansion : cutoff_series(p, s, n_max);
    case Family::gaussian_uv:
        return p.two_mass() ? two_mass_gaussian(p, s, n_max).expansion
                            : gaussian_series(p, s, n_max);
    case Family::ir_window:
        require_single_mass(p, "scheme_series");
        return ir_window_series(p, s, n_max);
    case Family::gaussian_ir:
        require_single_mass(p, "scheme_series");
        return gaussian_ir_series(p, s, n_max);
    case Family::two_sided_gaussian:
    case Family::separate_two_sided:
        require_single_mass(p, "scheme_series");
        return two_sided_series(p, s, n_max);
    case Family::separate_cutoff:
        require_single_mass(p, "scheme_series");
        return separate_cutoff_series(p, s, n_max);
    case Family::mellin_demo:
    case Family::quartic_demo:
        throw DomainError("scheme_series: demo families have no regulator-scale expansion");
    }
    throw DomainError("scheme_series: unknown family");
}

} // namespace schemes
} // namespace loopreg
