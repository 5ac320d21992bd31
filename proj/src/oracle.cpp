#include "loopreg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "loopreg/errors.hpp"
#include "loopreg/specfun.hpp"

namespace loopreg {
namespace oracle {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1], positive half.
// Even indices belong to the embedded 7-point Gauss rule.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Interval {
    double lo, hi;
    double value;
    double err;
    bool operator<(const Interval& o) const { return err < o.err; }
};

// One 15-point Kronrod evaluation with the QUADPACK error model.
Interval gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * xgk[i]);
        fv[14 - i] = f(c + h * xgk[i]);
    }
    fv[7] = f(c);
    for (double v : fv)
        if (!std::isfinite(v))
            throw DomainError("integrate: integrand returned a non-finite value");

    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        resk += wgk[i] * (fv[i] + fv[14 - i]);
        resabs += wgk[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
    }
    resk += wgk[7] * fv[7];
    resabs += wgk[7] * std::fabs(fv[7]);
    for (int i = 0; i < 3; ++i)
        resg += wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    resg += wg[3] * fv[7];

    const double reskh = resk * 0.5;
    double resasc = wgk[7] * std::fabs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += wgk[i] * (std::fabs(fv[i] - reskh) + std::fabs(fv[14 - i] - reskh));

    double err = std::fabs((resk - resg) * h);
    resasc *= std::fabs(h);
    resabs *= std::fabs(h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    err = std::max(err, 50.0 * eps * resabs);

    return Interval{lo, hi, resk * h, err};
}

QuadratureResult adapt(const std::function<double(double)>& f, double lo, double hi,
                       int seeds, double rel_tol, double abs_tol, int max_subdivisions) {
    std::vector<Interval> heap;
    heap.reserve(64);
    const double step = (hi - lo) / seeds;
    for (int i = 0; i < seeds; ++i)
        heap.push_back(gk15(f, lo + i * step, (i + 1 == seeds) ? hi : lo + (i + 1) * step));
    std::make_heap(heap.begin(), heap.end());

    int used = seeds;
    auto totals = [&heap]() {
        double v = 0.0, e = 0.0;
        for (const Interval& iv : heap) {
            v += iv.value;
            e += iv.err;
        }
        return std::pair<double, double>(v, e);
    };

    auto [value, err] = totals();
    while (err > std::max(abs_tol, rel_tol * std::fabs(value))) {
        if (used >= max_subdivisions)
            throw NonConvergence("integrate: subdivision budget exhausted, err_est " +
                                 std::to_string(err) + " over value " + std::to_string(value));
        std::pop_heap(heap.begin(), heap.end());
        Interval worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi)
            throw NonConvergence("integrate: interval collapsed below double resolution");
        heap.push_back(gk15(f, worst.lo, mid));
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(gk15(f, mid, worst.hi));
        std::push_heap(heap.begin(), heap.end());
        ++used;
        std::tie(value, err) = totals();
    }
    return QuadratureResult{value, err, used, true};
}

} // namespace

QuadratureResult integrate(const QuadratureRequest& req) {
    if (!req.integrand)
        throw DomainError("integrate: empty integrand");
    if (!(req.rel_tol > 0.0) || !(req.abs_tol >= 0.0))
        throw DomainError("integrate: tolerances must be positive");

    if (!req.semi_infinite) {
        if (!(req.b > req.a))
            throw DomainError("integrate: need b > a on a finite domain");
        return adapt(req.integrand, req.a, req.b, 4, req.rel_tol, req.abs_tol,
                     req.max_subdivisions);
    }

    const auto f = req.integrand;
    const double a = req.a;
    if (req.decay == Decay::power) {
        // t = a + (u/(1-u))^3 maps (0,1) onto (a, inf); the cubic stretch
        // reaches t ~ 1e48 before 1-u hits double resolution, far enough for
        // power tails with exponent margin >~ 0.3.
        auto g = [f, a](double u) {
            const double om = 1.0 - u;
            if (om < 1e-14 || u <= 0.0)
                return 0.0;
            const double r = u / om;
            const double t = a + r * r * r;
            const double jac = 3.0 * r * r / (om * om);
            return f(t) * jac;
        };
        return adapt(g, 0.0, 1.0, 8, req.rel_tol, req.abs_tol, req.max_subdivisions);
    }

    // Exponential and Gaussian tails: double-exponential stretch
    // t = a + exp((pi/2) sinh u). The window covers offsets from ~2e-31
    // up to ~5e30, so decay rates over many decades land inside it.
    auto g = [f, a](double u) {
        const double s = 1.5707963267948966 * std::sinh(u);
        const double t = a + std::exp(s);
        const double jac = 1.5707963267948966 * std::cosh(u) * std::exp(s);
        if (jac == 0.0 || !std::isfinite(t))
            return 0.0;
        return f(t) * jac;
    };
    return adapt(g, -4.5, 4.5, 12, req.rel_tol, req.abs_tol, req.max_subdivisions);
}

double radial_measure(double d) {
    const double g = specfun::gamma(d / 2.0).value;
    return 2.0 / (std::pow(4.0 * M_PI, d / 2.0) * g);
}

namespace {

// Radial integrand of the (possibly two-mass) one-loop bubble at momentum q.
double propagators(const Params& p, double q) {
    const double q2 = q * q;
    double v = std::pow(q, p.d - 1.0) * std::pow(q2 + p.m2, -p.alpha);
    if (p.two_mass())
        v *= std::pow(q2 + *p.M2, -*p.beta);
    return v;
}

} // namespace

QuadratureResult scheme_oracle(const Params& p, const SchemeSpec& s, double tol) {
    s.validate();
    QuadratureRequest req;
    req.rel_tol = tol;

    switch (s.family) {
    case Family::cutoff_uv: {
        req.integrand = [p](double q) { return propagators(p, q); };
        req.a = 0.0;
        req.b = *s.K;
        break;
    }
    case Family::gaussian_uv: {
        const double delta = *s.delta;
        req.integrand = [p, delta](double q) {
            const double damp = std::exp(-delta * q * q);
            return damp == 0.0 ? 0.0 : damp * propagators(p, q);
        };
        req.a = 0.0;
        req.semi_infinite = true;
        req.decay = Decay::gaussian;
        break;
    }
    case Family::ir_window: {
        if (*s.K == 1.0) {
            QuadratureResult zero;
            zero.converged = true;
            return zero; // empty window, exactly zero
        }
        req.integrand = [p](double q) { return propagators(p, q); };
        req.a = 1.0 / *s.K;
        req.b = *s.K;
        break;
    }
    case Family::gaussian_ir: {
        const double delta = *s.delta;
        req.integrand = [p, delta](double q) {
            const double damp = std::exp(-delta * q * q);
            return damp == 0.0 ? 0.0 : damp * propagators(p, q);
        };
        req.a = delta;
        req.semi_infinite = true;
        req.decay = Decay::gaussian;
        break;
    }
    case Family::two_sided_gaussian:
    case Family::separate_two_sided: {
        const double delta = *s.delta;
        const double xi = (s.family == Family::two_sided_gaussian) ? delta : *s.xi;
        req.integrand = [p, delta, xi](double q) {
            if (q <= 0.0)
                return 0.0;
            const double damp = std::exp(-delta * q * q - xi / (q * q));
            return damp == 0.0 ? 0.0 : damp * propagators(p, q);
        };
        req.a = 0.0;
        req.semi_infinite = true;
        req.decay = Decay::gaussian;
        break;
    }
    case Family::separate_cutoff: {
        req.integrand = [p](double q) { return propagators(p, q); };
        req.a = *s.delta;
        req.b = *s.K;
        if (!(req.b > req.a))
            throw DomainError("scheme_oracle: separate_cutoff needs K > delta");
        break;
    }
    case Family::mellin_demo: {
        // Bare Mellin-regulated radial integral in t = q^2. Refuse outside
        // the strip 0 < d/2 + z < alpha where the integral actually exists;
        // quadrature of a divergent integral would report garbage.
        if (!(p.m2 > 0.0)) throw DomainError("scheme_oracle: mellin needs m2 > 0");
        const double x = p.d / 2.0 + *s.z;
        if (!(x > 0.0) || !(p.alpha - x > 0.0))
            throw DivergentInput("scheme_oracle: mellin integral diverges unless 0 < d/2 + z < alpha");
        const double ex = x - 1.0;
        const double alpha = p.alpha;
        const double m2 = p.m2;
        req.integrand = [ex, alpha, m2](double t) {
            return std::pow(t, ex) * std::pow(m2 + t, -alpha);
        };
        req.a = 0.0;
        req.semi_infinite = true;
        req.decay = Decay::power;
        return integrate(req); // bare radial integral, no measure
    }
    case Family::quartic_demo: {
        const double a = *s.a;
        req.integrand = [a](double x) {
            const double x2 = x * x;
            return x2 / (a * x2 * x2 + x2 + 1.0);
        };
        req.a = 0.0;
        req.semi_infinite = true;
        req.decay = Decay::power;
        return integrate(req); // bare radial integral, no measure
    }
    }

    QuadratureResult r = integrate(req);
    const double measure = radial_measure(p.d);
    r.value *= measure;
    r.err_est *= measure;
    return r;
}

} // namespace oracle
} // namespace loopreg
