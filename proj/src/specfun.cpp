#include "loopreg/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "loopreg/errors.hpp"
#include "loopreg/oracle.hpp"

namespace loopreg {
namespace specfun {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

// Distance to the nearest non-positive integer, if within pole_tolerance.
bool near_pole(double x, double& at, double& dist) {
    const double k = std::round(x);
    if (k <= 0.0 && std::fabs(x - k) < pole_tolerance) {
        at = k;
        dist = std::fabs(x - k);
        return true;
    }
    return false;
}

bool near_nonpositive_integer(double x, long& m) {
    const double k = std::round(x);
    if (k <= 0.0 && std::fabs(x - k) < pole_tolerance) {
        m = std::lround(-k);
        return true;
    }
    return false;
}

} // namespace

const char* method_name(Method m) {
    switch (m) {
    case Method::series: return "series";
    case Method::integral_representation: return "integral-representation";
    case Method::recurrence: return "recurrence";
    case Method::reflection: return "reflection";
    case Method::closed_form: return "closed-form";
    }
    return "?";
}

SpecValue gamma(double x) {
    if (!std::isfinite(x))
        throw DomainError("gamma: non-finite argument");
    double at, dist;
    if (near_pole(x, at, dist))
        throw PoleError("gamma", at, dist);
    const double v = std::tgamma(x);
    if (!std::isfinite(v))
        throw DomainError("gamma: overflow at x = " + std::to_string(x));
    if (x >= 0.5)
        return {v, 4e-15 * std::fabs(v), Method::closed_form};
    // Negative axis goes through the reflection formula inside the library
    // call; the sin(pi x) reduction costs a little accuracy.
    return {v, 2e-13 * std::fabs(v), Method::reflection};
}

double rgamma(double x) {
    const double k = std::round(x);
    if (k <= 0.0 && std::fabs(x - k) < pole_tolerance)
        return 0.0;
    return 1.0 / std::tgamma(x);
}

SpecValue pochhammer(double x, long n) {
    if (n < 0)
        throw DomainError("pochhammer: n must be >= 0");
    double v = 1.0;
    for (long k = 0; k < n; ++k)
        v *= x + double(k);
    return {v, double(n) * 2.0 * eps * std::fabs(v), Method::closed_form};
}

double binom(double r, long n) {
    double v = 1.0;
    for (long k = 1; k <= n; ++k)
        v *= (r - double(k) + 1.0) / double(k);
    return v;
}

AltSum alt_sum(const std::function<double(long)>& term, long budget) {
    if (budget < 1)
        throw DomainError("alt_sum: budget must be >= 1");

    std::vector<double> seen;
    seen.reserve(64);
    long n0 = -1;
    int altrun = 0, zerorun = 0;
    double abs_head = 0.0;
    for (long n = 0; n < budget; ++n) {
        const double t = term(n);
        if (!std::isfinite(t))
            throw DomainError("alt_sum: non-finite term at n = " + std::to_string(n));
        seen.push_back(t);
        abs_head += std::fabs(t);
        if (t == 0.0) {
            // A vanished binomial factor terminates the whole series.
            if (++zerorun >= 4) {
                double s = 0.0;
                for (double u : seen)
                    s += u;
                return {s, 4.0 * eps * abs_head, n + 1};
            }
        } else {
            zerorun = 0;
        }
        if (n > 0 && seen[n - 1] * t < 0.0) {
            if (++altrun >= 6) {
                n0 = n - 6;
                break;
            }
        } else if (t != 0.0) {
            altrun = 0;
        }
    }
    if (n0 < 0)
        throw NonConvergence("alt_sum: no alternating tail within the term budget");
    if (budget - n0 < 8)
        throw NonConvergence("alt_sum: term budget too small for the tail transform");

    double head = 0.0;
    for (long i = 0; i < n0; ++i)
        head += seen[i];

    // Tail magnitudes, extending past what detection already consumed.
    const long table = std::min<long>(96, budget - n0);
    std::vector<double> row;
    row.reserve(table);
    double bmax = 0.0;
    const double sgn = (seen[n0] >= 0.0) ? 1.0 : -1.0;
    for (long k = 0; k < table; ++k) {
        const long idx = n0 + k;
        const double t = (idx < long(seen.size())) ? seen[idx] : term(idx);
        if (!std::isfinite(t))
            throw DomainError("alt_sum: non-finite term at n = " + std::to_string(idx));
        row.push_back(std::fabs(t));
        bmax = std::max(bmax, std::fabs(t));
    }

    // Euler transform: sum_k (-1)^k b_k = sum_j (-1)^j (Delta^j b)_0 / 2^(j+1).
    double tail = 0.0, denom = 2.0, inc = 0.0;
    double inc_min = std::numeric_limits<double>::infinity();
    long used = n0 + table;
    for (long j = 0; j < table; ++j) {
        inc = ((j & 1) ? -1.0 : 1.0) * row[0] / denom;
        tail += inc;
        denom *= 2.0;
        inc_min = std::min(inc_min, std::fabs(inc));
        const double total = head + sgn * tail;
        if (std::fabs(inc) <= 1e-17 * std::fabs(total) + 1e-300)
            break;
        for (std::size_t i = 0; i + 1 < row.size(); ++i)
            row[i] = row[i + 1] - row[i];
        row.pop_back();
    }

    const double value = head + sgn * tail;
    const double floor = 4.0 * eps * bmax;
    const double trunc = std::fabs(inc);
    if (trunc > 1e3 * std::max(inc_min, floor) && trunc > 1e-12 * std::fabs(value))
        throw NonConvergence("alt_sum: remainder estimate failed to shrink");
    return {value, std::max(trunc, floor), used};
}

SpecValue beta_series(double x, double y, long n_terms) {
    double at, dist;
    if (near_pole(x, at, dist))
        throw PoleError("beta_series", at, dist);
    if (near_pole(y, at, dist))
        throw PoleError("beta_series", at, dist);

    const double a = -(x + y);
    double bin = 1.0;
    auto term = [x, y, a, bin](long n) mutable -> double {
        if (n > 0)
            bin *= (a - double(n) + 1.0) / double(n);
        return bin * (1.0 / (x + double(n)) + 1.0 / (y + double(n)));
    };
    const AltSum s = alt_sum(term, n_terms);
    return {s.value, s.abs_err, Method::series};
}

namespace {

SpecValue f21_series(double a, double b, double c, double z) {
    double t = 1.0, s = 1.0, asum = 1.0;
    for (long n = 0; n < 10000; ++n) {
        t *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * (double(n) + 1.0)) * z;
        s += t;
        asum += std::fabs(t);
        if (std::fabs(t) <= 1e-16 * std::fabs(s))
            return {s, std::fabs(t) + 8.0 * eps * asum, Method::series};
    }
    throw NonConvergence("hyp2f1: power series exceeded 10000 terms at z = " + std::to_string(z));
}

SpecValue f21_euler(double a, double bb, double c, double z) {
    oracle::QuadratureRequest req;
    req.integrand = [a, bb, c, z](double t) {
        // after deep subdivision a node can round onto an endpoint; the
        // endpoint singularities are integrable, so a zero there is exact
        // up to measure zero and keeps the rule finite
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return std::pow(t, bb - 1.0) * std::pow(1.0 - t, c - bb - 1.0) *
               std::pow(1.0 - z * t, -a);
    };
    req.a = 0.0;
    req.b = 1.0;
    req.rel_tol = 1e-12;
    req.abs_tol = 0.0;
    const oracle::QuadratureResult r = oracle::integrate(req);
    const double pref = gamma(c).value * rgamma(bb) * rgamma(c - bb);
    return {pref * r.value, std::fabs(pref) * r.err_est + 8.0 * eps * std::fabs(pref * r.value),
            Method::integral_representation};
}

} // namespace

SpecValue hyp2f1(double a, double b, double c, double z) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z))
        throw DomainError("hyp2f1: non-finite argument");
    double at, dist;
    if (near_pole(c, at, dist))
        throw PoleError("hyp2f1", at, dist);

    long m;
    if (near_nonpositive_integer(a, m) || near_nonpositive_integer(b, m)) {
        // Terminating polynomial, valid for every real z.
        double t = 1.0, s = 1.0, asum = 1.0;
        for (long n = 0; n < m; ++n) {
            t *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * (double(n) + 1.0)) * z;
            s += t;
            asum += std::fabs(t);
        }
        return {s, 4.0 * eps * asum, Method::series};
    }

    if (z > 1.0 - z_margin)
        throw DomainError("hyp2f1: z = " + std::to_string(z) + " too close to 1");

    if (std::fabs(z) <= 0.7)
        return f21_series(a, b, c, z);
    if (z < 0.0 && z > -1.0) {
        // Pfaff map onto w in (0.41, 0.5): still a power-series evaluation.
        const double w = z / (z - 1.0);
        SpecValue inner = f21_series(a, c - b, c, w);
        const double pref = std::pow(1.0 - z, -a);
        return {pref * inner.value, pref * inner.abs_err + 4.0 * eps * std::fabs(pref * inner.value),
                Method::series};
    }
    if (z <= -1.0) {
        // Pick the integral orientation with the mildest endpoint behaviour:
        // the integrand carries t^{bb-1} (1-t)^{c-bb-1}, so the larger
        // min(bb, c-bb) is, the tamer the endpoints get. The choice is also
        // symmetric under a <-> b, which keeps that identity bitwise.
        const bool ok_b = c - b > 0.0 && b > 0.0;
        const bool ok_a = c - a > 0.0 && a > 0.0;
        if (ok_b && ok_a) {
            return std::min(b, c - b) >= std::min(a, c - a) ? f21_euler(a, b, c, z)
                                                            : f21_euler(b, a, c, z);
        }
        if (ok_b)
            return f21_euler(a, b, c, z);
        if (ok_a)
            return f21_euler(b, a, c, z); // a <-> b symmetry
        const double w = z / (z - 1.0);
        SpecValue inner = f21_series(a, c - b, c, w);
        const double pref = std::pow(1.0 - z, -a);
        return {pref * inner.value, pref * inner.abs_err + 4.0 * eps * std::fabs(pref * inner.value),
                Method::series};
    }
    // z in (0.7, 1 - z_margin): the series still converges, just more slowly.
    return f21_series(a, b, c, z);
}

namespace {

SpecValue f11_series(double a, double b, double z) {
    double t = 1.0, s = 1.0, asum = 1.0;
    for (long n = 0; n < 10000; ++n) {
        t *= (a + double(n)) / ((b + double(n)) * (double(n) + 1.0)) * z;
        s += t;
        asum += std::fabs(t);
        if (std::fabs(t) <= 1e-16 * std::fabs(s))
            return {s, std::fabs(t) + 8.0 * eps * asum, Method::series};
    }
    throw NonConvergence("1F1: power series exceeded 10000 terms at z = " + std::to_string(z));
}

} // namespace

SpecValue tricomi_u(double a, double b, double z) {
    if (!(z > 0.0))
        throw DomainError("tricomi_u: need z > 0");
    const double kb = std::round(b);
    if (std::fabs(b - kb) < pole_tolerance) {
        // Integer b degenerates the connection formula. The defining
        // integral still converges whenever a > 0.
        if (a > 0.0) {
            oracle::QuadratureRequest req;
            req.integrand = [a, b, z](double t) {
                if (t <= 0.0)
                    return 0.0;
                const double damp = std::exp(-z * t);
                if (damp == 0.0)
                    return 0.0;
                return damp * std::pow(t, a - 1.0) * std::pow(1.0 + t, b - a - 1.0);
            };
            req.a = 0.0;
            req.semi_infinite = true;
            req.decay = oracle::Decay::exponential;
            req.rel_tol = 1e-12;
            req.abs_tol = 0.0;
            const oracle::QuadratureResult r = oracle::integrate(req);
            const double pref = rgamma(a);
            return {pref * r.value,
                    std::fabs(pref) * r.err_est + 8.0 * eps * std::fabs(pref * r.value),
                    Method::integral_representation};
        }
        throw PoleError("tricomi_u", kb, std::fabs(b - kb));
    }

    const SpecValue m1 = f11_series(a, b, z);
    const SpecValue m2 = f11_series(a + 1.0 - b, 2.0 - b, z);
    const double c1 = gamma(1.0 - b).value * rgamma(a + 1.0 - b);
    const double c2 = gamma(b - 1.0).value * rgamma(a) * std::pow(z, 1.0 - b);
    const double p1 = c1 * m1.value, p2 = c2 * m2.value;
    const double v = p1 + p2;
    const double err = std::fabs(c1) * m1.abs_err + std::fabs(c2) * m2.abs_err +
                       8.0 * eps * (std::fabs(p1) + std::fabs(p2));
    return {v, err, Method::series};
}

SpecValue expint(double omega, double x) {
    if (!(x >= 0.0))
        throw DomainError("expint: need x >= 0");
    if (x == 0.0) {
        if (omega > 1.0) {
            const double v = 1.0 / (omega - 1.0);
            return {v, 2.0 * eps * std::fabs(v), Method::closed_form};
        }
        throw DivergentInput("expint: integral diverges at x = 0 for omega <= 1");
    }
    const double damp0 = std::exp(-x);
    if (damp0 == 0.0)
        return {0.0, 1e-300, Method::integral_representation};
    // t = 1 + s/x turns the defining integral into a unit-rate Laplace one.
    oracle::QuadratureRequest req;
    req.integrand = [omega, x](double s) {
        const double es = std::exp(-s);
        if (es == 0.0)
            return 0.0;
        return es * std::pow(1.0 + s / x, -omega);
    };
    req.a = 0.0;
    req.semi_infinite = true;
    req.decay = oracle::Decay::exponential;
    req.rel_tol = 1e-12;
    req.abs_tol = 0.0;
    const oracle::QuadratureResult r = oracle::integrate(req);
    const double pref = damp0 / x;
    return {pref * r.value, pref * r.err_est + 8.0 * eps * std::fabs(pref * r.value),
            Method::integral_representation};
}

SpecValue bessel_k(double nu, double x) {
    if (!(x > 0.0))
        throw DomainError("bessel_k: need x > 0");
    nu = std::fabs(nu); // K_nu is even in nu
    oracle::QuadratureRequest req;
    req.integrand = [nu, x](double t) {
        const double damp = std::exp(-x * std::cosh(t));
        if (damp == 0.0)
            return 0.0;
        return damp * std::cosh(nu * t);
    };
    req.a = 0.0;
    req.semi_infinite = true;
    req.decay = oracle::Decay::exponential;
    req.rel_tol = 1e-12;
    req.abs_tol = 0.0;
    const oracle::QuadratureResult r = oracle::integrate(req);
    return {r.value, r.err_est + 8.0 * eps * std::fabs(r.value), Method::integral_representation};
}

SpecValue appell_f1(double a, double b1, double b2, double c, double v, double w) {
    if (!(a > 0.0) || !(c - a > 0.0))
        throw DomainError("appell_f1: integral representation needs c > a > 0");
    if (!(v < 1.0) || !(w < 1.0))
        throw DomainError("appell_f1: need v < 1 and w < 1");
    oracle::QuadratureRequest req;
    req.integrand = [a, b1, b2, c, v, w](double t) {
        return std::pow(t, a - 1.0) * std::pow(1.0 - t, c - a - 1.0) *
               std::pow(1.0 - t * v, -b1) * std::pow(1.0 - t * w, -b2);
    };
    req.a = 0.0;
    req.b = 1.0;
    req.rel_tol = 1e-12;
    req.abs_tol = 0.0;
    const oracle::QuadratureResult r = oracle::integrate(req);
    const double pref = gamma(c).value * rgamma(a) * rgamma(c - a);
    return {pref * r.value, std::fabs(pref) * r.err_est + 8.0 * eps * std::fabs(pref * r.value),
            Method::integral_representation};
}

} // namespace specfun
} // namespace loopreg
