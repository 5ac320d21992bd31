#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>

#include "loopreg/dimreg.hpp"
#include "loopreg/errors.hpp"
#include "loopreg/oracle.hpp"
#include "loopreg/schemes.hpp"
#include "loopreg/series.hpp"
#include "loopreg/specfun.hpp"

using namespace loopreg;
using schemes::DemoKind;

namespace {

constexpr double pi = 3.14159265358979323846;

Params point(double d, double alpha, double m2) {
    Params p;
    p.d = d;
    p.alpha = alpha;
    p.m2 = m2;
    return p;
}

SchemeSpec spec(Family f, std::map<std::string, double> scales) {
    SchemeSpec s;
    s.family = f;
    if (scales.count("K")) s.K = scales["K"];
    if (scales.count("delta")) s.delta = scales["delta"];
    if (scales.count("xi")) s.xi = scales["xi"];
    if (scales.count("z")) s.z = scales["z"];
    if (scales.count("a")) s.a = scales["a"];
    return s;
}

bool rel_close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

double oracle_value(const Params& p, const SchemeSpec& s) {
    return oracle::scheme_oracle(p, s, 1e-11).value;
}

} // namespace

TEST_CASE("scale bookkeeping is enforced per family") {
    const Params p = point(3, 1, 1);
    CHECK_THROWS_AS(schemes::cutoff_eval(p, spec(Family::cutoff_uv, {})), DomainError);
    CHECK_THROWS_AS(
        schemes::cutoff_eval(p, spec(Family::cutoff_uv, {{"K", 10}, {"delta", 0.1}})),
        DomainError);
    CHECK_THROWS_AS(schemes::ir_window_eval(p, spec(Family::ir_window, {{"K", 0.9}})),
                    DomainError); // window needs K >= 1
    CHECK_THROWS_AS(schemes::separate_cutoff_eval(
                        p, spec(Family::separate_cutoff, {{"K", 1.0}, {"delta", 2.0}})),
                    DomainError); // scales out of order
    CHECK_THROWS_AS(schemes::gaussian_eval(p, spec(Family::gaussian_uv, {{"delta", -0.1}})),
                    DomainError);
    CHECK_THROWS_AS(schemes::cutoff_eval(point(3, 1, -1), spec(Family::cutoff_uv, {{"K", 10}})),
                    DomainError);
}

TEST_CASE("family and provenance names are stable") {
    CHECK(std::string(family_name(Family::cutoff_uv)) == "cutoff");
    CHECK(std::string(family_name(Family::gaussian_uv)) == "gaussian");
    CHECK(std::string(family_name(Family::ir_window)) == "ir_window");
    CHECK(std::string(family_name(Family::gaussian_ir)) == "gaussian_ir");
    CHECK(std::string(family_name(Family::two_sided_gaussian)) == "two_sided");
    CHECK(std::string(family_name(Family::separate_cutoff)) == "separate_cutoff");
    CHECK(std::string(family_name(Family::separate_two_sided)) == "separate_two_sided");
    CHECK(std::string(family_name(Family::mellin_demo)) == "mellin");
    CHECK(std::string(family_name(Family::quartic_demo)) == "quartic");
    CHECK(std::string(provenance_name(Provenance::closed_form)) == "closed_form");
    CHECK(std::string(provenance_name(Provenance::quadrature)) == "quadrature");
    CHECK(std::string(provenance_name(Provenance::demo)) == "demo");
}

TEST_CASE("hard cutoff: antiderivative and log-case values") {
    const EvalResult a =
        schemes::cutoff_eval(point(3, 1, 1), spec(Family::cutoff_uv, {{"K", 10}}));
    CHECK(rel_close(a.value, (10.0 - std::atan(10.0)) / (2.0 * pi * pi), 1e-10));
    CHECK(a.provenance == Provenance::closed_form);

    const EvalResult b =
        schemes::cutoff_eval(point(4, 2, 1), spec(Family::cutoff_uv, {{"K", 1}}));
    CHECK(rel_close(b.value, (std::log(2.0) - 0.5) / (16.0 * pi * pi), 1e-10));
}

TEST_CASE("hard cutoff stays finite and truthful for negative powers") {
    const Params p = point(3, -1, 1);
    const SchemeSpec s = spec(Family::cutoff_uv, {{"K", 2}});
    const EvalResult v = schemes::cutoff_eval(p, s);
    CHECK(std::isfinite(v.value));
    CHECK(rel_close(v.value, oracle_value(p, s), 1e-8));
    // below the mass scale the evaluation still matches the integral
    const SchemeSpec small = spec(Family::cutoff_uv, {{"K", 0.5}});
    CHECK(rel_close(schemes::cutoff_eval(p, small).value, oracle_value(p, small), 1e-8));
}

TEST_CASE("every family is finite and matches quadrature across the power grid") {
    const double d = 2.6, m2 = 1.3;
    for (double alpha : {-2.0, -0.5, 0.3, 1.0, 2.7}) {
        const Params p = point(d, alpha, m2);
        const std::pair<SchemeSpec, const char*> cases[] = {
            {spec(Family::cutoff_uv, {{"K", 7}}), "cutoff"},
            {spec(Family::gaussian_uv, {{"delta", 0.3}}), "gaussian"},
            {spec(Family::ir_window, {{"K", 7}}), "ir_window"},
            {spec(Family::gaussian_ir, {{"delta", 0.3}}), "gaussian_ir"},
            {spec(Family::two_sided_gaussian, {{"delta", 0.3}}), "two_sided"},
            {spec(Family::separate_cutoff, {{"K", 7}, {"delta", 0.2}}), "separate_cutoff"},
            {spec(Family::separate_two_sided, {{"delta", 0.3}, {"xi", 0.2}}),
             "separate_two_sided"},
        };
        for (const auto& [s, name] : cases) {
            INFO(name << " at alpha=" << alpha);
            const EvalResult v = schemes::scheme_eval(p, s);
            CHECK(std::isfinite(v.value));
            const double ref = oracle_value(p, s);
            CHECK(std::fabs(v.value - ref) <=
                  std::max(1e-8 * std::fabs(ref), 20.0 * v.abs_err + 1e-13));
        }
    }
}

TEST_CASE("gaussian damping: small-scale limit and quadrature") {
    const EvalResult lim =
        schemes::gaussian_eval(point(3, 2, 1), spec(Family::gaussian_uv, {{"delta", 1e-6}}));
    CHECK(std::fabs(lim.value - 1.0 / (8.0 * pi)) < 1e-4); // deviation is O(sqrt(delta))

    for (double alpha : {1.0, -0.5}) {
        const Params p = point(3, alpha, 1);
        const SchemeSpec s = spec(Family::gaussian_uv, {{"delta", 0.1}});
        CHECK(rel_close(schemes::gaussian_eval(p, s).value, oracle_value(p, s), 1e-8));
    }
}

TEST_CASE("gaussian expansion: leading correction coefficient") {
    const Params p = point(3, 0.7, 1.3);
    const series::FormalSeries fs =
        schemes::gaussian_series(p, spec(Family::gaussian_uv, {{"delta", 1e-3}}), 12);
    double c0 = 0.0, c1 = 0.0;
    for (const series::Term& t : fs.terms) {
        const bool free0 = t.exponent[0].is_zero() && t.exponent[2].is_zero();
        if (!free0 || t.log_power[0] || t.log_power[1] || t.log_power[2]) continue;
        if (t.exponent[1].is_zero()) c0 = t.coeff;
        if (t.exponent[1] == series::SymbolicExponent{1, 0, 0, 0}) c1 = t.coeff;
    }
    REQUIRE(c0 != 0.0);
    REQUIRE(c1 != 0.0);
    const double want = p.d * p.m2 / (p.d + 2.0 - 2.0 * p.alpha);
    CHECK(rel_close(c1 / c0, want, 1e-10));
    CHECK(rel_close(c0, dimreg::master_one_loop(p).value, 1e-12));
}

TEST_CASE("window scheme: massless closed form, degenerate window, decomposition") {
    const EvalResult massless =
        schemes::ir_window_eval(point(3, 1, 0), spec(Family::ir_window, {{"K", 10}}));
    CHECK(rel_close(massless.value, 9.9 * oracle::radial_measure(3.0), 1e-12));

    const EvalResult empty =
        schemes::ir_window_eval(point(3, 1, 1), spec(Family::ir_window, {{"K", 1.0}}));
    CHECK(empty.value == 0.0); // K = 1 is the empty window, exactly
    CHECK(empty.note == "empty window");

    const Params p = point(3, 1, 1);
    const EvalResult whole = schemes::ir_window_eval(p, spec(Family::ir_window, {{"K", 10}}));
    const double hi = schemes::cutoff_eval(p, spec(Family::cutoff_uv, {{"K", 10}})).value;
    const double lo = schemes::cutoff_eval(p, spec(Family::cutoff_uv, {{"K", 0.1}})).value;
    CHECK(whole.value == hi - lo); // bitwise: defined as this difference
    CHECK(rel_close(whole.value, oracle_value(p, spec(Family::ir_window, {{"K", 10}})), 1e-8));
}

TEST_CASE("separate-scales cutoff: massless closed form and coinciding windows") {
    const EvalResult massless = schemes::separate_cutoff_eval(
        point(3, 1, 0), spec(Family::separate_cutoff, {{"K", 10}, {"delta", 0.1}}));
    CHECK(rel_close(massless.value, 9.9 * oracle::radial_measure(3.0), 1e-12));

    const Params p = point(3, 1, 1);
    const EvalResult sep = schemes::separate_cutoff_eval(
        p, spec(Family::separate_cutoff, {{"K", 10}, {"delta", 0.1}}));
    const EvalResult win = schemes::ir_window_eval(p, spec(Family::ir_window, {{"K", 10}}));
    CHECK(sep.value == win.value); // same window [0.1, 10], bitwise

    const double hi = schemes::cutoff_eval(p, spec(Family::cutoff_uv, {{"K", 10}})).value;
    const double lo = schemes::cutoff_eval(p, spec(Family::cutoff_uv, {{"K", 0.1}})).value;
    CHECK(sep.value == hi - lo);
    CHECK(rel_close(sep.value,
                    oracle_value(p, spec(Family::separate_cutoff, {{"K", 10}, {"delta", 0.1}})),
                    1e-8));
}

TEST_CASE("gaussian with an infrared floor: quadrature value and removed piece") {
    const Params p = point(3, 2, 1);
    const SchemeSpec s = spec(Family::gaussian_ir, {{"delta", 0.01}});
    const EvalResult v = schemes::gaussian_ir_eval(p, s);
    CHECK(v.provenance == Provenance::quadrature);
    CHECK(rel_close(v.value, oracle_value(p, s), 1e-9));

    // whole-line evaluation minus the floor piece reproduces it
    const double whole =
        schemes::gaussian_eval(p, spec(Family::gaussian_uv, {{"delta", 0.01}})).value;
    oracle::QuadratureRequest req;
    req.integrand = [](double q) {
        return std::exp(-0.01 * q * q) * q * q / ((q * q + 1.0) * (q * q + 1.0));
    };
    req.a = 0.0;
    req.b = 0.01;
    req.rel_tol = 1e-12;
    req.abs_tol = 1e-300;
    const double floor_piece = oracle::radial_measure(3.0) * oracle::integrate(req).value;
    CHECK(rel_close(v.value, whole - floor_piece, 1e-8));
}

TEST_CASE("two-sided damping: Bessel closed form and scale folding") {
    // massless: closed form through the modified Bessel function
    const Params p0 = point(3, 1, 0);
    const SchemeSpec both = spec(Family::separate_two_sided, {{"delta", 1}, {"xi", 1}});
    const EvalResult w = schemes::two_sided_eval(p0, both);
    const double hm = oracle::radial_measure(3.0) / 2.0;
    CHECK(rel_close(w.value, hm * 2.0 * specfun::bessel_k(0.5, 2.0).value, 1e-10));

    // folding the two scales together is the same integrand, bitwise
    const Params p = point(3, 1, 1);
    const EvalResult folded =
        schemes::two_sided_eval(p, spec(Family::two_sided_gaussian, {{"delta", 0.01}}));
    const EvalResult split = schemes::two_sided_eval(
        p, spec(Family::separate_two_sided, {{"delta", 0.01}, {"xi", 0.01}}));
    CHECK(folded.value == split.value);
    CHECK(rel_close(folded.value,
                    oracle_value(p, spec(Family::two_sided_gaussian, {{"delta", 0.01}})),
                    1e-9));
}

TEST_CASE("dispatch mirrors the family functions bitwise") {
    const Params p = point(2.7, 0.8, 1.1);
    const SchemeSpec cut = spec(Family::cutoff_uv, {{"K", 20}});
    CHECK(schemes::scheme_eval(p, cut).value == schemes::cutoff_eval(p, cut).value);
    const SchemeSpec gau = spec(Family::gaussian_uv, {{"delta", 0.05}});
    CHECK(schemes::scheme_eval(p, gau).value == schemes::gaussian_eval(p, gau).value);
    const series::FormalSeries a = schemes::scheme_series(p, cut, 15);
    const series::FormalSeries b = schemes::cutoff_series(p, cut, 15);
    REQUIRE(a.terms.size() == b.terms.size());
    for (size_t i = 0; i < a.terms.size(); ++i) CHECK(a.terms[i].coeff == b.terms[i].coeff);
}

TEST_CASE("two-mass pair: closed form, series part, reductions") {
    Params p = point(3, 1, 1);
    p.beta = 1.0;
    p.M2 = 4.0;

    const schemes::SchemeSplit cut =
        schemes::two_mass_cutoff(p, spec(Family::cutoff_uv, {{"K", 1000}}), 40);
    CHECK(rel_close(cut.value.value, oracle_value(p, spec(Family::cutoff_uv, {{"K", 1000}})),
                    1e-8));
    const double master2 = dimreg::two_mass_master(p).value;
    const double cut_free = series::eval_at(
        series::extract_multi(cut.expansion,
                              {series::Scale::K, series::Scale::delta, series::Scale::xi}),
        {});
    CHECK(rel_close(cut_free, master2, 1e-8));

    const schemes::SchemeSplit gau =
        schemes::two_mass_gaussian(p, spec(Family::gaussian_uv, {{"delta", 1e-3}}), 40);
    CHECK(rel_close(gau.value.value, oracle_value(p, spec(Family::gaussian_uv, {{"delta", 1e-3}})),
                    1e-8));
    const double gau_free = series::eval_at(
        series::extract_multi(gau.expansion,
                              {series::Scale::K, series::Scale::delta, series::Scale::xi}),
        {});
    CHECK(rel_close(gau_free, master2, 1e-6));

    // equal masses merge into a single squared propagator
    Params eq = point(3, 1, 2);
    eq.beta = 1.0;
    eq.M2 = 2.0;
    const schemes::SchemeSplit eq_cut =
        schemes::two_mass_cutoff(eq, spec(Family::cutoff_uv, {{"K", 100}}), 20);
    const double merged =
        schemes::cutoff_eval(point(3, 2, 2), spec(Family::cutoff_uv, {{"K", 100}})).value;
    CHECK(rel_close(eq_cut.value.value, merged, 1e-10));

    CHECK_THROWS_AS(
        schemes::two_mass_cutoff(p, spec(Family::cutoff_uv, {{"K", 1.5}}), 20),
        DomainError); // cutoff below the heavy mass
}

TEST_CASE("demo schemes: partial regulators work exactly where documented") {
    SUBCASE("monomial regulator in its convergence strip") {
        const EvalResult v =
            schemes::incomplete_demo(DemoKind::mellin, point(3, 2, 1), spec(Family::mellin_demo, {{"z", 0.1}}));
        CHECK(v.provenance == Provenance::demo);
        CHECK(rel_close(v.value, specfun::beta_series(1.6, 0.4).value, 1e-10));
        CHECK(rel_close(v.value, oracle_value(point(3, 2, 1), spec(Family::mellin_demo, {{"z", 0.1}})),
                        1e-9));
    }
    SUBCASE("monomial regulator fails for non-positive powers") {
        CHECK_THROWS_AS(schemes::incomplete_demo(DemoKind::mellin, point(3, -0.5, 1),
                                                 spec(Family::mellin_demo, {{"z", 0.1}})),
                        DivergentInput);
        CHECK_THROWS_AS(schemes::incomplete_demo(DemoKind::mellin, point(3, 0, 1),
                                                 spec(Family::mellin_demo, {{"z", 0.1}})),
                        DivergentInput);
    }
    SUBCASE("quartic stabilizer at small coupling") {
        const Params p = point(3, 1, 1);
        const SchemeSpec s = spec(Family::quartic_demo, {{"a", 0.01}});
        const EvalResult v = schemes::incomplete_demo(DemoKind::quartic, p, s);
        CHECK(v.provenance == Provenance::demo);
        const double root = std::sqrt(1.0 - 0.04);
        const double wp = (1.0 + root) / 0.02;
        const double wm = 1.0 / (0.01 * wp);
        const double want = pi / 0.02 * (std::sqrt(wp) - std::sqrt(wm)) / (wp - wm);
        CHECK(rel_close(v.value, want, 1e-12));
        CHECK(rel_close(v.value, oracle_value(p, s), 1e-8));
    }
    SUBCASE("quartic guard rails") {
        CHECK_THROWS_AS(schemes::incomplete_demo(DemoKind::quartic, point(3, 1, 1),
                                                 spec(Family::quartic_demo, {{"a", 0.3}})),
                        DomainError); // roots collide beyond a = 1/4
        CHECK_THROWS_AS(schemes::incomplete_demo(DemoKind::quartic, point(3, 2, 1),
                                                 spec(Family::quartic_demo, {{"a", 0.01}})),
                        DomainError); // only the documented integrand shape
    }
    SUBCASE("the analytic continuation both demos point at") {
        CHECK(rel_close(0.5 * specfun::beta_series(1.5, -0.5).value, -pi / 2.0, 1e-10));
    }
    SUBCASE("dispatch routes the demo families") {
        const EvalResult via = schemes::scheme_eval(point(3, 2, 1), spec(Family::mellin_demo, {{"z", 0.1}}));
        const EvalResult direct = schemes::incomplete_demo(DemoKind::mellin, point(3, 2, 1),
                                                           spec(Family::mellin_demo, {{"z", 0.1}}));
        CHECK(via.value == direct.value);
    }
}

TEST_CASE("expansion guard rails") {
    // integer exponent gap: the expansion denominators vanish
    CHECK_THROWS_AS(
        schemes::cutoff_series(point(4, 2, 1), spec(Family::cutoff_uv, {{"K", 10}}), 20),
        PoleError);
    // outside the asymptotic regime the tail refuses to pass itself off
    CHECK_THROWS_AS(
        schemes::cutoff_series(point(3, 1, 1), spec(Family::cutoff_uv, {{"K", 1.02}}), 40),
        NonConvergence);
    // regime preconditions
    CHECK_THROWS_AS(
        schemes::cutoff_series(point(3, 1, 1), spec(Family::cutoff_uv, {{"K", 0.5}}), 20),
        DomainError);
    CHECK_THROWS_AS(
        schemes::gaussian_series(point(3, 1, 1), spec(Family::gaussian_uv, {{"delta", 2.0}}), 20),
        DomainError);
    CHECK_THROWS_AS(schemes::scheme_series(
                        point(3, 1, 0.2),
                        spec(Family::separate_cutoff, {{"K", 10}, {"delta", 0.5}}), 20),
                    DomainError);
    // integer index gap blocks the expansion while the evaluation is fine
    const Params half = point(3, 0.5, 1);
    CHECK_NOTHROW(schemes::gaussian_eval(half, spec(Family::gaussian_uv, {{"delta", 0.1}})));
    CHECK_THROWS_AS(
        schemes::gaussian_series(half, spec(Family::gaussian_uv, {{"delta", 0.1}}), 20),
        PoleError);
}
