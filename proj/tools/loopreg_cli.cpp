// Batch front-end: evaluate any scheme at a point, dump series and
// extraction results, run the verification catalogue over a parameter grid,
// and emit deterministic JSON/CSV/text reports.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "loopreg/dimreg.hpp"
#include "loopreg/errors.hpp"
#include "loopreg/oracle.hpp"
#include "loopreg/report.hpp"
#include "loopreg/schemes.hpp"
#include "loopreg/series.hpp"

namespace {

using namespace loopreg;

struct Options {
    std::string scheme = "dimreg";
    double d = 3.0;
    double alpha = 1.0;
    double m2 = 1.0;
    std::optional<double> beta;
    std::optional<double> M2;
    std::optional<double> K;
    std::optional<double> delta;
    std::optional<double> xi;
    long terms = 40;
    double tol = 1e-8;
    std::string out;
    std::string format = "text";
    std::vector<std::string> sweeps;
};

std::optional<Family> family_from_scheme(const std::string& name) {
    static const Family all[] = {
        Family::cutoff_uv,       Family::gaussian_uv,   Family::ir_window,
        Family::gaussian_ir,     Family::two_sided_gaussian, Family::separate_cutoff,
        Family::separate_two_sided, Family::mellin_demo, Family::quartic_demo,
    };
    for (Family f : all)
        if (name == family_name(f)) return f;
    return std::nullopt;
}

Params params_from(const Options& o) {
    if (o.beta.has_value() != o.M2.has_value())
        throw DomainError("config: --beta and --M2 must be given together");
    Params p;
    p.d = o.d;
    p.alpha = o.alpha;
    p.m2 = o.m2;
    p.beta = o.beta;
    p.M2 = o.M2;
    return p;
}

SchemeSpec spec_from(const Options& o, Family f) {
    SchemeSpec s;
    // with --xi given, "two_sided" means the separate-scales variant
    if (f == Family::two_sided_gaussian && o.xi) f = Family::separate_two_sided;
    s.family = f;
    if (f == Family::mellin_demo) {
        s.z = o.xi ? o.xi : std::optional<double>(0.1); // --xi doubles as the exponent
        return s;
    }
    if (f == Family::quartic_demo) {
        s.a = o.K; // --K doubles as the quartic coupling
        return s;
    }
    s.K = o.K;
    s.delta = o.delta;
    s.xi = o.xi;
    return s;
}

report::Record base_record(const Params& p, const SchemeSpec* s, const std::string& scheme,
                           const std::string& check) {
    report::Record r;
    r.scheme = scheme;
    r.check = check;
    r.d = p.d;
    r.alpha = p.alpha;
    r.beta = p.beta;
    r.m2 = p.m2;
    r.M2 = p.M2;
    if (s) {
        r.K = s->K;
        r.delta = s->delta;
        r.xi = s->xi;
    }
    return r;
}

double rel_residual(double a, double b) {
    const double denom = std::max(std::fabs(b), 1e-300);
    return std::fabs(a - b) / denom;
}

// Full-range radial quadrature of the defining integral; only meaningful in
// the convergent region 2 alpha - d > 0.
double full_radial_oracle(const Params& p, double tol) {
    oracle::QuadratureRequest req;
    const Params q = p;
    req.integrand = [q](double x) {
        double v = std::pow(x, q.d - 1.0) * std::pow(x * x + q.m2, -q.alpha);
        if (q.two_mass()) v *= std::pow(x * x + *q.M2, -*q.beta);
        return v;
    };
    req.a = 0.0;
    req.semi_infinite = true;
    req.decay = oracle::Decay::power;
    req.rel_tol = tol;
    req.abs_tol = 0.0;
    return oracle::radial_measure(p.d) * oracle::integrate(req).value;
}

double dimreg_value(const Params& p) {
    return p.two_mass() ? dimreg::two_mass_master(p).value : dimreg::master_one_loop(p).value;
}

void emit(const Options& o, report::Report& rep) {
    rep.summary = report::tally(rep.records);
    std::string text;
    if (o.format == "json")
        text = report::to_json(rep);
    else if (o.format == "csv")
        text = report::to_csv(rep);
    else
        text = report::to_text(rep);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw DomainError("config: cannot open output file " + o.out);
        f << text;
    }
}

std::vector<std::pair<std::string, std::string>> config_pairs(const Options& o,
                                                              const std::string& command) {
    std::vector<std::pair<std::string, std::string>> c;
    c.emplace_back("command", command);
    c.emplace_back("scheme", o.scheme);
    c.emplace_back("d", report::num17(o.d));
    c.emplace_back("alpha", report::num17(o.alpha));
    if (o.beta) c.emplace_back("beta", report::num17(*o.beta));
    c.emplace_back("m2", report::num17(o.m2));
    if (o.M2) c.emplace_back("M2", report::num17(*o.M2));
    if (o.K) c.emplace_back("K", report::num17(*o.K));
    if (o.delta) c.emplace_back("delta", report::num17(*o.delta));
    if (o.xi) c.emplace_back("xi", report::num17(*o.xi));
    c.emplace_back("terms", std::to_string(o.terms));
    c.emplace_back("tol", report::num17(o.tol));
    c.emplace_back("format", o.format);
    for (const std::string& s : o.sweeps) c.emplace_back("sweep", s);
    return c;
}

// Bounded worker pool with deterministic collection: body(i) writes only
// slot i of a pre-sized result vector, so thread count never changes output.
void parallel_for(long n, const std::function<void(long)>& body) {
    long nt = 0;
    if (const char* env = std::getenv("LOOPREG_THREADS")) nt = std::atol(env);
    if (nt <= 0) nt = long(std::max(1u, std::thread::hardware_concurrency()));
    nt = std::min(nt, std::min(n, long(64)));
    if (nt <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> workers;
    workers.reserve(size_t(nt));
    for (long t = 0; t < nt; ++t)
        workers.emplace_back([&] {
            for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& w : workers) w.join();
}

// ---------------------------------------------------------------- commands

int cmd_eval(const Options& o) {
    const Params p = params_from(o);
    report::Report rep;
    rep.config = config_pairs(o, "eval");
    if (o.scheme == "dimreg") {
        report::Record r = base_record(p, nullptr, "dimreg", "value");
        const double v = dimreg_value(p);
        r.value = v;
        r.dimreg = v;
        const dimreg::DomainVerdict cls = dimreg::classify(p);
        if (cls.kind == dimreg::VerdictKind::convergent) {
            r.oracle = full_radial_oracle(p, 1e-10);
            r.residual_rel = rel_residual(v, *r.oracle);
            r.verdict = (*r.residual_rel <= o.tol) ? "ok" : "fail";
        } else {
            r.verdict = dimreg::verdict_name(cls.kind);
        }
        rep.records.push_back(r);
    } else {
        const auto fam = family_from_scheme(o.scheme);
        if (!fam) throw DomainError("config: unknown scheme " + o.scheme);
        const SchemeSpec s = spec_from(o, *fam);
        report::Record r = base_record(p, &s, o.scheme, "value");
        const EvalResult v = schemes::scheme_eval(p, s);
        r.value = v.value;
        r.err = v.abs_err;
        try {
            r.dimreg = dimreg_value(p);
        } catch (const Error&) {
            // no continued comparator at poles / unsupported points
        }
        try {
            const oracle::QuadratureResult q = oracle::scheme_oracle(p, s, 1e-10);
            r.oracle = q.value;
            r.residual_rel = rel_residual(v.value, q.value);
            r.verdict =
                (*r.residual_rel <= std::max(o.tol, 20.0 * (v.abs_err + q.err_est) /
                                                        std::max(std::fabs(q.value), 1e-300)))
                    ? "ok"
                    : "fail";
        } catch (const Error&) {
            // oracle refuses (e.g. continued value of a divergent integral):
            // the evaluation stands on its own
            r.verdict = "ok";
        }
        rep.records.push_back(r);
    }
    emit(o, rep);
    return 0;
}

int cmd_series(const Options& o) {
    const Params p = params_from(o);
    const auto fam = family_from_scheme(o.scheme);
    if (!fam) throw DomainError("config: scheme " + o.scheme + " has no regulator expansion");
    const series::FormalSeries fs = schemes::scheme_series(p, spec_from(o, *fam), o.terms);
    const std::string text = series::to_text(fs);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw DomainError("config: cannot open output file " + o.out);
        f << text;
    }
    return 0;
}

int cmd_extract(const Options& o) {
    const Params p = params_from(o);
    const auto fam = family_from_scheme(o.scheme);
    if (!fam) throw DomainError("config: scheme " + o.scheme + " has no regulator expansion");
    const SchemeSpec s = spec_from(o, *fam);
    report::Report rep;
    rep.config = config_pairs(o, "extract");
    const series::FormalSeries fs = schemes::scheme_series(p, s, o.terms);
    const series::FormalSeries kept = series::extract_multi(
        fs, {series::Scale::K, series::Scale::delta, series::Scale::xi});
    report::Record r = base_record(p, &s, o.scheme, "extraction");
    r.value = series::eval_at(kept, {});
    const double target = (p.m2 == 0.0 && !p.two_mass())
                              ? dimreg::veltman_scaleless(p.d, p.alpha).value
                              : dimreg_value(p);
    r.dimreg = target;
    r.residual_rel = rel_residual(*r.value, target);
    r.verdict = (*r.residual_rel <= std::max(o.tol, 1e-6)) ? "ok" : "fail";
    rep.records.push_back(r);
    emit(o, rep);
    return 0;
}

// The property catalogue for one verification grid point.
void verify_point(const Params& p, double tol, long terms, std::vector<report::Record>& out) {
    const dimreg::DomainVerdict cls = dimreg::classify(p);
    if (cls.kind == dimreg::VerdictKind::pole) {
        report::Record r = base_record(p, nullptr, "dimreg", "classify");
        r.verdict = "pole";
        out.push_back(r);
        return;
    }
    const double master = dimreg::master_one_loop(p).value;
    const std::vector<series::Scale> all_scales = {series::Scale::K, series::Scale::delta,
                                                   series::Scale::xi};
    auto push = [&](report::Record r) { out.push_back(std::move(r)); };
    auto compare = [&](report::Record r, double got, double want, double bound) {
        r.value = got;
        r.residual_rel = rel_residual(got, want);
        r.verdict = (*r.residual_rel <= bound) ? "ok" : "fail";
        push(std::move(r));
    };

    // continued value vs the defining integral where it converges
    if (cls.kind == dimreg::VerdictKind::convergent) {
        report::Record r = base_record(p, nullptr, "dimreg", "oracle");
        r.dimreg = master;
        const double q = full_radial_oracle(p, 1e-10);
        r.oracle = q;
        compare(std::move(r), master, q, tol);
    }

    // closed forms vs quadrature
    for (double K : {1e2, 1e4}) {
        SchemeSpec s;
        s.family = Family::cutoff_uv;
        s.K = K;
        const EvalResult v = schemes::cutoff_eval(p, s);
        const oracle::QuadratureResult q = oracle::scheme_oracle(p, s, 1e-10);
        report::Record r = base_record(p, &s, "cutoff", "oracle");
        r.err = v.abs_err;
        r.oracle = q.value;
        r.dimreg = master;
        compare(std::move(r), v.value, q.value, tol);

        // extraction reproduces the continued value within the dropped order
        const series::FormalSeries fs = schemes::cutoff_series(p, s, terms);
        const double got = series::eval_at(series::extract_multi(fs, all_scales), {});
        report::Record e = base_record(p, &s, "cutoff", "extraction");
        e.dimreg = master;
        compare(std::move(e), got, master, std::max(tol, 5.0 * p.m2 / (K * K)));
    }
    for (double dl : {1e-2, 1e-4}) {
        SchemeSpec s;
        s.family = Family::gaussian_uv;
        s.delta = dl;
        const EvalResult v = schemes::gaussian_eval(p, s);
        const oracle::QuadratureResult q = oracle::scheme_oracle(p, s, 1e-10);
        report::Record r = base_record(p, &s, "gaussian", "oracle");
        r.err = v.abs_err;
        r.oracle = q.value;
        r.dimreg = master;
        compare(std::move(r), v.value, q.value, tol);

        const series::FormalSeries fs = schemes::gaussian_series(p, s, terms);
        const double got = series::eval_at(series::extract_multi(fs, all_scales), {});
        const double dm = dl * p.m2;
        const double bound = 10.0 * std::max(dm, std::pow(dm, std::fabs(p.alpha - p.d / 2.0)));
        report::Record e = base_record(p, &s, "gaussian", "extraction");
        e.dimreg = master;
        compare(std::move(e), got, master, std::max(tol, bound));
    }

    // window decompositions are exact differences by construction
    for (double K : {1e2, 1e4}) {
        SchemeSpec s;
        s.family = Family::ir_window;
        s.K = K;
        const double whole = schemes::ir_window_eval(p, s).value;
        SchemeSpec hi;
        hi.family = Family::cutoff_uv;
        hi.K = K;
        SchemeSpec lo = hi;
        lo.K = 1.0 / K;
        const double diff = schemes::cutoff_eval(p, hi).value - schemes::cutoff_eval(p, lo).value;
        report::Record r = base_record(p, &s, "ir_window", "decomposition");
        r.dimreg = master;
        r.value = whole;
        r.residual_rel = (whole == diff) ? 0.0 : rel_residual(whole, diff);
        r.verdict = (whole == diff) ? "ok" : "fail";
        push(std::move(r));
    }
    {
        SchemeSpec s;
        s.family = Family::ir_window;
        s.K = 1e2;
        const EvalResult v = schemes::ir_window_eval(p, s);
        const oracle::QuadratureResult q = oracle::scheme_oracle(p, s, 1e-10);
        report::Record r = base_record(p, &s, "ir_window", "oracle");
        r.err = v.abs_err;
        r.oracle = q.value;
        r.dimreg = master;
        compare(std::move(r), v.value, q.value, tol);
    }
    {
        SchemeSpec s;
        s.family = Family::separate_cutoff;
        s.K = 1e2;
        s.delta = 1e-2;
        const EvalResult v = schemes::separate_cutoff_eval(p, s);
        const oracle::QuadratureResult q = oracle::scheme_oracle(p, s, 1e-10);
        report::Record r = base_record(p, &s, "separate_cutoff", "oracle");
        r.err = v.abs_err;
        r.oracle = q.value;
        r.dimreg = master;
        compare(std::move(r), v.value, q.value, tol);

        SchemeSpec hi;
        hi.family = Family::cutoff_uv;
        hi.K = *s.K;
        SchemeSpec lo = hi;
        lo.K = *s.delta;
        const double diff = schemes::cutoff_eval(p, hi).value - schemes::cutoff_eval(p, lo).value;
        report::Record r2 = base_record(p, &s, "separate_cutoff", "decomposition");
        r2.dimreg = master;
        r2.value = v.value;
        r2.residual_rel = (v.value == diff) ? 0.0 : rel_residual(v.value, diff);
        r2.verdict = (v.value == diff) ? "ok" : "fail";
        push(std::move(r2));
    }

    // quadrature-valued families: expansion matches the evaluation,
    // scale-free part matches the continued value
    {
        SchemeSpec s;
        s.family = Family::gaussian_ir;
        s.delta = 1e-2;
        const series::FormalSeries fs = schemes::scheme_series(p, s, std::min(terms, long(24)));
        const double total = series::eval_at(fs, {{"delta", *s.delta}});
        const EvalResult v = schemes::gaussian_ir_eval(p, s);
        report::Record r = base_record(p, &s, "gaussian_ir", "series_total");
        r.oracle = v.value;
        r.dimreg = master;
        compare(std::move(r), total, v.value, std::max(tol, 1e-7));

        const double got = series::eval_at(series::extract_multi(fs, all_scales), {});
        report::Record e = base_record(p, &s, "gaussian_ir", "extraction");
        e.dimreg = master;
        compare(std::move(e), got, master, std::max(tol, 1e-6));
    }
    {
        SchemeSpec s;
        s.family = Family::two_sided_gaussian;
        s.delta = 1e-2;
        const series::FormalSeries fs = schemes::scheme_series(p, s, std::min(terms, long(24)));
        const double total = series::eval_at(fs, {{"delta", *s.delta}});
        const EvalResult v = schemes::two_sided_eval(p, s);
        report::Record r = base_record(p, &s, "two_sided", "series_total");
        r.oracle = v.value;
        r.dimreg = master;
        compare(std::move(r), total, v.value, std::max(tol, 1e-6));

        const double got = series::eval_at(series::extract_multi(fs, all_scales), {});
        report::Record e = base_record(p, &s, "two_sided", "extraction");
        e.dimreg = master;
        compare(std::move(e), got, master, std::max(tol, 1e-6));

        // folding the two damping scales together is the same evaluation
        SchemeSpec sep;
        sep.family = Family::separate_two_sided;
        sep.delta = *s.delta;
        sep.xi = *s.delta;
        const double w = schemes::two_sided_eval(p, sep).value;
        report::Record f = base_record(p, &sep, "separate_two_sided", "fold");
        f.dimreg = master;
        f.value = w;
        f.residual_rel = (w == v.value) ? 0.0 : rel_residual(w, v.value);
        f.verdict = (w == v.value) ? "ok" : "fail";
        push(std::move(f));
    }

    // index recurrence and commutation with the mass derivative
    {
        report::Record r = base_record(p, nullptr, "dimreg", "recurrence");
        r.dimreg = master;
        try {
            const EvalResult low = dimreg::lower_index(p);
            r.value = low.value;
            r.verdict = "ok";
        } catch (const PoleError&) {
            r.verdict = "pole";
        }
        push(std::move(r));
    }
    {
        SchemeSpec s;
        s.family = Family::cutoff_uv;
        s.K = 1e2;
        report::Record r = base_record(p, &s, "cutoff", "commutation");
        r.dimreg = master;
        try {
            const series::CommutationReport c =
                series::commutes_with_mass_derivative(p, s, 1e-5 * p.m2);
            r.value = c.lhs;
            r.residual_rel = c.residual;
            r.verdict = c.passed ? "ok" : "fail";
        } catch (const PoleError&) {
            r.verdict = "pole";
        }
        push(std::move(r));
    }
}

int cmd_verify(const Options& o) {
    report::Report rep;
    rep.config = config_pairs(o, "verify");
    const std::vector<double> ds = {1.5, 2.3, 3.0, 3.7};
    const std::vector<double> alphas = {-1.3, -0.5, 0.4, 1.0, 2.6};
    const std::vector<double> m2s = {0.5, 1.0, 4.0};
    std::vector<Params> points;
    for (double d : ds)
        for (double a : alphas)
            for (double m2 : m2s) {
                Params p;
                p.d = d;
                p.alpha = a;
                p.m2 = m2;
                points.push_back(p);
            }
    // two-mass reduction spot checks ride along as fixed extra points
    std::vector<std::vector<report::Record>> blocks(points.size() + 1);
    parallel_for(long(points.size()), [&](long i) {
        verify_point(points[size_t(i)], o.tol, o.terms, blocks[size_t(i)]);
    });
    {
        std::vector<report::Record>& out = blocks.back();
        Params q;
        q.d = 2.7;
        q.alpha = 0.8;
        q.m2 = 1.0;
        q.beta = 0.9;
        q.M2 = 1.0;
        Params flat;
        flat.d = 2.7;
        flat.alpha = 1.7;
        flat.m2 = 1.0;
        report::Record r = base_record(q, nullptr, "dimreg", "equal_mass_reduction");
        const double got = dimreg::two_mass_master(q).value;
        const double want = dimreg::master_one_loop(flat).value;
        r.value = got;
        r.dimreg = want;
        r.residual_rel = rel_residual(got, want);
        r.verdict = (*r.residual_rel <= std::max(o.tol, 1e-10)) ? "ok" : "fail";
        out.push_back(r);

        Params q2;
        q2.d = 2.3;
        q2.alpha = 0.4;
        q2.m2 = 0.5;
        q2.beta = 0.0;
        q2.M2 = 2.0;
        Params single;
        single.d = 2.3;
        single.alpha = 0.4;
        single.m2 = 0.5;
        report::Record r2 = base_record(q2, nullptr, "dimreg", "power_zero_reduction");
        const double got2 = dimreg::two_mass_series(q2).value;
        const double want2 = dimreg::master_one_loop(single).value;
        r2.value = got2;
        r2.dimreg = want2;
        r2.residual_rel = rel_residual(got2, want2);
        r2.verdict = (*r2.residual_rel <= std::max(o.tol, 1e-8)) ? "ok" : "fail";
        out.push_back(r2);
    }
    for (const auto& b : blocks)
        for (const auto& r : b) rep.records.push_back(r);
    emit(o, rep);
    return report::tally(rep.records).failed > 0 ? 1 : 0;
}

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

SweepAxis parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 5)
        throw DomainError("config: sweep must be name:min:max:count:linear|log, got " + text);
    SweepAxis ax;
    ax.name = parts[0];
    const double lo = std::strtod(parts[1].c_str(), nullptr);
    const double hi = std::strtod(parts[2].c_str(), nullptr);
    const long count = std::strtol(parts[3].c_str(), nullptr, 10);
    const std::string spacing = parts[4];
    if (count < 1) throw DomainError("config: sweep count must be >= 1");
    if (spacing != "linear" && spacing != "log")
        throw DomainError("config: sweep spacing must be linear or log");
    if (spacing == "log" && !(lo > 0.0 && hi > 0.0))
        throw DomainError("config: log sweep needs positive endpoints");
    for (long i = 0; i < count; ++i) {
        const double t = (count == 1) ? 0.0 : double(i) / double(count - 1);
        ax.values.push_back(spacing == "log" ? lo * std::pow(hi / lo, t)
                                             : lo + (hi - lo) * t);
    }
    static const char* known[] = {"d", "alpha", "beta", "m2", "M2", "K", "delta", "xi"};
    for (const char* k : known)
        if (ax.name == k) return ax;
    throw DomainError("config: unknown sweep parameter " + ax.name);
}

void apply_axis(Options& o, const std::string& name, double v) {
    if (name == "d") o.d = v;
    else if (name == "alpha") o.alpha = v;
    else if (name == "beta") o.beta = v;
    else if (name == "m2") o.m2 = v;
    else if (name == "M2") o.M2 = v;
    else if (name == "K") o.K = v;
    else if (name == "delta") o.delta = v;
    else if (name == "xi") o.xi = v;
}

int cmd_grid(const Options& o) {
    report::Report rep;
    rep.config = config_pairs(o, "grid");
    std::vector<SweepAxis> axes;
    for (const std::string& s : o.sweeps) axes.push_back(parse_sweep(s));
    long total = 1;
    for (const auto& ax : axes) total *= long(ax.values.size());

    // validate the configuration once at the first grid point
    {
        Options probe = o;
        for (const auto& ax : axes) apply_axis(probe, ax.name, ax.values.front());
        const Params p = params_from(probe);
        (void)p;
        if (probe.scheme != "dimreg") {
            const auto fam = family_from_scheme(probe.scheme);
            if (!fam) throw DomainError("config: unknown scheme " + probe.scheme);
            spec_from(probe, *fam).validate();
        }
    }

    std::vector<report::Record> records(static_cast<size_t>(total));
    parallel_for(total, [&](long idx) {
        Options local = o;
        long rest = idx;
        for (const auto& ax : axes) {
            const long n = long(ax.values.size());
            apply_axis(local, ax.name, ax.values[size_t(rest % n)]);
            rest /= n;
        }
        const Params p = params_from(local);
        report::Record r;
        try {
            if (local.scheme == "dimreg") {
                r = base_record(p, nullptr, "dimreg", "grid");
                const double v = dimreg_value(p);
                r.value = v;
                r.dimreg = v;
                r.verdict = dimreg::verdict_name(dimreg::classify(p).kind);
            } else {
                const auto fam = family_from_scheme(local.scheme);
                const SchemeSpec s = spec_from(local, *fam);
                r = base_record(p, &s, local.scheme, "grid");
                const EvalResult v = schemes::scheme_eval(p, s);
                r.value = v.value;
                r.err = v.abs_err;
                try {
                    r.dimreg = dimreg_value(p);
                } catch (const Error&) {
                }
                try {
                    r.oracle = oracle::scheme_oracle(p, s, 1e-10).value;
                } catch (const Error&) {
                }
                if (r.dimreg)
                    r.residual_rel = rel_residual(v.value, *r.dimreg);
                else if (r.oracle)
                    r.residual_rel = rel_residual(v.value, *r.oracle);
                r.verdict = "ok";
            }
        } catch (const PoleError&) {
            r = base_record(p, nullptr, local.scheme, "grid");
            r.verdict = "pole";
        } catch (const Error&) {
            r = base_record(p, nullptr, local.scheme, "grid");
            r.verdict = "skip";
        }
        records[size_t(idx)] = std::move(r);
    });
    rep.records = std::move(records);
    emit(o, rep);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"one-loop regulator laboratory"};
    app.fallthrough();
    app.set_config("--config", "", "key=value file mirroring the flags; flags win");
    app.add_option("--scheme", o.scheme,
                   "dimreg | cutoff | gaussian | ir_window | gaussian_ir | two_sided | "
                   "separate_cutoff | separate_two_sided | mellin | quartic");
    app.add_option("--d", o.d, "dimension");
    app.add_option("--alpha", o.alpha, "propagator power");
    app.add_option("--beta", o.beta, "second propagator power (two-mass)");
    app.add_option("--m2", o.m2, "squared mass");
    app.add_option("--M2", o.M2, "second squared mass (two-mass)");
    app.add_option("--K", o.K, "cutoff scale (quartic demo: coupling a)");
    app.add_option("--delta", o.delta, "UV damping scale");
    app.add_option("--xi", o.xi, "IR damping scale (mellin demo: exponent z)");
    app.add_option("--terms", o.terms, "series order");
    app.add_option("--tol", o.tol, "comparison tolerance");
    app.add_option("--out", o.out, "output file (default stdout)");
    app.add_option("--format", o.format, "text | json | csv");
    app.add_option("--sweep", o.sweeps,
                   "grid axis name:min:max:count:linear|log (repeatable)");
    CLI::App* eval = app.add_subcommand("eval", "evaluate one scheme at one point");
    CLI::App* ser = app.add_subcommand("series", "print the regulator-scale expansion");
    CLI::App* ext = app.add_subcommand("extract", "scale-free part vs the continued value");
    CLI::App* ver = app.add_subcommand("verify", "run the property catalogue on the default grid");
    CLI::App* grd = app.add_subcommand("grid", "tabulate scheme/dimreg/oracle over sweeps");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (eval->parsed()) return cmd_eval(o);
        if (ser->parsed()) return cmd_series(o);
        if (ext->parsed()) return cmd_extract(o);
        if (ver->parsed()) return cmd_verify(o);
        if (grd->parsed()) return cmd_grid(o);
        return 2;
    } catch (const PoleError& e) {
        std::cerr << "pole: " << e.what() << "\n";
        return 3;
    } catch (const NonConvergence& e) {
        std::cerr << "nonconvergence: " << e.what() << "\n";
        return 4;
    } catch (const RecurrenceViolation& e) {
        std::cerr << "property failure: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 2;
    }
}
