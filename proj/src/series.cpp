#include "loopreg/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <string>

#include "loopreg/dimreg.hpp"
#include "loopreg/errors.hpp"
#include "loopreg/schemes.hpp"

namespace loopreg {
namespace series {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Rational::Rational(std::int64_t n) : num(n), den(1) {}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0)
        throw DomainError("Rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num = (g != 0) ? n / g : 0;
    den = (g != 0) ? d / g : 1;
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}

Rational Rational::operator-() const {
    Rational r;
    r.num = -num;
    r.den = den;
    return r;
}

bool Rational::operator<(const Rational& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

std::string to_string(const Rational& r) {
    std::string s = std::to_string(r.num);
    if (r.den != 1)
        s += "/" + std::to_string(r.den);
    return s;
}

const char* scale_name(Scale s) {
    switch (s) {
    case Scale::K: return "K";
    case Scale::delta: return "delta";
    case Scale::xi: return "xi";
    }
    return "?";
}

std::optional<Scale> scale_from_name(const std::string& name) {
    if (name == "K")
        return Scale::K;
    if (name == "delta")
        return Scale::delta;
    if (name == "xi")
        return Scale::xi;
    return std::nullopt;
}

bool SymbolicExponent::is_zero() const {
    return c0.is_zero() && cd.is_zero() && ca.is_zero() && cb.is_zero();
}

bool SymbolicExponent::operator==(const SymbolicExponent& o) const {
    return c0 == o.c0 && cd == o.cd && ca == o.ca && cb == o.cb;
}

SymbolicExponent SymbolicExponent::operator+(const SymbolicExponent& o) const {
    return {c0 + o.c0, cd + o.cd, ca + o.ca, cb + o.cb};
}

double SymbolicExponent::value(double d, double alpha, double beta) const {
    return c0.to_double() + cd.to_double() * d + ca.to_double() * alpha +
           cb.to_double() * beta;
}

bool Term::scale_free() const {
    for (int i = 0; i < n_scales; ++i)
        if (!exponent[i].is_zero() || log_power[i] != 0)
            return false;
    return true;
}

namespace {

int cmp_rational(const Rational& a, const Rational& b) {
    if (a == b)
        return 0;
    return a < b ? -1 : 1;
}

int cmp_signature(const Term& a, const Term& b) {
    for (int i = 0; i < n_scales; ++i) {
        const SymbolicExponent &ea = a.exponent[i], &eb = b.exponent[i];
        if (int c = cmp_rational(ea.c0, eb.c0))
            return c;
        if (int c = cmp_rational(ea.cd, eb.cd))
            return c;
        if (int c = cmp_rational(ea.ca, eb.ca))
            return c;
        if (int c = cmp_rational(ea.cb, eb.cb))
            return c;
        if (a.log_power[i] != b.log_power[i])
            return a.log_power[i] < b.log_power[i] ? -1 : 1;
    }
    return 0;
}

bool same_signature(const Term& a, const Term& b) { return cmp_signature(a, b) == 0; }

} // namespace

FormalSeries normalize(const FormalSeries& s) {
    FormalSeries out;
    out.d = s.d;
    out.alpha = s.alpha;
    out.beta = s.beta;
    out.truncation_note = s.truncation_note;

    std::vector<Term> sorted = s.terms;
    std::sort(sorted.begin(), sorted.end(),
              [](const Term& a, const Term& b) { return cmp_signature(a, b) < 0; });

    for (std::size_t i = 0; i < sorted.size();) {
        Term merged = sorted[i];
        std::size_t j = i + 1;
        while (j < sorted.size() && same_signature(sorted[i], sorted[j])) {
            merged.coeff += sorted[j].coeff;
            ++j;
        }
        if (merged.coeff != 0.0)
            out.terms.push_back(merged);
        i = j;
    }
    return out;
}

FormalSeries extract_scale(const FormalSeries& s, Scale scale) {
    FormalSeries out;
    out.d = s.d;
    out.alpha = s.alpha;
    out.beta = s.beta;
    out.truncation_note = s.truncation_note;
    const int i = static_cast<int>(scale);
    for (const Term& t : s.terms)
        if (t.exponent[i].is_zero() && t.log_power[i] == 0)
            out.terms.push_back(t);
    return out;
}

FormalSeries extract_multi(const FormalSeries& s, const std::vector<Scale>& scales) {
    FormalSeries out = s;
    for (Scale sc : scales)
        out = extract_scale(out, sc);
    return out;
}

double eval_at(const FormalSeries& s, const std::map<std::string, double>& scale_values) {
    double total = 0.0;
    for (const Term& t : s.terms) {
        double v = t.coeff;
        for (int i = 0; i < n_scales; ++i) {
            const bool used = !t.exponent[i].is_zero() || t.log_power[i] != 0;
            if (!used)
                continue;
            const char* name = scale_name(static_cast<Scale>(i));
            const auto it = scale_values.find(name);
            if (it == scale_values.end())
                throw DomainError(std::string("eval_at: missing value for scale ") + name);
            if (!(it->second > 0.0) || !std::isfinite(it->second))
                throw DomainError(std::string("eval_at: scale ") + name + " must be positive");
            if (!t.exponent[i].is_zero()) {
                if (!t.exponent[i].cb.is_zero() && !s.beta)
                    throw DomainError("eval_at: exponent uses beta but the series has no beta");
                v *= std::pow(it->second,
                              t.exponent[i].value(s.d, s.alpha, s.beta ? *s.beta : 0.0));
            }
            if (t.log_power[i] != 0)
                v *= std::pow(std::log(it->second), t.log_power[i]);
        }
        total += v;
    }
    return total;
}

namespace {

std::string form_text(const SymbolicExponent& e) {
    std::string txt;
    bool first = true;
    auto append = [&](const Rational& r, const char* var) {
        if (r.is_zero())
            return;
        const bool neg = r.num < 0;
        if (first) {
            if (neg)
                txt += "-";
            first = false;
        } else {
            txt += neg ? " - " : " + ";
        }
        txt += to_string(neg ? -r : r);
        if (var[0] != '\0')
            txt += std::string("*") + var;
    };
    append(e.c0, "");
    append(e.cd, "d");
    append(e.ca, "alpha");
    append(e.cb, "beta");
    if (first)
        txt = "0";
    return txt;
}

Rational parse_rational(const std::string& s) {
    const std::size_t slash = s.find('/');
    errno = 0;
    char* end = nullptr;
    const long long num = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str())
        throw DomainError("from_text: bad rational '" + s + "'");
    long long den = 1;
    if (slash != std::string::npos) {
        const std::string d = s.substr(slash + 1);
        den = std::strtoll(d.c_str(), &end, 10);
        if (end == d.c_str() || den == 0)
            throw DomainError("from_text: bad rational '" + s + "'");
    }
    return Rational(num, den);
}

SymbolicExponent parse_form(const std::string& in) {
    SymbolicExponent e;
    if (in == "0")
        return e;
    std::size_t pos = 0;
    int sign = 1;
    if (!in.empty() && in[0] == '-') {
        sign = -1;
        pos = 1;
    }
    while (pos < in.size()) {
        std::size_t plus = in.find(" + ", pos);
        std::size_t minus = in.find(" - ", pos);
        std::size_t cut = std::min(plus, minus);
        const std::string comp = in.substr(pos, cut == std::string::npos ? cut : cut - pos);

        const std::size_t star = comp.find('*');
        Rational r = parse_rational(star == std::string::npos ? comp : comp.substr(0, star));
        if (sign < 0)
            r = -r;
        if (star == std::string::npos) {
            e.c0 = e.c0 + r;
        } else {
            const std::string var = comp.substr(star + 1);
            if (var == "d")
                e.cd = e.cd + r;
            else if (var == "alpha")
                e.ca = e.ca + r;
            else if (var == "beta")
                e.cb = e.cb + r;
            else
                throw DomainError("from_text: unknown exponent symbol '" + var + "'");
        }
        if (cut == std::string::npos)
            break;
        sign = (cut == minus) ? -1 : 1;
        pos = cut + 3;
    }
    return e;
}

} // namespace

std::string to_text(const FormalSeries& s) {
    std::string out = "FormalSeries d=" + fmt17(s.d) + " alpha=" + fmt17(s.alpha) +
                      " beta=" + (s.beta ? fmt17(*s.beta) : std::string("none")) + "\n";
    out += "note: " + s.truncation_note + "\n";
    for (const Term& t : s.terms) {
        std::string line = fmt17(t.coeff);
        for (int i = 0; i < n_scales; ++i)
            if (!t.exponent[i].is_zero())
                line += std::string(" * ") + scale_name(static_cast<Scale>(i)) + "^(" +
                        form_text(t.exponent[i]) + ")";
        for (int i = 0; i < n_scales; ++i)
            if (t.log_power[i] != 0) {
                line += std::string(" * ln") + scale_name(static_cast<Scale>(i));
                if (t.log_power[i] != 1)
                    line += "^" + std::to_string(t.log_power[i]);
            }
        out += line + "\n";
    }
    return out;
}

FormalSeries from_text(const std::string& text) {
    FormalSeries s;
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string line =
            text.substr(pos, nl == std::string::npos ? nl : nl - pos);
        lines.push_back(line);
        if (nl == std::string::npos)
            break;
        pos = nl + 1;
    }
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    if (lines.size() < 2 || lines[0].rfind("FormalSeries ", 0) != 0)
        throw DomainError("from_text: missing series header");

    {
        // header: FormalSeries d=<v> alpha=<v> beta=<v|none>
        const std::string& h = lines[0];
        auto field = [&h](const char* key) -> std::string {
            const std::string k = std::string(" ") + key + "=";
            const std::size_t at = h.find(k);
            if (at == std::string::npos)
                throw DomainError(std::string("from_text: header lacks ") + key);
            const std::size_t start = at + k.size();
            const std::size_t end = h.find(' ', start);
            return h.substr(start, end == std::string::npos ? end : end - start);
        };
        s.d = std::strtod(field("d").c_str(), nullptr);
        s.alpha = std::strtod(field("alpha").c_str(), nullptr);
        const std::string b = field("beta");
        if (b != "none")
            s.beta = std::strtod(b.c_str(), nullptr);
    }

    if (lines[1].rfind("note:", 0) != 0)
        throw DomainError("from_text: missing note line");
    s.truncation_note = lines[1].size() > 6 ? lines[1].substr(6)
                        : std::string();

    for (std::size_t li = 2; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        if (line.empty())
            continue;
        Term t;
        std::size_t p = 0;
        int factor_index = 0;
        while (p <= line.size()) {
            std::size_t cut = line.find(" * ", p);
            const std::string tok =
                line.substr(p, cut == std::string::npos ? cut : cut - p);
            if (factor_index == 0) {
                t.coeff = std::strtod(tok.c_str(), nullptr);
            } else if (tok.rfind("ln", 0) == 0) {
                const std::size_t caret = tok.find('^');
                const std::string name =
                    tok.substr(2, caret == std::string::npos ? caret : caret - 2);
                const auto sc = scale_from_name(name);
                if (!sc)
                    throw DomainError("from_text: unknown scale '" + name + "'");
                t.log_power[static_cast<int>(*sc)] =
                    caret == std::string::npos
                        ? 1
                        : static_cast<int>(std::strtol(tok.c_str() + caret + 1, nullptr, 10));
            } else {
                const std::size_t caret = tok.find("^(");
                if (caret == std::string::npos || tok.back() != ')')
                    throw DomainError("from_text: bad factor '" + tok + "'");
                const auto sc = scale_from_name(tok.substr(0, caret));
                if (!sc)
                    throw DomainError("from_text: unknown scale in '" + tok + "'");
                t.exponent[static_cast<int>(*sc)] =
                    parse_form(tok.substr(caret + 2, tok.size() - caret - 3));
            }
            ++factor_index;
            if (cut == std::string::npos)
                break;
            p = cut + 3;
        }
        s.terms.push_back(t);
    }
    return s;
}

CommutationReport commutes_with_mass_derivative(const Params& p, const SchemeSpec& s, double h) {
    if (!(p.m2 > 0.0))
        throw DomainError("commutes_with_mass_derivative: need m2 > 0");
    if (!(h > 0.0) || !(h < p.m2))
        throw DomainError("commutes_with_mass_derivative: need 0 < h < m2");

    Params up = p;
    up.alpha += 1.0;
    for (const Params* q : {&p, static_cast<const Params*>(&up)}) {
        const dimreg::DomainVerdict v = dimreg::classify(*q);
        if (v.kind == dimreg::VerdictKind::pole) {
            const double x = q->alpha - q->d / 2.0;
            const double k = std::round(x);
            throw PoleError("commutes_with_mass_derivative", k, std::fabs(x - k));
        }
        if (v.kind == dimreg::VerdictKind::unsupported)
            throw DomainError("commutes_with_mass_derivative: " + v.reason);
    }

    const std::vector<Scale> all = {Scale::K, Scale::delta, Scale::xi};
    auto extracted = [&s, &all](const Params& q) {
        const FormalSeries fs = schemes::scheme_series(q, s, 24);
        return eval_at(extract_multi(normalize(fs), all), {});
    };

    CommutationReport rep;
    rep.lhs = p.alpha * extracted(up);
    Params plus = p, minus = p;
    plus.m2 += h;
    minus.m2 -= h;
    rep.rhs = -(extracted(plus) - extracted(minus)) / (2.0 * h);
    const double denom = std::max({std::fabs(rep.lhs), std::fabs(rep.rhs), 1e-300});
    rep.residual = std::fabs(rep.lhs - rep.rhs) / denom;
    rep.passed = rep.residual <= 1e-5;
    return rep;
}

} // namespace series
} // namespace loopreg
