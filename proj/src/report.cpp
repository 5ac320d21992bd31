#include "loopreg/report.hpp"

#include <cmath>
#include <cstdio>

namespace loopreg {
namespace report {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Summary tally(const std::vector<Record>& records) {
    Summary s;
    s.total = long(records.size());
    for (const Record& r : records) {
        if (r.verdict == "fail")
            ++s.failed;
        else if (r.verdict == "pole" || r.verdict == "skip")
            ++s.skipped;
        else
            ++s.passed;
        if (r.residual_rel && std::isfinite(*r.residual_rel))
            s.max_residual = std::max(s.max_residual, *r.residual_rel);
    }
    return s;
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    return num17(v);
}

std::string json_opt(const std::optional<double>& v) {
    return v ? json_number(*v) : std::string("null");
}

std::string csv_opt(const std::optional<double>& v) {
    return v ? num17(*v) : std::string();
}

} // namespace

std::string to_json(const Report& r) {
    std::string out = "{\n  \"config\": {";
    bool first = true;
    for (const auto& kv : r.config) {
        out += first ? "\n" : ",\n";
        first = false;
        out += "    \"" + json_escape(kv.first) + "\": \"" + json_escape(kv.second) + "\"";
    }
    out += first ? "}" : "\n  }";
    out += ",\n  \"records\": [";
    first = true;
    for (const Record& rec : r.records) {
        out += first ? "\n" : ",\n";
        first = false;
        out += "    {\"scheme\": \"" + json_escape(rec.scheme) + "\"";
        out += ", \"check\": \"" + json_escape(rec.check) + "\"";
        out += ", \"d\": " + json_number(rec.d);
        out += ", \"alpha\": " + json_number(rec.alpha);
        out += ", \"beta\": " + json_opt(rec.beta);
        out += ", \"m2\": " + json_number(rec.m2);
        out += ", \"M2\": " + json_opt(rec.M2);
        out += ", \"K\": " + json_opt(rec.K);
        out += ", \"delta\": " + json_opt(rec.delta);
        out += ", \"xi\": " + json_opt(rec.xi);
        out += ", \"value\": " + json_opt(rec.value);
        out += ", \"err\": " + json_opt(rec.err);
        out += ", \"dimreg\": " + json_opt(rec.dimreg);
        out += ", \"oracle\": " + json_opt(rec.oracle);
        out += ", \"residual_rel\": " + json_opt(rec.residual_rel);
        out += ", \"verdict\": \"" + json_escape(rec.verdict) + "\"}";
    }
    out += first ? "]" : "\n  ]";
    out += ",\n  \"summary\": {\"total\": " + std::to_string(r.summary.total);
    out += ", \"passed\": " + std::to_string(r.summary.passed);
    out += ", \"failed\": " + std::to_string(r.summary.failed);
    out += ", \"skipped\": " + std::to_string(r.summary.skipped);
    out += ", \"max_residual\": " + json_number(r.summary.max_residual);
    out += "}\n}\n";
    return out;
}

std::string to_csv(const Report& r) {
    std::string out =
        "scheme,check,d,alpha,beta,m2,M2,K,delta,xi,value,err,dimreg,oracle,residual_rel,verdict\n";
    for (const Record& rec : r.records) {
        out += rec.scheme + "," + rec.check + ",";
        out += num17(rec.d) + "," + num17(rec.alpha) + "," + csv_opt(rec.beta) + ",";
        out += num17(rec.m2) + "," + csv_opt(rec.M2) + ",";
        out += csv_opt(rec.K) + "," + csv_opt(rec.delta) + "," + csv_opt(rec.xi) + ",";
        out += csv_opt(rec.value) + "," + csv_opt(rec.err) + ",";
        out += csv_opt(rec.dimreg) + "," + csv_opt(rec.oracle) + ",";
        out += csv_opt(rec.residual_rel) + "," + rec.verdict + "\n";
    }
    out += "# summary: total=" + std::to_string(r.summary.total) +
           " passed=" + std::to_string(r.summary.passed) +
           " failed=" + std::to_string(r.summary.failed) +
           " skipped=" + std::to_string(r.summary.skipped) +
           " max_residual=" + num17(r.summary.max_residual) + "\n";
    return out;
}

std::string to_text(const Report& r) {
    std::string out;
    for (const auto& kv : r.config) out += "# " + kv.first + " = " + kv.second + "\n";
    for (const Record& rec : r.records) {
        out += rec.scheme + " " + rec.check;
        out += "  d=" + num17(rec.d) + " alpha=" + num17(rec.alpha);
        if (rec.beta) out += " beta=" + num17(*rec.beta);
        out += " m2=" + num17(rec.m2);
        if (rec.M2) out += " M2=" + num17(*rec.M2);
        if (rec.K) out += " K=" + num17(*rec.K);
        if (rec.delta) out += " delta=" + num17(*rec.delta);
        if (rec.xi) out += " xi=" + num17(*rec.xi);
        if (rec.value) out += "  value=" + num17(*rec.value);
        if (rec.err) out += " err=" + num17(*rec.err);
        if (rec.dimreg) out += " dimreg=" + num17(*rec.dimreg);
        if (rec.oracle) out += " oracle=" + num17(*rec.oracle);
        if (rec.residual_rel) out += " residual_rel=" + num17(*rec.residual_rel);
        out += "  [" + rec.verdict + "]\n";
    }
    out += "summary: total=" + std::to_string(r.summary.total) +
           " passed=" + std::to_string(r.summary.passed) +
           " failed=" + std::to_string(r.summary.failed) +
           " skipped=" + std::to_string(r.summary.skipped) +
           " max_residual=" + num17(r.summary.max_residual) + "\n";
    return out;
}

} // namespace report
} // namespace loopreg
