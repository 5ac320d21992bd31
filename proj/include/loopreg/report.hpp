#ifndef LOOPREG_REPORT_HPP
#define LOOPREG_REPORT_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace loopreg {
namespace report {

// One evaluated point of a run. Absent optionals render as empty CSV cells
// and JSON nulls; `check` says which comparison or property the row reports.
struct Record {
    std::string scheme;
    std::string check;
    double d = 0.0;
    double alpha = 0.0;
    std::optional<double> beta;
    double m2 = 0.0;
    std::optional<double> M2;
    std::optional<double> K;
    std::optional<double> delta;
    std::optional<double> xi;
    std::optional<double> value;
    std::optional<double> err;
    std::optional<double> dimreg;
    std::optional<double> oracle;
    std::optional<double> residual_rel;
    std::string verdict; // ok | fail | pole | skip | convergent | continued ...
};

struct Summary {
    long total = 0;
    long passed = 0;
    long failed = 0;
    long skipped = 0;
    double max_residual = 0.0;
};

struct Report {
    std::vector<std::pair<std::string, std::string>> config; // ordered key/value
    std::vector<Record> records;
    Summary summary;
};

// Recounts the summary from the verdicts (fail counts as failed, pole/skip
// as skipped, everything else as passed) and records the largest residual.
Summary tally(const std::vector<Record>& records);

// 17-significant-digit rendering shared by all emitters; repeated runs of
// the same configuration are byte-identical.
std::string num17(double v);

std::string to_json(const Report& r);
std::string to_csv(const Report& r);
std::string to_text(const Report& r);

} // namespace report
} // namespace loopreg

#endif
