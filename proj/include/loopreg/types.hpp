#ifndef LOOPREG_TYPES_HPP
#define LOOPREG_TYPES_HPP

#include <optional>
#include <string>

namespace loopreg {

// One-loop integral parameters. d is the dimension, alpha the propagator
// power on the m^2 line; beta/M2 are only present for two-mass integrands.
// Mass ordering convention: M2 >= m2 > 0 whenever both are set.
struct Params {
    double d = 0.0;
    double alpha = 0.0;
    double m2 = 0.0;
    std::optional<double> beta{};
    std::optional<double> M2{};

    bool two_mass() const { return beta.has_value() && M2.has_value(); }
};

enum class Family {
    cutoff_uv,
    gaussian_uv,
    ir_window,
    gaussian_ir,
    two_sided_gaussian,
    separate_cutoff,
    separate_two_sided,
    mellin_demo,
    quartic_demo,
};

const char* family_name(Family f);

// Regulator scales for one scheme family. Exactly the scales the family
// uses must be set; validate() enforces that.
struct SchemeSpec {
    Family family = Family::cutoff_uv;
    std::optional<double> K{};      // hard cutoff (and 1/K window edge)
    std::optional<double> delta{};  // Gaussian damping scale
    std::optional<double> xi{};     // second damping scale of the two-sided scheme
    std::optional<double> z{};      // Mellin demo regulator
    std::optional<double> a{};      // quartic demo coupling

    void validate() const; // throws DomainError on a scale mismatch
};

enum class Provenance { closed_form, series, quadrature, demo };

const char* provenance_name(Provenance p);

struct EvalResult {
    double value = 0.0;
    double abs_err = 0.0;
    Provenance provenance = Provenance::closed_form;
    std::string note{};
};

} // namespace loopreg

#endif
