#ifndef TWINBEAM_CORE_HPP_
#define TWINBEAM_CORE_HPP_

#include <cmath>
#include <limits>
#include <optional>
#include <string_view>

#include "twinbeam/errors.hpp"
#include "twinbeam/params.hpp"

namespace twinbeam {

/// Values within this distance of zero count as non-violating.
inline constexpr double kBoundaryTolerance = 1e-12;

/// First and second photon-number moments of the two output modes.
struct TwoModeMoments {
    double n1 = 0.0;
    double n2 = 0.0;
    double var1 = 0.0;
    double var2 = 0.0;
    double cov12 = 0.0;
    double varH = 0.0;  // variance of H = n1 - n2

    double total() const noexcept { return n1 + n2; }
    double difference() const noexcept { return n1 - n2; }
};

enum class Region {
    Separable,
    EntangledOnly,
    EntangledSubshot,
    EntangledSubshotNegative,
    Undefined,
};

constexpr std::string_view to_string(Region r) noexcept {
    switch (r) {
    case Region::Separable: return "Separable";
    case Region::EntangledOnly: return "EntangledOnly";
    case Region::EntangledSubshot: return "EntangledSubshot";
    case Region::EntangledSubshotNegative: return "EntangledSubshotNegative";
    case Region::Undefined: return "Undefined";
    }
    return "Undefined";
}

inline std::optional<Region> region_from_string(std::string_view s) noexcept {
    for (Region r : {Region::Separable, Region::EntangledOnly, Region::EntangledSubshot,
                     Region::EntangledSubshotNegative, Region::Undefined})
        if (to_string(r) == s) return r;
    return std::nullopt;
}

struct GammaReport {
    double gamma_c = std::numeric_limits<double>::quiet_NaN();
    double gamma_n = std::numeric_limits<double>::quiet_NaN();
    double gamma_e = std::numeric_limits<double>::quiet_NaN();
    Region region = Region::Undefined;

    bool defined() const noexcept { return region != Region::Undefined; }
};

/// Critical muk values at which each gamma crosses zero.
struct Thresholds {
    double muk_n = 0.0;
    double muk_c = 0.0;
    double muk_e = 0.0;
};

inline bool violates(double gamma) noexcept { return gamma > kBoundaryTolerance; }

/// Nested region from the gamma signs. The nesting is imposed by the order of
/// the tests, so an entangled verdict is a prerequisite for the others.
inline Region classify(double gamma_c, double gamma_n, double gamma_e) noexcept {
    if (std::isnan(gamma_c) || std::isnan(gamma_e)) return Region::Undefined;
    if (!violates(gamma_e)) return Region::Separable;
    if (!violates(gamma_c)) return Region::EntangledOnly;
    if (std::isnan(gamma_n) || !violates(gamma_n)) return Region::EntangledSubshot;
    return Region::EntangledSubshotNegative;
}

/// Output moments. Each mode is marginally thermal with mean
/// mu_j + muk (1 + mu1 + mu2); the difference photocurrent noise does not
/// depend on the gain.
inline TwoModeMoments output_moments(const PdcParams& p) noexcept {
    const double mu1 = p.mu1();
    const double mu2 = p.mu2();
    const double pairs = p.muk() * (1.0 + (mu1 + mu2));
    TwoModeMoments m;
    m.n1 = mu1 + pairs;
    m.n2 = mu2 + pairs;
    m.var1 = m.n1 * (m.n1 + 1.0);
    m.var2 = m.n2 * (m.n2 + 1.0);
    m.varH = mu1 * (1.0 + mu1) + mu2 * (1.0 + mu2);
    m.cov12 = 0.5 * (m.var1 + m.var2 - m.varH);
    return m;
}

namespace detail {

inline double gamma_denominator(const PdcParams& p) {
    if (p.is_origin())
        throw UndefinedPointError("nonclassicality parameters are undefined at mu1 = mu2 = muk = 0");
    return 2.0 * p.muk() * (1.0 + (p.mu1() + p.mu2())) + (p.mu1() + p.mu2());
}

} // namespace detail

/// Sub-shot-noise parameter, 1 - <dH^2> / (<n1> + <n2>).
inline double gamma_c(const PdcParams& p) {
    const double den = detail::gamma_denominator(p);
    const double mu1 = p.mu1(), mu2 = p.mu2();
    return (2.0 * p.muk() * (1.0 + (mu1 + mu2)) - (mu1 * mu1 + mu2 * mu2)) / den;
}

/// Lee-criterion negativity parameter.
inline double gamma_n(const PdcParams& p) {
    const double den = detail::gamma_denominator(p);
    const double mu1 = p.mu1(), mu2 = p.mu2();
    return 2.0 * (p.muk() * (1.0 + (mu1 + mu2)) - (mu1 * mu1 + mu2 * mu2) + mu1 * mu2) / den;
}

/// Entanglement parameter; positive iff the PPT criterion is violated.
inline double gamma_e(const PdcParams& p) {
    const double den = detail::gamma_denominator(p);
    const double mu1 = p.mu1(), mu2 = p.mu2();
    return 2.0 * (p.muk() * (1.0 + (mu1 + mu2)) - mu1 * mu2) / den;
}

inline Thresholds thresholds(double mu1, double mu2) {
    if (!(mu1 >= 0.0) || !(mu2 >= 0.0) || !std::isfinite(mu1) || !std::isfinite(mu2))
        throw std::invalid_argument("seed intensities must be finite and non-negative");
    const double s = 1.0 + (mu1 + mu2);
    return Thresholds{
        .muk_n = (mu1 * mu1 + mu2 * mu2 - mu1 * mu2) / s,
        .muk_c = (mu1 * mu1 + mu2 * mu2) / (2.0 * s),
        .muk_e = mu1 * mu2 / s,
    };
}

inline Region classify_region(const PdcParams& p) noexcept {
    if (p.is_origin()) return Region::Undefined;
    return classify(gamma_c(p), gamma_n(p), gamma_e(p));
}

/// All three parameters and the region; Undefined (NaN values) at the origin.
inline GammaReport gamma_report(const PdcParams& p) noexcept {
    if (p.is_origin()) return {};
    GammaReport r{gamma_c(p), gamma_n(p), gamma_e(p), Region::Undefined};
    r.region = classify(r.gamma_c, r.gamma_n, r.gamma_e);
    return r;
}

/// The gammas evaluated from measured moments rather than from the closed
/// forms. `n_modes` is the number of identical mode pairs contributing to the
/// counts; it only enters the entanglement witness. The negativity parameter
/// is left NaN when n_modes > 1.
inline GammaReport gammas_from_moments(const TwoModeMoments& m, int n_modes = 1) {
    if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
    const double total = m.total();
    if (!(total > 0.0)) throw UndefinedPointError("gammas are undefined for zero mean photon number");
    const double d2 = m.difference() * m.difference();
    GammaReport r;
    r.gamma_c = 1.0 - m.varH / total;
    if (n_modes == 1) r.gamma_n = 1.0 - (m.varH + d2) / total;
    r.gamma_e = 1.0 - (m.varH - d2 / n_modes) / total;
    r.region = classify(r.gamma_c, r.gamma_n, r.gamma_e);
    return r;
}

} // namespace twinbeam

#endif // TWINBEAM_CORE_HPP_
