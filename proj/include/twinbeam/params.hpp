#ifndef TWINBEAM_PARAMS_HPP_
#define TWINBEAM_PARAMS_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace twinbeam {

/// Operating point of thermally seeded downconversion.
///
/// mu1, mu2 are the mean photon numbers of the two thermal seeds and muk is
/// the spontaneous downconversion yield sinh^2|kappa|. The pump phase is
/// stored normalized to [0, 2pi); intensity observables never depend on it.
class PdcParams {
public:
    PdcParams() = default;

    PdcParams(double mu1, double mu2, double muk, double phi = 0.0)
        : mu1_(mu1), mu2_(mu2), muk_(muk), phi_(normalize_phase(phi)) {
        check_mean("mu1", mu1);
        check_mean("mu2", mu2);
        check_mean("muk", muk);
        if (!std::isfinite(phi)) throw std::invalid_argument("phi must be finite");
    }

    double mu1() const noexcept { return mu1_; }
    double mu2() const noexcept { return mu2_; }
    double muk() const noexcept { return muk_; }
    double phi() const noexcept { return phi_; }

    /// Squeeze magnitude r = |kappa|, with sinh^2 r = muk.
    double squeeze() const noexcept { return std::asinh(std::sqrt(muk_)); }
    double alpha() const noexcept { return std::sqrt(1.0 + muk_); }
    double beta() const noexcept { return std::sqrt(muk_); }

    /// True for the all-vacuum operating point, where every gamma is 0/0.
    bool is_origin() const noexcept { return mu1_ == 0.0 && mu2_ == 0.0 && muk_ == 0.0; }

    PdcParams swapped() const { return PdcParams(mu2_, mu1_, muk_, phi_); }

    friend bool operator==(const PdcParams&, const PdcParams&) = default;

private:
    static void check_mean(const char* name, double v) {
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument(std::string(name) + " must be finite and non-negative");
    }

    static double normalize_phase(double phi) {
        if (!std::isfinite(phi)) return 0.0;
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double w = std::fmod(phi, two_pi);
        if (w < 0.0) w += two_pi;
        if (w >= two_pi) w = 0.0;
        return w;
    }

    double mu1_ = 0.0;
    double mu2_ = 0.0;
    double muk_ = 0.0;
    double phi_ = 0.0;
};

} // namespace twinbeam

#endif // TWINBEAM_PARAMS_HPP_
