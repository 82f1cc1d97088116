#ifndef TWINBEAM_MULTIMODE_HPP_
#define TWINBEAM_MULTIMODE_HPP_

#include <stdexcept>
#include <vector>

#include "twinbeam/core.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/params.hpp"

namespace twinbeam {

/// N independent mode pairs. Either every pair shares `per_mode`
/// (homogeneous) or each pair has its own entry in `pairs`.
class MultimodeParams {
public:
    MultimodeParams(int n_modes, const PdcParams& per_mode) : n_modes_(n_modes), per_mode_(per_mode) {
        if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
    }

    explicit MultimodeParams(std::vector<PdcParams> pairs)
        : n_modes_(static_cast<int>(pairs.size())), pairs_(std::move(pairs)) {
        if (pairs_.empty()) throw std::invalid_argument("at least one mode pair is required");
        per_mode_ = pairs_.front();
    }

    int n_modes() const noexcept { return n_modes_; }

    bool homogeneous() const noexcept {
        for (const auto& p : pairs_)
            if (!(p == per_mode_)) return false;
        return true;
    }

    /// The shared per-pair parameters; only meaningful when homogeneous().
    const PdcParams& per_mode() const noexcept { return per_mode_; }

    const PdcParams& pair(int i) const { return pairs_.empty() ? per_mode_ : pairs_.at(i); }

private:
    int n_modes_;
    PdcParams per_mode_;
    std::vector<PdcParams> pairs_;
};

/// Pairs are mutually uncorrelated, so every moment is the sum over pairs.
inline TwoModeMoments multimode_moments(const MultimodeParams& mp) {
    TwoModeMoments total;
    for (int i = 0; i < mp.n_modes(); ++i) {
        const TwoModeMoments m = output_moments(mp.pair(i));
        total.n1 += m.n1;
        total.n2 += m.n2;
        total.var1 += m.var1;
        total.var2 += m.var2;
        total.cov12 += m.cov12;
        total.varH += m.varH;
    }
    return total;
}

struct WitnessResult {
    bool violated = false;
    double margin = 0.0;
};

/// Sub-shot-noise test summed over pairs, with margin
/// 1 - sum varH_xi / sum (n1_xi + n2_xi).
inline WitnessResult multimode_snl_violation(const MultimodeParams& mp) {
    const TwoModeMoments m = multimode_moments(mp);
    if (!(m.total() > 0.0)) throw UndefinedPointError("SNL margin is undefined for vacuum in every pair");
    const double margin = 1.0 - m.varH / m.total();
    return {violates(margin), margin};
}

/// Mode-number-corrected entanglement witness
///   <dH^2> - (<n1> - <n2>)^2 / N <= <n1> + <n2>  (separable side).
/// Valid for homogeneous multimode states; the margin then equals the
/// single-pair gamma_e for every N.
inline WitnessResult multimode_witness(const TwoModeMoments& m, int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
    if (!(m.total() > 0.0)) throw UndefinedPointError("witness margin is undefined at zero mean photon number");
    const double d = m.difference();
    const double margin = 1.0 - (m.varH - d * d / n_modes) / m.total();
    return {violates(margin), margin};
}

inline WitnessResult multimode_witness(const MultimodeParams& mp) {
    if (!mp.homogeneous())
        throw NotApplicable("the intensity entanglement witness only holds for homogeneous multimode states");
    return multimode_witness(multimode_moments(mp), mp.n_modes());
}

/// The Lee-criterion negativity exists only for a single pair of modes.
inline double multimode_negativity(const MultimodeParams& mp) {
    if (mp.n_modes() != 1) throw NotApplicable("negativity parameter does not extend to more than one mode pair");
    return gamma_n(mp.pair(0));
}

} // namespace twinbeam

#endif // TWINBEAM_MULTIMODE_HPP_
