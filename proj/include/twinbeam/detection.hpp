#ifndef TWINBEAM_DETECTION_HPP_
#define TWINBEAM_DETECTION_HPP_

// Lossy detection: beam-splitter loss with equal transmission on both arms,
// photon-count thinning, and gamma estimators from finite count records.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twinbeam/core.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/fockspace.hpp"
#include "twinbeam/params.hpp"
#include "twinbeam/random.hpp"

namespace twinbeam {

class LossModel {
public:
    LossModel() = default;
    explicit LossModel(double tau) : tau_(tau) {
        if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
    }

    double tau() const noexcept { return tau_; }

private:
    double tau_ = 1.0;
};

/// Moments seen through the loss: <N> = tau <n>,
/// <N^2> = tau^2 <n^2> + tau (1 - tau) <n>, <N1 N2> = tau^2 <n1 n2>.
inline TwoModeMoments lossy_moments(const TwoModeMoments& m, const LossModel& loss) noexcept {
    const double t = loss.tau();
    const double shot = t * (1.0 - t);
    TwoModeMoments out;
    out.n1 = t * m.n1;
    out.n2 = t * m.n2;
    out.var1 = t * t * m.var1 + shot * m.n1;
    out.var2 = t * t * m.var2 + shot * m.n2;
    out.cov12 = t * t * m.cov12;
    out.varH = t * t * m.varH + shot * (m.n1 + m.n2);
    return out;
}

/// Gammas of the detected counts. They are tau times the lossless values;
/// the thresholds (signs) do not move. Undefined at the origin and at tau = 0.
inline GammaReport gamma_with_loss(const PdcParams& p, const LossModel& loss) {
    if (p.is_origin() || loss.tau() == 0.0) return {};
    return gammas_from_moments(lossy_moments(output_moments(p), loss));
}

/// Keeps each photon independently with probability tau on each arm.
inline std::vector<CountPair> thin_counts(std::span<const CountPair> events, const LossModel& loss,
                                          std::uint64_t seed, unsigned workers = default_workers()) {
    std::vector<CountPair> out(events.begin(), events.end());
    const double tau = loss.tau();
    if (tau == 1.0) return out;
    for_each_chunk(out.size(), workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = make_stream(seed, chunk, 0x7419'b1e5ULL);
        for (std::size_t i = begin; i < end; ++i) {
            out[i].k = binomial_draw(rng, out[i].k, tau);
            out[i].l = binomial_draw(rng, out[i].l, tau);
        }
    });
    return out;
}

/// Accumulated photon-count statistics. Besides the power sums the record
/// keeps the (k, l) histogram, which is what the bootstrap resamples.
class CountRecord {
public:
    CountRecord() = default;
    explicit CountRecord(std::span<const CountPair> events) {
        for (const auto& e : events) add(e.k, e.l);
    }

    void add(long k, long l, std::uint64_t count = 1) {
        if (k < 0 || l < 0) throw std::invalid_argument("photon counts must be non-negative");
        if (count == 0) return;
        const auto uk = static_cast<std::uint64_t>(k);
        const auto ul = static_cast<std::uint64_t>(l);
        trials_ += count;
        sum_k_ += count * uk;
        sum_l_ += count * ul;
        sum_kk_ += count * uk * uk;
        sum_ll_ += count * ul * ul;
        sum_kl_ += count * uk * ul;
        histogram_[{k, l}] += count;
    }

    /// Associative and commutative.
    CountRecord& merge(const CountRecord& other) {
        for (const auto& [kl, c] : other.histogram_) add(kl.first, kl.second, c);
        return *this;
    }

    std::uint64_t trials() const noexcept { return trials_; }
    std::uint64_t sum_k() const noexcept { return sum_k_; }
    std::uint64_t sum_l() const noexcept { return sum_l_; }
    std::uint64_t sum_kk() const noexcept { return sum_kk_; }
    std::uint64_t sum_ll() const noexcept { return sum_ll_; }
    std::uint64_t sum_kl() const noexcept { return sum_kl_; }
    const std::map<std::pair<long, long>, std::uint64_t>& histogram() const noexcept { return histogram_; }

    /// Cauchy-Schwarz consistency of the power sums.
    bool consistent() const noexcept {
        if (trials_ == 0) return sum_k_ == 0 && sum_l_ == 0;
        const double n = static_cast<double>(trials_);
        const double sk = static_cast<double>(sum_k_), sl = static_cast<double>(sum_l_);
        return static_cast<double>(sum_kk_) * (1 + 1e-12) >= sk * sk / n &&
               static_cast<double>(sum_ll_) * (1 + 1e-12) >= sl * sl / n;
    }

    /// Sample moments with unbiased (n - 1) variance and covariance.
    TwoModeMoments sample_moments() const {
        if (trials_ < 2) throw InsufficientData("at least two events are needed for sample moments");
        const double n = static_cast<double>(trials_);
        const double sk = static_cast<double>(sum_k_), sl = static_cast<double>(sum_l_);
        TwoModeMoments m;
        m.n1 = sk / n;
        m.n2 = sl / n;
        m.var1 = (static_cast<double>(sum_kk_) - sk * sk / n) / (n - 1.0);
        m.var2 = (static_cast<double>(sum_ll_) - sl * sl / n) / (n - 1.0);
        m.cov12 = (static_cast<double>(sum_kl_) - sk * sl / n) / (n - 1.0);
        // Computed from the difference sums directly to avoid cancellation.
        const double sh = sk - sl;
        const double shh = static_cast<double>(sum_kk_) + static_cast<double>(sum_ll_) -
                           2.0 * static_cast<double>(sum_kl_);
        m.varH = (shh - sh * sh / n) / (n - 1.0);
        return m;
    }

private:
    std::uint64_t trials_ = 0;
    std::uint64_t sum_k_ = 0;
    std::uint64_t sum_l_ = 0;
    std::uint64_t sum_kk_ = 0;
    std::uint64_t sum_ll_ = 0;
    std::uint64_t sum_kl_ = 0;
    std::map<std::pair<long, long>, std::uint64_t> histogram_;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct GammaEstimate {
    Estimate gamma_c;
    std::optional<Estimate> gamma_n;  // absent for more than one mode pair
    Estimate gamma_e;
    Region region = Region::Undefined;
    TwoModeMoments moments;
    std::uint64_t trials = 0;
};

struct BootstrapOptions {
    int resamples = 200;
    std::uint64_t seed = 0x600d'5eedULL;
};

namespace detail {

/// Sequential-binomial multinomial draw over histogram cells; builds the
/// resampled record directly.
inline CountRecord multinomial_resample(const std::vector<std::pair<std::pair<long, long>, double>>& cells,
                                        std::uint64_t trials, Rng& rng) {
    CountRecord rec;
    std::uint64_t remaining = trials;
    double mass_left = 1.0;
    for (std::size_t i = 0; i < cells.size() && remaining > 0; ++i) {
        const double pcell = cells[i].second;
        std::uint64_t c;
        if (i + 1 == cells.size() || pcell >= mass_left) {
            c = remaining;
        } else {
            std::binomial_distribution<std::uint64_t> bin(remaining, pcell / mass_left);
            c = bin(rng);
        }
        rec.add(cells[i].first.first, cells[i].first.second, c);
        remaining -= c;
        mass_left -= pcell;
    }
    return rec;
}

} // namespace detail

/// Plug-in gamma estimates from a count record, with nonparametric bootstrap
/// standard errors. With n_modes > 1 the entanglement witness uses the
/// multimode correction and the negativity estimate is omitted.
inline GammaEstimate estimate_gammas(const CountRecord& rec, int n_modes = 1, BootstrapOptions opts = {}) {
    if (rec.trials() < 2) throw InsufficientData("at least two events are needed to estimate gammas");
    if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");

    GammaEstimate est;
    est.trials = rec.trials();
    est.moments = rec.sample_moments();
    if (!(est.moments.total() > 0.0)) throw InsufficientData("no photons were counted");
    const GammaReport point = gammas_from_moments(est.moments, n_modes);

    std::vector<std::pair<std::pair<long, long>, double>> cells;
    cells.reserve(rec.histogram().size());
    const double n = static_cast<double>(rec.trials());
    for (const auto& [kl, c] : rec.histogram()) cells.push_back({kl, static_cast<double>(c) / n});

    double sc = 0, scc = 0, sn = 0, snn = 0, se = 0, see = 0;
    int used = 0;
    Rng rng = make_stream(opts.seed, rec.trials(), 0xb007ULL);
    for (int b = 0; b < opts.resamples; ++b) {
        const CountRecord boot = detail::multinomial_resample(cells, rec.trials(), rng);
        const TwoModeMoments bm = boot.sample_moments();
        if (!(bm.total() > 0.0)) continue;
        const GammaReport g = gammas_from_moments(bm, n_modes);
        sc += g.gamma_c;
        scc += g.gamma_c * g.gamma_c;
        se += g.gamma_e;
        see += g.gamma_e * g.gamma_e;
        if (n_modes == 1) {
            sn += g.gamma_n;
            snn += g.gamma_n * g.gamma_n;
        }
        ++used;
    }
    auto spread = [used](double s, double ss) {
        if (used < 2) return 0.0;
        const double var = (ss - s * s / used) / (used - 1);
        return var > 0.0 ? std::sqrt(var) : 0.0;
    };

    est.gamma_c = {point.gamma_c, spread(sc, scc)};
    est.gamma_e = {point.gamma_e, spread(se, see)};
    if (n_modes == 1) est.gamma_n = Estimate{point.gamma_n, spread(sn, snn)};
    est.region = point.region;
    return est;
}

} // namespace twinbeam

#endif // TWINBEAM_DETECTION_HPP_
