#ifndef TWINBEAM_FOCKSPACE_HPP_
#define TWINBEAM_FOCKSPACE_HPP_

// Truncated Fock-space treatment of the downconverter.
//
// The pair creation operator a1^dag a2^dag commutes with n1 - n2, so the
// evolution splits into blocks labelled by the photon-number difference d.
// Within block d (basis |m+d, m>, m = 0, 1, ...; mirrored for d < 0) the
// generator r (e^{i phi} a1^dag a2^dag - h.c.) is tridiagonal with couplings
// sqrt((m+|d|+1)(m+1)). A diagonal phase similarity maps it onto -i r T with
// T real symmetric, so every block is exp(-i r T) up to phases that never
// reach photon-counting probabilities.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twinbeam/core.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/params.hpp"
#include "twinbeam/random.hpp"

namespace twinbeam {

/// Per-marginal tail mass tolerated when the cutoff is chosen automatically.
inline constexpr double kAutoTailMass = 1e-12;
inline constexpr double kDefaultTraceTolerance = 1e-8;
inline constexpr double kPaddingLeakTolerance = 1e-12;

/// Thermal photon-number law p(n) = mu^n / (1+mu)^(n+1).
inline double thermal_probability(double mu, long n) {
    if (n < 0) return 0.0;
    if (mu <= 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(n) * std::log(mu / (1.0 + mu)) - std::log1p(mu));
}

/// Mass of the thermal law at n >= depth.
inline double thermal_tail(double mu, long depth) {
    if (depth <= 0) return 1.0;
    if (mu <= 0.0) return 0.0;
    return std::pow(mu / (1.0 + mu), static_cast<double>(depth));
}

inline long thermal_depth(double mu, double tail) {
    if (mu <= 0.0) return 1;
    return std::max<long>(1, static_cast<long>(std::ceil(std::log(tail) / std::log(mu / (1.0 + mu)))));
}

/// Smallest per-mode cutoff at which the thermal tails of both the inputs
/// and the (marginally thermal) outputs are below `tail`.
inline int auto_cutoff(const PdcParams& p, double tail = kAutoTailMass) {
    const TwoModeMoments m = output_moments(p);
    const long depth = std::max({thermal_depth(p.mu1(), tail), thermal_depth(p.mu2(), tail),
                                 thermal_depth(m.n1, tail), thermal_depth(m.n2, tail), 2L});
    if (depth > 4096) throw TruncationError("required Fock cutoff exceeds 4096", thermal_tail(m.n1, 4096));
    return static_cast<int>(depth);
}

namespace detail {

/// exp(-i r T) = A - i B on a depth-L block, where T is tridiagonal with
/// couplings sqrt((m+d+1)(m+1)) and A = Q cos(r Lambda) Q^T,
/// B = Q sin(r Lambda) Q^T are real symmetric.
struct BlockPropagator {
    Eigen::MatrixXd cos_part;
    Eigen::MatrixXd sin_part;

    Eigen::MatrixXcd complex() const {
        return cos_part.cast<std::complex<double>>() - std::complex<double>(0.0, 1.0) * sin_part.cast<std::complex<double>>();
    }

    /// max |(W^dag W - I)_{ij}| of the whole block; with A, B symmetric
    /// W^dag W = A^2 + B^2 + i (B A - A B).
    double unitarity_defect() const {
        const Eigen::MatrixXd ab = cos_part * sin_part;
        const Eigen::MatrixXd re = cos_part * cos_part + sin_part * sin_part -
                                   Eigen::MatrixXd::Identity(cos_part.rows(), cos_part.cols());
        const Eigen::MatrixXd im = ab.transpose() - ab;
        return std::max(re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff());
    }
};

inline BlockPropagator block_propagator(double r, int dabs, int depth) {
    BlockPropagator w;
    if (r == 0.0) {
        w.cos_part = Eigen::MatrixXd::Identity(depth, depth);
        w.sin_part = Eigen::MatrixXd::Zero(depth, depth);
        return w;
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(depth);
    Eigen::VectorXd sub(depth - 1);
    for (int m = 0; m + 1 < depth; ++m)
        sub(m) = std::sqrt(static_cast<double>(m + dabs + 1) * static_cast<double>(m + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalFailure("tridiagonal eigensolver did not converge");
    const Eigen::MatrixXd& q = es.eigenvectors();
    const Eigen::ArrayXd angle = r * es.eigenvalues().array();
    w.cos_part = q * angle.cos().matrix().asDiagonal() * q.transpose();
    w.sin_part = q * angle.sin().matrix().asDiagonal() * q.transpose();
    return w;
}

inline int padded_depth(int depth) { return 2 * depth + 16; }

struct BlockProbabilities {
    Eigen::MatrixXd prob;       // |<j|U|b>|^2 for j, b < depth
    Eigen::VectorXd edge_leak;  // per column: mass reaching the padded edge
    double unitarity_defect = 0.0;  // of the padded block, when requested
};

/// Squared block entries computed on a padded block. The padding absorbs the
/// truncation of the generator; `edge_leak` bounds what it failed to absorb.
inline BlockProbabilities block_probabilities(double r, int dabs, int depth, bool check_unitarity = false) {
    const int full = padded_depth(depth);
    const BlockPropagator w = block_propagator(r, dabs, full);
    constexpr int edge = 8;
    BlockProbabilities out;
    out.prob = w.cos_part.topLeftCorner(depth, depth).cwiseAbs2() + w.sin_part.topLeftCorner(depth, depth).cwiseAbs2();
    out.edge_leak = (w.cos_part.bottomLeftCorner(edge, depth).cwiseAbs2() +
                     w.sin_part.bottomLeftCorner(edge, depth).cwiseAbs2())
                        .colwise()
                        .sum()
                        .transpose();
    if (check_unitarity) out.unitarity_defect = w.unitarity_defect();
    return out;
}

} // namespace detail

/// One difference block of the downconversion unitary, truncated to the
/// leading `depth` Fock states.
struct BlockUnitary {
    int d = 0;
    int depth = 0;
    Eigen::MatrixXcd matrix;

    double column_norm(int b) const { return matrix.col(b).norm(); }

    /// max |(U^dag U - I)_{ij}| over the leading depth/2 columns.
    double unitarity_defect() const {
        const int inner = std::max(1, depth / 2);
        const Eigen::MatrixXcd lead = matrix.leftCols(inner);
        const Eigen::MatrixXcd gram = lead.adjoint() * lead;
        return (gram - Eigen::MatrixXcd::Identity(inner, inner)).cwiseAbs().maxCoeff();
    }
};

inline BlockUnitary block_unitary(double r, double phi, int d, int depth, double tolerance = 1e-8) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("squeeze magnitude must be >= 0");
    if (depth < 2) throw std::invalid_argument("block depth must be >= 2");
    const int dabs = d < 0 ? -d : d;
    const int full = detail::padded_depth(depth);
    const Eigen::MatrixXcd w = detail::block_propagator(r, dabs, full).complex();

    BlockUnitary u;
    u.d = d;
    u.depth = depth;
    u.matrix.resize(depth, depth);
    static constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int b = 0; b < depth; ++b) {
        for (int a = 0; a < depth; ++a) {
            const int k = a - b;
            u.matrix(a, b) = std::polar(1.0, k * phi) * kIPow[((k % 4) + 4) % 4] * w(a, b);
        }
    }
    const double defect = u.unitarity_defect();
    if (defect > tolerance)
        throw TruncationError("block depth " + std::to_string(depth) + " too shallow for r = " + std::to_string(r),
                              defect);
    return u;
}

/// Truncated joint photon-number distribution of the two output modes.
struct JointPhotonPmf {
    int cutoff = 0;
    std::vector<double> probs;  // row-major, index k * cutoff + l
    double trace_defect = 0.0;
    double padding_leak = 0.0;  // input-weighted mass that reached the block padding edge
    double block_unitarity_defect = 0.0;

    double operator()(int k, int l) const {
        return probs[static_cast<std::size_t>(k) * static_cast<std::size_t>(cutoff) + static_cast<std::size_t>(l)];
    }
    double& at(int k, int l) {
        return probs[static_cast<std::size_t>(k) * static_cast<std::size_t>(cutoff) + static_cast<std::size_t>(l)];
    }

    /// Moments of the (unrenormalized) truncated distribution.
    TwoModeMoments moments() const {
        double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
        for (int k = 0; k < cutoff; ++k) {
            for (int l = 0; l < cutoff; ++l) {
                const double p = (*this)(k, l);
                s1 += p * k;
                s2 += p * l;
                s11 += p * k * k;
                s22 += p * l * l;
                s12 += p * k * l;
            }
        }
        TwoModeMoments m;
        m.n1 = s1;
        m.n2 = s2;
        m.var1 = s11 - s1 * s1;
        m.var2 = s22 - s2 * s2;
        m.cov12 = s12 - s1 * s2;
        m.varH = m.var1 + m.var2 - 2.0 * m.cov12;
        return m;
    }
};

/// Output distribution, one difference block at a time:
/// p(k, l) = sum_{n-m = k-l} p1(n) p2(m) |<k,l|U|n,m>|^2.
/// `cutoff` <= 0 selects auto_cutoff(p).
/// With `check_unitarity` the numerical unitarity of every padded block is
/// recorded in block_unitarity_defect (roughly doubles the cost).
inline JointPhotonPmf joint_pmf(const PdcParams& p, int cutoff = 0, double tolerance = kDefaultTraceTolerance,
                                bool check_unitarity = false) {
    const int size = cutoff > 0 ? cutoff : auto_cutoff(p);
    const double r = p.squeeze();
    JointPhotonPmf pmf;
    pmf.cutoff = size;
    pmf.probs.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);

    std::vector<double> in1(size), in2(size);
    for (int n = 0; n < size; ++n) {
        in1[n] = thermal_probability(p.mu1(), n);
        in2[n] = thermal_probability(p.mu2(), n);
    }

    for (int dabs = 0; dabs < size; ++dabs) {
        const int depth = size - dabs;
        const auto block = detail::block_probabilities(r, dabs, depth, check_unitarity);
        pmf.block_unitarity_defect = std::max(pmf.block_unitarity_defect, block.unitarity_defect);
        const Eigen::MatrixXd& prob = block.prob;
        for (int sign : {+1, -1}) {
            if (sign < 0 && dabs == 0) continue;
            for (int b = 0; b < depth; ++b) {
                // input |b+dabs, b> for d >= 0, |b, b+dabs> for d < 0
                const double w = sign > 0 ? in1[b + dabs] * in2[b] : in1[b] * in2[b + dabs];
                if (w == 0.0) continue;
                pmf.padding_leak += w * block.edge_leak(b);
                for (int j = 0; j < depth; ++j) {
                    const double q = w * prob(j, b);
                    if (sign > 0)
                        pmf.at(j + dabs, j) += q;
                    else
                        pmf.at(j, j + dabs) += q;
                }
            }
        }
    }

    double mass = 0.0;
    for (double q : pmf.probs) mass += q;
    pmf.trace_defect = 1.0 - mass;
    if (pmf.padding_leak > kPaddingLeakTolerance)
        throw TruncationError("Fock block padding leaked " + std::to_string(pmf.padding_leak), pmf.padding_leak);
    if (pmf.trace_defect > tolerance)
        throw TruncationError("joint pmf trace defect " + std::to_string(pmf.trace_defect) + " exceeds tolerance",
                              pmf.trace_defect);
    return pmf;
}

struct CountPair {
    long k = 0;
    long l = 0;
    friend bool operator==(const CountPair&, const CountPair&) = default;
};

/// A sampled event together with the thermal input it was drawn from.
struct SampledEvent {
    long n = 0;
    long m = 0;
    CountPair out;
};

/// Exact ancestral sampler: thermal input (n, m), then an output inside
/// block d = n - m drawn from the squared block column by inverse CDF.
/// Cumulative columns are built once per |d|; sampling only reads them.
class FockSampler {
public:
    explicit FockSampler(const PdcParams& p, int cutoff = 0)
        : params_(p), cutoff_(cutoff > 0 ? cutoff : auto_cutoff(p)), identity_(p.muk() == 0.0) {
        if (identity_) return;
        const double r = p.squeeze();
        cdf_.resize(cutoff_);
        for (int dabs = 0; dabs < cutoff_; ++dabs) {
            const int depth = cutoff_ - dabs;
            const auto block = detail::block_probabilities(r, dabs, depth);
            const Eigen::MatrixXd& prob = block.prob;
            for (int b = 0; b < depth; ++b) {
                const double w = thermal_probability(p.mu1(), b + dabs) * thermal_probability(p.mu2(), b) +
                                 (dabs > 0 ? thermal_probability(p.mu1(), b) * thermal_probability(p.mu2(), b + dabs)
                                           : 0.0);
                padding_leak_ += w * block.edge_leak(b);
            }
            auto& table = cdf_[dabs];
            table.resize(static_cast<std::size_t>(depth) * static_cast<std::size_t>(depth));
            for (int b = 0; b < depth; ++b) {
                double acc = 0.0;
                for (int j = 0; j < depth; ++j) {
                    acc += prob(j, b);
                    table[static_cast<std::size_t>(b) * depth + j] = acc;
                }
            }
        }
        if (padding_leak_ > kPaddingLeakTolerance)
            throw TruncationError("Fock block padding leaked " + std::to_string(padding_leak_), padding_leak_);
    }

    const PdcParams& params() const noexcept { return params_; }
    int cutoff() const noexcept { return cutoff_; }
    double padding_leak() const noexcept { return padding_leak_; }

    SampledEvent draw(Rng& rng) const {
        SampledEvent ev;
        ev.n = thermal_draw(rng, params_.mu1());
        ev.m = thermal_draw(rng, params_.mu2());
        if (identity_) {
            ev.out = {ev.n, ev.m};
            return ev;
        }
        const long d = ev.n - ev.m;
        const long dabs = d < 0 ? -d : d;
        const long b = std::min(ev.n, ev.m);
        if (dabs >= cutoff_ || b >= cutoff_ - dabs)
            throw TruncationError("sampled input (" + std::to_string(ev.n) + ", " + std::to_string(ev.m) +
                                      ") beyond block depth",
                                  thermal_tail(std::max(params_.mu1(), params_.mu2()), cutoff_));
        const int depth = cutoff_ - static_cast<int>(dabs);
        const double* col = cdf_[dabs].data() + static_cast<std::size_t>(b) * depth;
        const double u = uniform01(rng) * col[depth - 1];
        const long j = std::upper_bound(col, col + depth, u) - col;
        const long jj = std::min<long>(j, depth - 1);
        ev.out = d >= 0 ? CountPair{jj + dabs, jj} : CountPair{jj, jj + dabs};
        return ev;
    }

    std::vector<SampledEvent> sample_events(std::size_t trials, std::uint64_t seed,
                                            unsigned workers = default_workers()) const {
        std::vector<SampledEvent> out(trials);
        for_each_chunk(trials, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
            Rng rng = make_stream(seed, chunk, kSamplerSalt);
            for (std::size_t i = begin; i < end; ++i) out[i] = draw(rng);
        });
        return out;
    }

    std::vector<CountPair> sample(std::size_t trials, std::uint64_t seed, unsigned workers = default_workers()) const {
        std::vector<CountPair> out(trials);
        for_each_chunk(trials, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
            Rng rng = make_stream(seed, chunk, kSamplerSalt);
            for (std::size_t i = begin; i < end; ++i) out[i] = draw(rng).out;
        });
        return out;
    }

private:
    static constexpr std::uint64_t kSamplerSalt = 0x5eed'f0c4ULL;

    PdcParams params_;
    int cutoff_;
    bool identity_;
    double padding_leak_ = 0.0;
    std::vector<std::vector<double>> cdf_;
};

inline std::vector<CountPair> sample_counts(const PdcParams& p, std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    return FockSampler(p).sample(trials, seed);
}

} // namespace twinbeam

#endif // TWINBEAM_FOCKSPACE_HPP_
