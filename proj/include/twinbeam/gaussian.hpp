#ifndef TWINBEAM_GAUSSIAN_HPP_
#define TWINBEAM_GAUSSIAN_HPP_

// Two-mode Gaussian description of the downconverted state.
//
// Conventions: hbar = 1, x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)),
// quadrature ordering (x1, p1, x2, p2), vacuum covariance diag(1/2, ...).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "twinbeam/errors.hpp"
#include "twinbeam/params.hpp"

namespace twinbeam {

inline constexpr double kVacuumVariance = 0.5;

using Matrix4 = Eigen::Matrix4d;

inline Matrix4 symplectic_form() {
    Matrix4 omega = Matrix4::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    return omega;
}

/// Phase-space map of the two-mode squeezer, i.e. the quadrature form of
/// A_j = alpha a_j + e^{i phi} beta a_j'^dag.
inline Matrix4 two_mode_squeezer(double alpha, double beta, double phi) {
    const double c = beta * std::cos(phi);
    const double s = beta * std::sin(phi);
    Matrix4 S;
    // clang-format off
    S << alpha, 0.0,   c,     s,
         0.0,   alpha, s,     -c,
         c,     s,     alpha, 0.0,
         s,     -c,    0.0,   alpha;
    // clang-format on
    return S;
}

struct CovarianceMatrix {
    Matrix4 sigma = kVacuumVariance * Matrix4::Identity();

    /// Mean photon number of mode j (0 or 1): (sigma_xx + sigma_pp - 1) / 2.
    double mean_photons(int mode) const {
        const int i = 2 * mode;
        return 0.5 * (sigma(i, i) + sigma(i + 1, i + 1) - 1.0);
    }

    bool is_symmetric(double tol = 1e-12) const {
        return (sigma - sigma.transpose()).cwiseAbs().maxCoeff() <= tol;
    }

    /// Smallest eigenvalue of sigma + (i/2) Omega; non-negative for physical states.
    double uncertainty_margin() const {
        const Eigen::Matrix4cd h =
            sigma.cast<std::complex<double>>() + std::complex<double>(0.0, 0.5) * symplectic_form();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    bool is_bona_fide(double tol = 1e-10) const {
        return is_symmetric() && uncertainty_margin() >= -tol;
    }
};

/// Thermal inputs propagated through the squeezer: S diag(mu+1/2) S^T.
inline CovarianceMatrix build_covariance(const PdcParams& p) {
    Eigen::Vector4d diag(p.mu1() + 0.5, p.mu1() + 0.5, p.mu2() + 0.5, p.mu2() + 0.5);
    const Matrix4 S = two_mode_squeezer(p.alpha(), p.beta(), p.phi());
    CovarianceMatrix cm;
    cm.sigma = S * diag.asDiagonal() * S.transpose();
    cm.sigma = 0.5 * (cm.sigma + cm.sigma.transpose()).eval();
    return cm;
}

/// Symplectic spectrum (ascending) from the eigenvalues of Omega sigma,
/// which come in purely imaginary pairs +- i nu.
inline std::array<double, 2> symplectic_eigenvalues(const Matrix4& sigma) {
    Eigen::EigenSolver<Matrix4> es(symplectic_form() * sigma, false);
    if (es.info() != Eigen::Success) throw NumericalFailure("symplectic spectrum did not converge");
    std::array<double, 4> nu{};
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    for (int i = 0; i < 4; ++i) {
        const auto ev = es.eigenvalues()(i);
        if (std::abs(ev.real()) > 1e-8 * scale)
            throw NumericalFailure("symplectic spectrum has a non-imaginary eigenvalue");
        nu[i] = std::abs(ev.imag());
    }
    std::sort(nu.begin(), nu.end());
    // pairs: (nu[0], nu[1]) and (nu[2], nu[3])
    if (std::abs(nu[0] - nu[1]) > 1e-8 * scale || std::abs(nu[2] - nu[3]) > 1e-8 * scale)
        throw NumericalFailure("symplectic spectrum is not paired");
    return {0.5 * (nu[0] + nu[1]), 0.5 * (nu[2] + nu[3])};
}

/// Partial transposition on mode 2 (p2 -> -p2).
inline Matrix4 partial_transpose(const Matrix4& sigma) {
    const Eigen::Vector4d flip(1.0, 1.0, 1.0, -1.0);
    return flip.asDiagonal() * sigma * flip.asDiagonal();
}

struct PptReport {
    double nu_minus = kVacuumVariance;
    bool entangled = false;
};

inline PptReport ppt_check(const CovarianceMatrix& cm) {
    const auto nu = symplectic_eigenvalues(partial_transpose(cm.sigma));
    if (!(nu[0] > 0.0)) throw NumericalFailure("non-positive partially transposed symplectic eigenvalue");
    return PptReport{nu[0], nu[0] < kVacuumVariance - 1e-12};
}

} // namespace twinbeam

#endif // TWINBEAM_GAUSSIAN_HPP_
