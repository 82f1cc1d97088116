#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "twinbeam/core.hpp"
#include "twinbeam/fockspace.hpp"

using namespace twinbeam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("block_unitary at r = 0 is the identity", "[fock][block]") {
    const auto u = block_unitary(0.0, 0.4, 3, 12);
    CHECK((u.matrix - Eigen::MatrixXcd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(u.unitarity_defect() < 1e-14);
}

TEST_CASE("vacuum column of block 0 carries the twin-beam Schmidt weights", "[fock][block]") {
    auto schmidt = [](double muk, int n) { return std::pow(muk, n) / std::pow(1.0 + muk, n + 1); };
    {
        const double muk = 0.01;
        const auto u = block_unitary(std::asinh(std::sqrt(muk)), 0.7, 0, 60);
        for (int n = 0; n < 30; ++n) CHECK_THAT(std::norm(u.matrix(n, 0)), WithinAbs(schmidt(muk, n), 1e-12));
    }
    // Stronger gain: the leading half of a block is no longer representable,
    // but its vacuum column still is.
    for (double muk : {0.1, 0.5, 1.0}) {
        const auto probs = detail::block_probabilities(std::asinh(std::sqrt(muk)), 0, 120);
        CHECK(probs.edge_leak(0) < 1e-20);
        for (int n = 0; n < 30; ++n) CHECK_THAT(probs.prob(n, 0), WithinAbs(schmidt(muk, n), 1e-12));
    }
}

TEST_CASE("block column norms stay within the truncation budget", "[fock][block]") {
    const double r = std::asinh(std::sqrt(0.05));
    for (int d : {-4, 0, 1, 5}) {
        const auto u = block_unitary(r, 1.3, d, 80);
        CHECK(u.unitarity_defect() < 1e-8);
        for (int b = 0; b < 30; ++b) {
            CHECK(u.column_norm(b) <= 1.0 + 1e-12);
            CHECK(u.column_norm(b) >= 1.0 - 1e-8);
        }
    }
}

TEST_CASE("blocks match a dense two-mode matrix exponential", "[fock][block][oracle]") {
    const int n = 14;
    const double r = std::asinh(std::sqrt(0.005)), phi = 0.8;
    const Eigen::MatrixXcd dense = oracle::dense_squeezer(r, phi, n);
    for (int d : {-3, -1, 0, 2, 3}) {
        const int dabs = std::abs(d);
        const auto u = block_unitary(r, phi, d, 20);
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                const int row = d >= 0 ? (a + dabs) * n + a : a * n + (a + dabs);
                const int col = d >= 0 ? (b + dabs) * n + b : b * n + (b + dabs);
                CHECK(std::abs(u.matrix(a, b) - dense(row, col)) < 1e-7);
            }
        }
    }
}

TEST_CASE("dense propagator realizes A1 = alpha a1 + e^{i phi} beta a2^dag", "[fock][oracle]") {
    // Pins the sign and phase convention of the generator against the
    // Bogoliubov map used by the Gaussian description.
    const int n = 16;
    const double muk = 0.04, phi = 1.1;
    const double r = std::asinh(std::sqrt(muk));
    const Eigen::MatrixXcd U = oracle::dense_squeezer(r, phi, n);
    const Eigen::MatrixXcd a1 = oracle::dense_annihilator(1, n), a2 = oracle::dense_annihilator(2, n);
    const Eigen::MatrixXcd lhs = U.adjoint() * a1 * U;
    const Eigen::MatrixXcd rhs = std::sqrt(1 + muk) * a1 + std::polar(std::sqrt(muk), phi) * a2.adjoint();
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
            for (int kk = 0; kk < 4; ++kk)
                for (int ll = 0; ll < 4; ++ll)
                    CHECK(std::abs(lhs(k * n + l, kk * n + ll) - rhs(k * n + l, kk * n + ll)) < 1e-6);
}

TEST_CASE("block_unitary errors", "[fock][block]") {
    CHECK_THROWS_AS(block_unitary(-0.1, 0, 0, 10), std::invalid_argument);
    CHECK_THROWS_AS(block_unitary(0.1, 0, 0, 1), std::invalid_argument);
    // the leading half of the columns spreads in proportion to the depth, so
    // strong squeezing fails at any depth
    for (int depth : {40, 160}) CHECK_THROWS_AS(block_unitary(std::asinh(1.0), 0, 0, depth), TruncationError);
    CHECK_THROWS_AS(block_unitary(std::asinh(std::sqrt(0.1)), 0, 0, 80), TruncationError);
    try {
        block_unitary(std::asinh(1.0), 0, 0, 40);
    } catch (const TruncationError& e) {
        CHECK(e.defect() > 1e-8);
    }
}

TEST_CASE("joint_pmf examples", "[fock][pmf]") {
    const auto vac = joint_pmf(PdcParams(0, 0, 0));
    CHECK(vac(0, 0) == 1.0);
    double rest = 0.0;
    for (int k = 0; k < vac.cutoff; ++k)
        for (int l = 0; l < vac.cutoff; ++l)
            if (k || l) rest += vac(k, l);
    CHECK(rest == 0.0);

    const auto twb = joint_pmf(PdcParams(0, 0, 0.5));
    for (int n = 0; n < 20; ++n) {
        CHECK_THAT(twb(n, n), WithinAbs(std::pow(0.5, n) / std::pow(1.5, n + 1), 1e-12));
        for (int m = 0; m < 20; ++m)
            if (m != n) CHECK(twb(n, m) < 1e-15);
    }

    const auto seeded = joint_pmf(PdcParams(1, 0, 0.3));
    const auto m = seeded.moments();
    CHECK_THAT(m.n1 - m.n2, WithinAbs(1.0, 1e-8));
    CHECK(seeded.trace_defect < 1e-8);
}

TEST_CASE("joint_pmf is non-negative, phase independent and traces to one", "[fock][pmf]") {
    const auto a = joint_pmf(PdcParams(0.7, 0.4, 0.3, 0.0));
    const auto b = joint_pmf(PdcParams(0.7, 0.4, 0.3, 2.5));
    REQUIRE(a.cutoff == b.cutoff);
    double maxdiff = 0.0;
    for (std::size_t i = 0; i < a.probs.size(); ++i) {
        CHECK(a.probs[i] >= -1e-18);
        maxdiff = std::max(maxdiff, std::abs(a.probs[i] - b.probs[i]));
    }
    CHECK(maxdiff == 0.0);
    CHECK(std::abs(a.trace_defect) < 1e-8);
    CHECK(a.padding_leak < kPaddingLeakTolerance);
}

TEST_CASE("joint_pmf rejects a cutoff that loses mass", "[fock][pmf]") {
    CHECK_THROWS_AS(joint_pmf(PdcParams(2, 1, 0.5), 8), TruncationError);
}

TEST_CASE("joint_pmf moments match the analytic moments", "[fock][pmf][property]") {
    oracle::Gen gen(31);
    for (int i = 0; i < 6; ++i) {
        const PdcParams p(gen.uniform(0, 1.5), gen.uniform(0, 1.5), gen.uniform(0, 0.5));
        const auto pmf = joint_pmf(p);
        const auto f = pmf.moments();
        const auto a = output_moments(p);
        CHECK_THAT(f.n1, WithinRel(a.n1, 1e-6));
        CHECK_THAT(f.n2, WithinRel(a.n2, 1e-6));
        CHECK_THAT(f.var1, WithinRel(a.var1, 1e-6));
        CHECK_THAT(f.var2, WithinRel(a.var2, 1e-6));
        CHECK_THAT(f.cov12, WithinRel(a.cov12, 1e-6));
        CHECK_THAT(f.varH, WithinRel(a.varH, 1e-6));
        CHECK(pmf.trace_defect < 1e-8);
    }
}

TEST_CASE("gammas from the Fock pmf reproduce the closed forms", "[fock][pmf][property]") {
    for (double mu1 : oracle::linspace(0, 1.5, 5)) {
        for (double mu2 : oracle::linspace(0, 1.5, 5)) {
            for (double muk : {0.1, 0.3, 0.5}) {
                const PdcParams p(mu1, mu2, muk);
                const auto g = gammas_from_moments(joint_pmf(p).moments());
                CHECK_THAT(g.gamma_c, WithinAbs(gamma_c(p), 1e-5));
                CHECK_THAT(g.gamma_n, WithinAbs(gamma_n(p), 1e-5));
                CHECK_THAT(g.gamma_e, WithinAbs(gamma_e(p), 1e-5));
            }
        }
    }
}

TEST_CASE("Fock oracle confirms gamma_c(1, 1, 1) = 0.5", "[fock][pmf]") {
    const auto g = gammas_from_moments(joint_pmf(PdcParams(1, 1, 1)).moments());
    CHECK_THAT(g.gamma_c, WithinAbs(0.5, 1e-6));
    CHECK_THAT(g.gamma_n, WithinAbs(0.5, 1e-6));
    CHECK_THAT(g.gamma_e, WithinAbs(0.5, 1e-6));
}

TEST_CASE("sampler without gain returns its inputs", "[fock][sampler]") {
    const FockSampler s(PdcParams(1.2, 0.4, 0.0));
    const auto ev = s.sample_events(5000, 3);
    for (const auto& e : ev) {
        CHECK(e.out.k == e.n);
        CHECK(e.out.l == e.m);
    }
}

TEST_CASE("sampler is deterministic and independent of worker count", "[fock][sampler]") {
    const FockSampler s(PdcParams(0.5, 0.8, 0.3));
    const auto a = s.sample(30000, 99, 1);
    const auto b = s.sample(30000, 99, 1);
    const auto c = s.sample(30000, 99, 4);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a != s.sample(30000, 100, 1));
}

TEST_CASE("sampled outputs conserve the photon-number difference", "[fock][sampler]") {
    const FockSampler s(PdcParams(0.9, 0.6, 0.4));
    for (const auto& e : s.sample_events(20000, 7)) CHECK(e.out.k - e.out.l == e.n - e.m);
}

TEST_CASE("sampler mean difference at (2, 0, 1)", "[fock][sampler]") {
    const auto ev = sample_counts(PdcParams(2, 0, 1), 100000, 2024);
    double s = 0, ss = 0;
    for (const auto& e : ev) {
        const double d = static_cast<double>(e.k - e.l);
        s += d;
        ss += d * d;
    }
    const double n = static_cast<double>(ev.size());
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    CHECK(std::abs(mean - 2.0) < 3.0 * se);
    CHECK_THROWS_AS(sample_counts(PdcParams(1, 1, 1), 0, 1), std::invalid_argument);
}

TEST_CASE("sampled joint frequencies follow the pmf", "[fock][sampler][oracle]") {
    const PdcParams p(0.6, 0.3, 0.2);
    const auto pmf = joint_pmf(p);
    const std::size_t trials = 200000;
    const auto ev = FockSampler(p).sample(trials, 5);
    const int cells = 6;
    std::vector<std::uint64_t> obs(cells * cells + 1, 0);
    std::vector<double> expected(cells * cells + 1, 0.0);
    for (const auto& e : ev) {
        if (e.k < cells && e.l < cells)
            ++obs[e.k * cells + e.l];
        else
            ++obs.back();
    }
    double inside = 0.0;
    for (int k = 0; k < cells; ++k)
        for (int l = 0; l < cells; ++l) inside += expected[k * cells + l] = pmf(k, l);
    expected.back() = 1.0 - inside;
    // keep only cells with meaningful expectation; the rest merge forward
    const auto [chi2, dof] = oracle::chi_square(obs, expected, trials);
    // 99.9% quantile of chi2 with dof <= 36 is below 68
    CHECK(dof > 5);
    CHECK(chi2 < 68.0);
}
