#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "twinbeam/core.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/multimode.hpp"

using namespace twinbeam;
using Catch::Matchers::WithinAbs;

TEST_CASE("MultimodeParams validation", "[multimode]") {
    CHECK_THROWS_AS(MultimodeParams(0, PdcParams(1, 1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(MultimodeParams(std::vector<PdcParams>{}), std::invalid_argument);
    CHECK(MultimodeParams(3, PdcParams(1, 1, 1)).homogeneous());
    CHECK(MultimodeParams({PdcParams(1, 1, 1), PdcParams(1, 1, 1)}).homogeneous());
    CHECK_FALSE(MultimodeParams({PdcParams(1, 1, 0.5), PdcParams(0, 0, 0.5)}).homogeneous());
}

TEST_CASE("multimode_moments examples", "[multimode][moments]") {
    const PdcParams p(1, 2, 0.5);
    const auto one = multimode_moments(MultimodeParams(1, p));
    const auto ref = output_moments(p);
    CHECK(one.n1 == ref.n1);
    CHECK(one.n2 == ref.n2);
    CHECK(one.varH == ref.varH);
    CHECK(one.cov12 == ref.cov12);

    const auto ten = multimode_moments(MultimodeParams(10, p));
    CHECK_THAT(ten.n1, WithinAbs(30.0, 1e-12));
    CHECK_THAT(ten.n2, WithinAbs(40.0, 1e-12));
    CHECK_THAT(ten.varH, WithinAbs(10.0 * ref.varH, 1e-12));

    const auto het = multimode_moments(MultimodeParams({PdcParams(1, 1, 0.5), PdcParams(0, 0, 0.5)}));
    CHECK_THAT(het.varH, WithinAbs(4.0, 1e-14));
}

TEST_CASE("multimode SNL condition", "[multimode][snl]") {
    const auto v = multimode_snl_violation(MultimodeParams(7, PdcParams(2, 0, 1)));
    CHECK(v.violated);
    CHECK_THAT(v.margin, WithinAbs(0.25, 1e-12));
    CHECK_FALSE(multimode_snl_violation(MultimodeParams(3, PdcParams(1, 1, 0.1))).violated);

    oracle::Gen gen(51);
    for (int i = 0; i < 300; ++i) {
        const PdcParams p(gen.uniform(0, 3), gen.uniform(0, 3), gen.uniform(0, 1));
        const auto one = multimode_snl_violation(MultimodeParams(1, p));
        CHECK(one.violated == violates(gamma_c(p)));
        CHECK_THAT(multimode_snl_violation(MultimodeParams(gen.integer(1, 50), p)).margin,
                   WithinAbs(gamma_c(p), 1e-12));
    }
    CHECK_THROWS_AS(multimode_snl_violation(MultimodeParams(2, PdcParams(0, 0, 0))), UndefinedPointError);
}

TEST_CASE("multimode witness examples", "[multimode][witness]") {
    // N = 1 is the single-pair intensity witness
    const PdcParams p(1.5, 0.3, 0.4);
    const auto w1 = multimode_witness(output_moments(p), 1);
    CHECK_THAT(w1.margin, WithinAbs(gamma_e(p), 1e-12));
    CHECK(w1.violated == violates(gamma_e(p)));

    const auto w10 = multimode_witness(MultimodeParams(10, PdcParams(2, 0, 1)));
    CHECK_THAT(w10.margin, WithinAbs(0.75, 1e-12));
    CHECK(w10.violated);

    for (int n : {1, 2, 5, 40}) CHECK_FALSE(multimode_witness(MultimodeParams(n, PdcParams(1, 1, 0.1))).violated);
}

TEST_CASE("witness margin does not depend on the number of modes", "[multimode][witness][property]") {
    oracle::Gen gen(52);
    for (int i = 0; i < 500; ++i) {
        const PdcParams p(gen.uniform(0, 3), gen.uniform(0, 3), gen.uniform(0, 1));
        if (p.is_origin()) continue;
        const int n = gen.integer(1, 200);
        CHECK_THAT(multimode_witness(MultimodeParams(n, p)).margin, WithinAbs(gamma_e(p), 1e-12));
    }
}

TEST_CASE("omitting the mode number misclassifies separable states", "[multimode][witness]") {
    int disagreements = 0, false_positives = 0;
    for (double mu1 : oracle::linspace(0, 3, 16)) {
        for (double mu2 : oracle::linspace(0, 3, 16)) {
            if (mu1 == mu2) continue;
            for (double muk : oracle::linspace(0.0, 1.0, 11)) {
                const MultimodeParams mp(10, PdcParams(mu1, mu2, muk));
                const auto m = multimode_moments(mp);
                const bool corrected = multimode_witness(m, 10).violated;
                const bool naive = multimode_witness(m, 1).violated;
                if (corrected != naive) ++disagreements;
                if (naive && !corrected) ++false_positives;
            }
        }
    }
    CHECK(disagreements > 0);
    CHECK(false_positives == disagreements);
}

TEST_CASE("witness verdict survives loss", "[multimode][witness][property]") {
    oracle::Gen gen(53);
    for (int i = 0; i < 300; ++i) {
        const PdcParams p(gen.uniform(0, 3), gen.uniform(0, 3), gen.uniform(0, 1));
        if (std::abs(gamma_e(p)) < 1e-9) continue;
        const int n = gen.integer(1, 30);
        const auto m = multimode_moments(MultimodeParams(n, p));
        const bool ideal = multimode_witness(m, n).violated;
        for (double tau : {0.05, 0.5, 0.9, 1.0}) {
            const auto w = multimode_witness(lossy_moments(m, LossModel(tau)), n);
            CHECK(w.violated == ideal);
            CHECK_THAT(w.margin, WithinAbs(tau * gamma_e(p), 1e-12));
        }
    }
}

TEST_CASE("heterogeneous witness and multimode negativity are not applicable", "[multimode]") {
    const MultimodeParams het({PdcParams(1, 1, 0.5), PdcParams(0, 0, 0.5)});
    CHECK_THROWS_AS(multimode_witness(het), NotApplicable);
    CHECK_THROWS_AS(multimode_negativity(MultimodeParams(2, PdcParams(1, 0, 1))), NotApplicable);
    CHECK_THAT(multimode_negativity(MultimodeParams(1, PdcParams(2, 0, 1))), WithinAbs(-0.25, 1e-15));
    CHECK_THROWS_AS(multimode_witness(TwoModeMoments{}, 3), UndefinedPointError);
    CHECK_THROWS_AS(multimode_witness(output_moments(PdcParams(1, 0, 1)), 0), std::invalid_argument);
}
