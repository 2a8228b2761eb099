#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "twirlbench/noise_models.hpp"
#include "twirlbench/twirl.hpp"

using namespace twirlbench;

namespace {

/// Signed permutation R with u sigma_k u^dag = sum_j R_jk sigma_j, or all
/// zeros if u is not Clifford.
Eigen::Matrix3i bloch_action(const Matrix2c& u) {
    Eigen::Matrix3i r = Eigen::Matrix3i::Zero();
    for (int k = 0; k < 3; ++k) {
        const Matrix2c img = u * oracle::pauli(k + 1) * u.adjoint();
        for (int j = 0; j < 3; ++j) {
            const double overlap = (oracle::pauli(j + 1) * img).trace().real() / 2.0;
            if (std::abs(std::abs(overlap) - 1.0) < 1e-12) r(j, k) = overlap > 0 ? 1 : -1;
        }
    }
    return r;
}

double off_block_max(const Matrix16& m) {
    double worst = 0.0;
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b)
            if (a != b) worst = std::max(worst, std::abs(m(a, b)));
    return worst;
}

TransferMatrix16 random_channel(CounterRng& rng) {
    // Random unitary followed by amplitude damping: CPTP, non-unital, generic.
    const auto u = ptm_from_unitary(haar_unitary4(rng));
    return ptm_compose(noise_to_ptm(noise::AmplitudeDamping{0.2, 0.05}), u);
}

}  // namespace

TEST(Cliffords, ConjugatePaulisToSignedPaulis) {
    const auto& set = single_qubit_cliffords();
    ASSERT_EQ(set.size(), 24u);
    EXPECT_LT(oracle::max_abs(set[0] - Matrix2c::Identity()), 1e-15);
    for (const auto& e : set.elements()) {
        const Matrix2c img = e * oracle::pauli(3) * e.adjoint();
        bool hit = false;
        for (int j = 1; j <= 3; ++j)
            for (double sign : {1.0, -1.0}) hit = hit || oracle::max_abs(img - sign * oracle::pauli(j)) < 1e-12;
        EXPECT_TRUE(hit);
    }
}

TEST(Cliffords, RealizeEachOctahedralRotationOnce) {
    std::set<std::vector<int>> seen;
    for (const auto& e : single_qubit_cliffords().elements()) {
        const Eigen::Matrix3i r = bloch_action(e);
        ASSERT_EQ(r.cwiseAbs().sum(), 3);  // a signed permutation
        ASSERT_EQ(r.cast<double>().determinant(), 1.0);
        seen.insert(std::vector<int>(r.data(), r.data() + 9));
    }
    EXPECT_EQ(seen.size(), 24u);
}

TEST(Cliffords, ClosedUnderProducts) {
    const auto& set = single_qubit_cliffords();
    for (const auto& x : set.elements())
        for (const auto& y : set.elements()) ASSERT_GE(set.find(x * y), 0);
}

TEST(LocalCliffords, TableMatchesKroneckerProducts) {
    const auto& ptms = local_clifford_ptms();
    for (std::size_t k : {0ul, 1ul, 25ul, 300ul, 575ul}) {
        const auto& c = single_qubit_cliffords();
        const oracle::M4 g = oracle::kron(c[k / 24], c[k % 24]);
        EXPECT_LT(oracle::max_abs(local_clifford(k).matrix() - g), 1e-15);
        EXPECT_LT(oracle::max_abs(ptms[k].matrix() - oracle::ptm_unitary(g)), 1e-14);
    }
}

TEST(TwirlExact, IdentityFixed) {
    EXPECT_LT(oracle::max_abs(twirl_exact(TransferMatrix16::identity()).matrix() - Matrix16::Identity()), 1e-14);
}

TEST(TwirlExact, CzBlockScalars) {
    const auto t = twirl_exact(ptm_from_unitary(gates::cz()));
    const auto iso = twirl_project(t);
    EXPECT_NEAR(iso.a, 1.0 / 3, 1e-14);
    EXPECT_NEAR(iso.b, 1.0 / 3, 1e-14);
    EXPECT_NEAR(iso.c, 1.0 / 9, 1e-14);
    EXPECT_LT(oracle::max_abs(t.matrix() - iso_to_ptm(iso).matrix()), 1e-14);
}

TEST(TwirlExact, IdempotentBlockDiagonalAndLinear) {
    CounterRng rng(53);
    for (int k = 0; k < 5; ++k) {
        const auto m = random_channel(rng);
        const auto n = random_channel(rng);
        const auto t = twirl_exact(m);
        EXPECT_LT(off_block_max(t.matrix()), 1e-10);
        EXPECT_LT(oracle::max_abs(twirl_exact(t).matrix() - t.matrix()), 1e-10);
        const auto iso = twirl_project(m);
        EXPECT_LT(oracle::max_abs(t.matrix() - iso_to_ptm(iso).matrix()), 1e-10);
        const TransferMatrix16 mix(0.3 * m.matrix() + 0.7 * n.matrix());
        EXPECT_LT(oracle::max_abs(twirl_exact(mix).matrix() -
                                  (0.3 * t.matrix() + 0.7 * twirl_exact(n).matrix())),
                  1e-12);
    }
}

TEST(TwirlExact, PreservesCompletePositivity) {
    CounterRng rng(59);
    for (int k = 0; k < 5; ++k) {
        const auto report = is_cptp(twirl_exact(random_channel(rng)));
        EXPECT_TRUE(report.ok);
        EXPECT_GE(report.min_choi_eigenvalue, -1e-9);
    }
}

TEST(TwirlExact, AgreesWithHaarMonteCarlo) {
    CounterRng rng(61);
    const auto m = random_channel(rng);
    constexpr int kSamples = 100000;
    Matrix16 sum = Matrix16::Zero(), sum_sq = Matrix16::Zero();
    for (int k = 0; k < kSamples; ++k) {
        const auto g = ptm_from_unitary(TwoQubitUnitary::local(haar_unitary2(rng), haar_unitary2(rng)));
        const Matrix16 term = g.matrix().transpose() * m.matrix() * g.matrix();
        sum += term;
        sum_sq += term.cwiseProduct(term);
    }
    const Matrix16 mean = sum / kSamples;
    const Matrix16 var = (sum_sq / kSamples - mean.cwiseProduct(mean)) / (kSamples - 1);
    const Matrix16 exact = twirl_exact(m).matrix();
    // 256 entries at 3 SE each: ~0.7 excursions are expected by chance alone,
    // so count them against the null rate and cap every entry at 5 SE.
    int beyond3 = 0;
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) {
            const double se = std::sqrt(std::max(var(a, b), 0.0));
            const double dev = std::abs(mean(a, b) - exact(a, b));
            if (dev > 3 * se + 1e-12) ++beyond3;
            EXPECT_LE(dev, 5 * se + 1e-12) << a << "," << b;
        }
    EXPECT_LE(beyond3, 4);  // P(X >= 5) ~ 6e-4 for Binomial(256, 0.0027)
    const auto mc = twirl_project(TransferMatrix16(mean)).as_vector();
    const auto ex = twirl_project(TransferMatrix16(exact)).as_vector();
    EXPECT_LT((mc - ex).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(TwirlProject, BasicChannels) {
    const auto id = twirl_project(TransferMatrix16::identity());
    EXPECT_EQ(id, (IsoChannel{1, 1, 1}));
    const auto dep = twirl_project(noise_to_ptm(noise::GlobalDepolarizing{0.1}));
    EXPECT_NEAR(dep.a, 0.9, 1e-15);
    EXPECT_NEAR(dep.b, 0.9, 1e-15);
    EXPECT_NEAR(dep.c, 0.9, 1e-15);
}

TEST(TwirlProject, LocalDepolarizingFromKrausOracle) {
    const double p1 = 0.04, p2 = 0.1;
    // Kraus set of independent depolarizing channels, built here from Paulis.
    std::vector<oracle::M4> kraus;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double w1 = i == 0 ? 1 - 3 * p1 / 4 : p1 / 4;
            const double w2 = j == 0 ? 1 - 3 * p2 / 4 : p2 / 4;
            kraus.push_back(std::sqrt(w1 * w2) * oracle::kron(oracle::pauli(i), oracle::pauli(j)));
        }
    const TransferMatrix16 m(oracle::ptm_kraus(kraus));
    const auto iso = twirl_project(m);
    EXPECT_NEAR(iso.a, 1 - p1, 1e-14);
    EXPECT_NEAR(iso.b, 1 - p2, 1e-14);
    EXPECT_NEAR(iso.c, (1 - p1) * (1 - p2), 1e-14);
    const auto exact = twirl_project(twirl_exact(m));
    EXPECT_NEAR(exact.c, iso.c, 1e-14);
}

TEST(IsoToPtm, ExamplesAndRoundTrip) {
    EXPECT_EQ(iso_to_ptm({1, 1, 1}).matrix(), Matrix16::Identity());
    EXPECT_EQ(iso_to_ptm({0, 0, 0}).matrix(), TransferMatrix16::fully_depolarizing().matrix());
    const IsoChannel x{0.9, -0.3, 0.45};
    const auto back = twirl_project(iso_to_ptm(x));
    EXPECT_NEAR(back.a, x.a, 1e-15);
    EXPECT_NEAR(back.b, x.b, 1e-15);
    EXPECT_NEAR(back.c, x.c, 1e-15);
}

TEST(MuFull, Examples) {
    EXPECT_DOUBLE_EQ(mu_full({1, 1, 1}), 1.0);
    EXPECT_NEAR(mu_full({0.97, 0.97, 0.97}), 0.97, 1e-15);
    const double a = 0.99, b = 0.95, c = 0.93;
    const IsoChannel averaged{2 * c / 3 + a / 3, 2 * c / 3 + b / 3, 5 * c / 9 + 2 * a / 9 + 2 * b / 9};
    EXPECT_NEAR(mu_full(averaged), mu_full({a, b, c}), 1e-15);
}
