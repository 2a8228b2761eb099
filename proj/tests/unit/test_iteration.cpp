#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "twirlbench/error.hpp"
#include "twirlbench/iteration.hpp"
#include "twirlbench/noise_models.hpp"

using namespace twirlbench;
constexpr double kPi = std::numbers::pi;

namespace {

Eigen::Matrix3d cz_matrix() {
    Eigen::Matrix3d m;
    m << 1.0 / 3, 0, 2.0 / 3, 0, 1.0 / 3, 2.0 / 3, 2.0 / 9, 2.0 / 9, 5.0 / 9;
    return m;
}

/// Random trace-preserving perturbation of the identity: D + eps X with X
/// zero on the trace row.
TransferMatrix16 perturbed_identity(const Matrix16& x, double eps) {
    return TransferMatrix16(Matrix16::Identity() + eps * x);
}

Matrix16 random_tp_direction(CounterRng& rng) {
    Matrix16 x;
    for (int i = 0; i < 256; ++i) x(i / 16, i % 16) = rng.normal();
    x.row(15).setZero();
    return x;
}

}  // namespace

TEST(M0Entries, NamedClasses) {
    const auto id = m0_entries_from_invariants({{1, 0}, 3});
    EXPECT_DOUBLE_EQ(id.m1, 1.0);
    EXPECT_DOUBLE_EQ(id.m2, 0.0);
    const auto cnot = m0_entries_from_invariants({{0, 0}, 1});
    EXPECT_NEAR(cnot.m1, 1.0 / 3, 1e-15);
    EXPECT_NEAR(cnot.m2, 0.0, 1e-15);
    const auto swap = m0_entries_from_invariants({{-1, 0}, -3});
    EXPECT_NEAR(swap.m1, 0.0, 1e-15);
    EXPECT_NEAR(swap.m2, 1.0, 1e-15);
    const auto root = m0_entries_from_invariants({{0, 0.25}, 0});
    EXPECT_NEAR(root.m1, 0.25, 1e-15);
    EXPECT_NEAR(root.m2, 0.25, 1e-15);
}

TEST(M0Entries, RejectsInadmissible) {
    try {
        (void)m0_entries_from_invariants({{0, 0}, 2.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InadmissibleInvariants);
    }
}

TEST(M0Matrix, Forms) {
    EXPECT_EQ(m0_matrix(1, 0).matrix(), Eigen::Matrix3d::Identity());
    Eigen::Matrix3d swap;
    swap << 0, 1, 0, 1, 0, 0, 0, 0, 1;
    EXPECT_EQ(m0_matrix(0, 1).matrix(), swap);
    EXPECT_LT(oracle::max_abs(m0_matrix(1.0 / 3, 0).matrix() - cz_matrix()), 1e-15);
    EXPECT_LT(m0_matrix(0.3, 0.2).error_free_relation_residual(), 1e-15);
}

TEST(M0Spectrum, Examples) {
    const auto id = m0_spectrum(1, 0);
    EXPECT_EQ(id, (std::array<double, 3>{1, 1, 1}));
    const auto swap = m0_spectrum(0, 1);
    EXPECT_EQ(swap, (std::array<double, 3>{1, -1, 1}));
    const auto w = m0_spectrum(0.2, 0.2);
    EXPECT_NEAR(w[1], 0.0, 1e-16);
    EXPECT_NEAR(w[2], 0.0, 1e-15);
}

TEST(M0Spectrum, FixedEigenvectors) {
    for (double m1 : {0.0, 0.2, 1.0 / 3, 0.6}) {
        for (double m2 : {0.0, 0.1, 0.4}) {
            const Eigen::Matrix3d m = m0_matrix(m1, m2).matrix();
            const auto s = m0_spectrum(m1, m2);
            const Eigen::Vector3d v[3] = {{1, 1, 1}, {1, -1, 0}, {3, 3, -2}};
            for (int k = 0; k < 3; ++k) EXPECT_LT((m * v[k] - s[k] * v[k]).cwiseAbs().maxCoeff(), 1e-15);
        }
    }
}

TEST(BuildM0, IdentityAndCz) {
    EXPECT_LT(oracle::max_abs(build_m0_from_gate(TwoQubitUnitary::identity()).matrix() - Eigen::Matrix3d::Identity()),
              1e-14);
    EXPECT_LT(oracle::max_abs(build_m0_from_gate(gates::cz()).matrix() - cz_matrix()), 1e-14);
}

TEST(BuildM0, AgreesWithInvariantRoute) {
    CounterRng rng(67);
    for (int k = 0; k < 100; ++k) {
        const auto u = haar_unitary4(rng);
        const auto twirled = build_m0_from_gate(u);
        const auto algebraic = m0_matrix(m0_entries_from_invariants(local_invariants(u)));
        ASSERT_LT(oracle::max_abs(twirled.matrix() - algebraic.matrix()), 1e-9);
        ASSERT_LT(twirled.error_free_relation_residual(), 1e-10);
    }
}

TEST(BuildM0, UnchangedByLocalDressing) {
    CounterRng rng(71);
    for (int k = 0; k < 20; ++k) {
        const auto u = haar_unitary4(rng);
        const auto dressed = TwoQubitUnitary::local(haar_unitary2(rng), haar_unitary2(rng)) * u *
                             TwoQubitUnitary::local(haar_unitary2(rng), haar_unitary2(rng));
        ASSERT_LT(oracle::max_abs(build_m0_from_gate(u).matrix() - build_m0_from_gate(dressed).matrix()), 1e-9);
    }
}

TEST(BuildM0, CommutingFamilyAndSpectralBound) {
    CounterRng rng(73);
    for (int k = 0; k < 50; ++k) {
        const auto a = build_m0_from_gate(haar_unitary4(rng)).matrix();
        const auto b = build_m0_from_gate(haar_unitary4(rng)).matrix();
        ASSERT_LT(oracle::max_abs(a * b - b * a), 1e-9);
        for (const auto& z : eig3(a)) ASSERT_LE(std::abs(z), 1 + 1e-9);
    }
}

TEST(BuildMWithNoise, ReducesAndConventions) {
    CounterRng rng(79);
    const auto u = haar_unitary4(rng);
    EXPECT_LT(oracle::max_abs(build_m_with_noise(u, TransferMatrix16::identity()).matrix() -
                              build_m0_from_gate(u).matrix()),
              1e-15);

    const double a = 0.99, b = 0.97, c = 0.98;
    const auto iso = iso_to_ptm({a, b, c});
    EXPECT_LT(oracle::max_abs(build_m_with_noise(TwoQubitUnitary::identity(), iso).matrix() -
                              Eigen::Vector3d(a, b, c).asDiagonal().toDenseMatrix()),
              1e-14);
    Eigen::Matrix3d swap_form;
    swap_form << 0, a, 0, b, 0, 0, 0, 0, c;
    EXPECT_LT(oracle::max_abs(build_m_with_noise(gates::swap(), iso).matrix() - swap_form), 1e-14);
}

TEST(BuildMWithNoise, RejectsNonTracePreserving) {
    Matrix16 m = Matrix16::Identity();
    m(15, 0) = 0.1;
    try {
        (void)build_m_with_noise(gates::cnot(), TransferMatrix16(m));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonTracePreserving);
    }
}

TEST(PredictF, Powers) {
    const auto m = m0_matrix(0.3, 0.1);
    EXPECT_EQ(predict_f(m, 0), (IsoChannel{1, 1, 1}));
    const IterationMatrix3 diag(Eigen::Vector3d(0.9, 0.8, 0.7).asDiagonal());
    const auto f = predict_f(diag, 13);
    EXPECT_NEAR(f.a, std::pow(0.9, 13), 1e-15);
    EXPECT_NEAR(f.b, std::pow(0.8, 13), 1e-15);
    EXPECT_NEAR(f.c, std::pow(0.7, 13), 1e-15);
    const Eigen::Vector3d direct = m.matrix() * m.matrix() * m.matrix() * Eigen::Vector3d::Ones();
    EXPECT_LT((predict_f(m, 3).as_vector() - direct).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PredictF, SwapParityPattern) {
    const double a = 0.99, b = 0.97, c = 0.98;
    const auto m = build_m_with_noise(gates::swap(), iso_to_ptm({a, b, c}));
    for (std::uint64_t k = 0; k < 6; ++k) {
        const auto even = predict_f(m, 2 * k);
        EXPECT_NEAR(even.a, std::pow(a * b, k), 1e-12);
        EXPECT_NEAR(even.b, std::pow(a * b, k), 1e-12);
        EXPECT_NEAR(even.c, std::pow(c, 2 * k), 1e-12);
        const auto odd = predict_f(m, 2 * k + 1);
        EXPECT_NEAR(odd.a, a * std::pow(a * b, k), 1e-12);
        EXPECT_NEAR(odd.b, b * std::pow(a * b, k), 1e-12);
        EXPECT_NEAR(odd.c, std::pow(c, 2 * k + 1), 1e-12);
    }
}

TEST(PredictF, LongPowersStayStable) {
    const auto m = m0_matrix(0.3, 0.1);
    const auto f = predict_f(m, 1000000);
    EXPECT_NEAR(f.a, 1.0, 1e-9);
    EXPECT_NEAR(f.c, 1.0, 1e-9);
}

TEST(Classify, Examples) {
    EXPECT_EQ(classify_gate(local_invariants(TwoQubitUnitary::identity())).kind, GateKind::NearIdentityFamily);
    EXPECT_EQ(classify_gate(local_invariants(TwoQubitUnitary::identity())).slow_eigenvalue_count, 3);
    EXPECT_EQ(classify_gate(local_invariants(gates::swap())).kind, GateKind::NearSwapFamily);
    const auto cnot = classify_gate(local_invariants(gates::cnot()));
    EXPECT_EQ(cnot.kind, GateKind::Generic);
    EXPECT_EQ(cnot.slow_eigenvalue_count, 1);
    EXPECT_EQ(classify_entries({0.97, 0.01}).kind, GateKind::NearIdentityFamily);
    EXPECT_EQ(classify_entries({0.97, 0.01}, 0.01).kind, GateKind::Generic);
}

TEST(RegionCheck, Examples) {
    EXPECT_TRUE(region_check(1.0 / 3, 0));
    EXPECT_FALSE(region_check(0.2, 0.05));
    EXPECT_FALSE(region_check(0.5, 0.5));
    EXPECT_TRUE(region_check(1, 0));
    EXPECT_TRUE(region_check(0.25, 0.25));
    // roundoff-sized entries next to the corners, as the twirl produces for SWAP
    EXPECT_TRUE(region_check(7.4e-17, 1 - 5.6e-16));
    EXPECT_TRUE(region_check(1 - 7.8e-16, 1.5e-16));
    EXPECT_FALSE(region_check(0.9, 0.01));
    EXPECT_FALSE(region_check(0.01, 0.9));
}

TEST(MuFirstOrder, Examples) {
    EXPECT_DOUBLE_EQ(mu_first_order(TransferMatrix16::identity()), 1.0);
    EXPECT_NEAR(mu_first_order(noise_to_ptm(noise::GlobalDepolarizing{0.03})), 0.97, 1e-15);
    const IsoChannel iso{0.99, 0.97, 0.95};
    EXPECT_NEAR(mu_first_order(iso_to_ptm(iso)), mu_full(iso), 1e-15);
}

TEST(MuFirstOrder, ErrorIsSecondOrder) {
    CounterRng rng(83);
    const auto u = haar_unitary4(rng);
    const Matrix16 x = random_tp_direction(rng);
    const double eps = 1e-3;
    const auto residual = [&](double e) {
        const auto lambda = perturbed_identity(x, e);
        return std::abs(top_eigenvalue(build_m_with_noise(u, lambda)) - mu_first_order(lambda));
    };
    EXPECT_NEAR(residual(eps) / residual(eps / 2), 4.0, 0.5);
}

TEST(MuSecondOrder, Examples) {
    EXPECT_NEAR(mu_second_order(0.97, 0.97, 0.97, 1.0 / 3, 0), 0.97, 1e-15);
    EXPECT_NEAR(mu_second_order(0.99, 0.95, 0.9, 0.2, 0.2), (0.99 + 0.95 + 3 * 0.9) / 5, 1e-15);
}

TEST(MuSecondOrder, ResidualIsThirdOrderOnCnot) {
    const auto value = [](double e) {
        const double a = 1 - e, b = 1 - 2 * e, c = 1 - 3 * e;
        const double exact = top_eigenvalue(build_m_with_noise(gates::cnot(), iso_to_ptm({a, b, c})));
        return std::abs(exact - mu_second_order(a, b, c, 1.0 / 3, 0));
    };
    EXPECT_NEAR(value(1e-2) / value(5e-3), 8.0, 1.5);
}

TEST(MuSecondOrder, DegenerateNearExceptionalGates) {
    for (const auto& e : {M0Entries{1, 0}, M0Entries{0, 1}}) {
        try {
            (void)mu_second_order(0.99, 0.98, 0.97, e.m1, e.m2);
            FAIL();
        } catch (const Error& err) {
            EXPECT_EQ(err.code(), ErrorCode::DegenerateGate);
        }
    }
}

TEST(SpecialFamily, EntriesAcrossLambda) {
    for (double lambda : {0.0, 0.17, 0.5, special_family_single_decay_lambda(), 0.9, 1.0}) {
        const auto w = special_family_gate(lambda);
        EXPECT_LT(w.unitarity_error(), 1e-12);
        const auto e = m0_entries_from_invariants(local_invariants(w));
        const double expected = (5 + std::cos(lambda * kPi)) / 24;
        EXPECT_NEAR(e.m1, expected, 1e-10);
        EXPECT_NEAR(e.m2, expected, 1e-10);
    }
    const auto e0 = m0_entries_from_invariants(local_invariants(special_family_gate(0)));
    EXPECT_NEAR(e0.m1, 0.25, 1e-12);
    const auto e1 = m0_entries_from_invariants(local_invariants(special_family_gate(1)));
    EXPECT_NEAR(e1.m1, 1.0 / 6, 1e-12);
}

TEST(SpecialFamily, SingleDecayPoint) {
    const double lambda = special_family_single_decay_lambda();
    EXPECT_NEAR(std::cos(lambda * kPi), -0.2, 1e-15);
    const auto ev = eig3(build_m0_from_gate(special_family_gate(lambda)).matrix());
    EXPECT_NEAR(std::abs(ev[0] - 1.0), 0.0, 1e-10);
    EXPECT_LT(std::abs(ev[1]), 1e-10);
    EXPECT_LT(std::abs(ev[2]), 1e-10);
}
