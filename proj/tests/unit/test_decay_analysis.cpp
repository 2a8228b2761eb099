#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "twirlbench/decay_analysis.hpp"
#include "twirlbench/error.hpp"
#include "twirlbench/noise_models.hpp"

using namespace twirlbench;

namespace {

constexpr double kInfiniteShots = 1e12;

DecaySeries exact_series(const IterationMatrix3& m, const std::vector<std::uint64_t>& lengths,
                         double samples = kInfiniteShots) {
    DecaySeries s;
    for (auto n : lengths) s.push_back({n, predict_probabilities(predict_f(m, n)), samples});
    return s;
}

std::vector<std::uint64_t> range(std::uint64_t from, std::uint64_t to) {
    std::vector<std::uint64_t> out;
    for (auto n = from; n <= to; ++n) out.push_back(n);
    return out;
}

void expect_code(ErrorCode code, const std::function<void()>& f) {
    try {
        f();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

double value(const DecayFit& fit, const char* name) { return fit.factor(name)->value; }
double sigma(const DecayFit& fit, const char* name) { return fit.factor(name)->stderr_value; }

}  // namespace

TEST(HadamardCombine, Examples) {
    EXPECT_EQ(hadamard_combine({1, 0, 0, 0}), (std::array<double, 4>{1, 1, 1, 1}));
    EXPECT_EQ(hadamard_combine({0.25, 0.25, 0.25, 0.25}), (std::array<double, 4>{0, 0, 0, 1}));
    const IsoChannel f{0.8, 0.6, 0.5};
    const auto h = hadamard_combine(predict_probabilities(f));
    EXPECT_NEAR(h[0], 0.5, 1e-15);
    EXPECT_NEAR(h[1], 0.6, 1e-15);
    EXPECT_NEAR(h[2], 0.8, 1e-15);
    expect_code(ErrorCode::MalformedProbabilities, [] { (void)hadamard_combine({0.5, 0.5, 0.5, 0}); });
}

TEST(SeriesFromRecords, PoolsCountsAndRejectsInconsistentTotals) {
    const std::vector<IrbRecord> recs = {{1, {70, 10, 15, 5}, 2, 50}};
    const auto s = series_from_records(recs);
    EXPECT_DOUBLE_EQ(s[0].samples, 100.0);
    EXPECT_DOUBLE_EQ(s[0].probabilities[0], 0.7);
    const std::vector<IrbRecord> bad = {{1, {70, 10, 15, 5}, 2, 60}};
    expect_code(ErrorCode::MalformedProbabilities, [&] { (void)series_from_records(bad); });
}

TEST(SingleExponential, ExactModelRecovery) {
    DecaySeries s;
    for (std::uint64_t n : {1, 2, 4, 8, 16, 32, 64}) {
        const double p = 0.75 * std::pow(0.97, n) + 0.25;
        s.push_back({n, {p, (1 - p) / 3, (1 - p) / 3, (1 - p) / 3}, 1e5});
    }
    const auto fit = fit_single_exponential(s);
    EXPECT_EQ(fit.mode, FitMode::SingleExponential);
    EXPECT_NEAR(value(fit, "mu"), 0.97, 1e-6);
    EXPECT_NEAR(fit.factors[0].amplitude, 0.75, 1e-6);
    EXPECT_NEAR(fit.offset, 0.25, 1e-6);
    EXPECT_LT(fit.residual_norm, 1e-6);
}

TEST(SingleExponential, NeedsThreeLengths) {
    DecaySeries s = {{1, {0.9, 0.05, 0.03, 0.02}, 100}, {2, {0.8, 0.1, 0.05, 0.05}, 100}};
    expect_code(ErrorCode::InsufficientData, [&] { (void)fit_single_exponential(s); });
}

TEST(SingleExponential, SimulatedCnotMatchesTopEigenvalue) {
    const auto lambda = noise_to_ptm(noise::GlobalDepolarizing{0.01});
    const SequenceSpec spec{{1, 2, 4, 8, 16, 32, 50}, 100, 1000, 20240611};
    const auto fit = fit_single_exponential(run_irb(gates::cnot(), lambda, spec));
    const double top = top_eigenvalue(build_m_with_noise(gates::cnot(), lambda));
    EXPECT_LE(std::abs(value(fit, "mu") - top), 3 * sigma(fit, "mu"));
}

TEST(SingleExponential, SpecialFamilyDecayIsSingleExponential) {
    const auto w = special_family_gate(special_family_single_decay_lambda());
    const auto lambda = noise_to_ptm(noise::Iso{0.99, 0.985, 0.98});
    const SequenceSpec spec{{1, 2, 4, 8, 16, 32, 64}, 100, 1000, 515};
    const auto fit = fit_single_exponential(run_irb(w, lambda, spec));
    EXPECT_GE(fit.reduced_chi2, 0.5);
    EXPECT_LE(fit.reduced_chi2, 2.0);
}

TEST(SingleExponential, SmallBiasOnGenericThreeExponentialCurves) {
    for (const auto& gate : {gates::cnot(), gates::iswap(), gates::sqrt_swap()}) {
        const auto m = build_m_with_noise(gate, iso_to_ptm({0.995, 0.99, 0.987}));
        const auto fit = fit_single_exponential(exact_series(m, range(30, 80)));
        EXPECT_LT(std::abs(value(fit, "mu") - top_eigenvalue(m)), 1e-4);
    }
}

TEST(SingleExponential, InvariantUnderShotRescalingAndDeterministic) {
    const auto lambda = noise_to_ptm(noise::GlobalDepolarizing{0.02});
    const SequenceSpec spec{{1, 2, 4, 8, 16, 32}, 20, 200, 8};
    auto recs = run_irb(gates::cz(), lambda, spec);
    const auto a = fit_single_exponential(recs);
    const auto again = fit_single_exponential(recs);
    EXPECT_EQ(value(a, "mu"), value(again, "mu"));
    EXPECT_EQ(sigma(a, "mu"), sigma(again, "mu"));
    for (auto& r : recs) {
        for (auto& c : r.counts) c *= 3;
        r.shots *= 3;
    }
    const auto scaled = fit_single_exponential(recs);
    EXPECT_NEAR(value(scaled, "mu"), value(a, "mu"), 1e-12);
}

TEST(IdentityCase, ExactChannelsRecovered) {
    const IsoChannel iso{0.99, 0.98, 0.97};
    const auto m = build_m_with_noise(TwoQubitUnitary::identity(), iso_to_ptm(iso));
    const auto fit = fit_identity_case(exact_series(m, {1, 2, 4, 8, 16, 32, 64}));
    EXPECT_NEAR(value(fit, "a"), 0.99, 1e-9);
    EXPECT_NEAR(value(fit, "b"), 0.98, 1e-9);
    EXPECT_NEAR(value(fit, "c"), 0.97, 1e-9);
    EXPECT_NEAR(*fit.mu_full, mu_full(iso), 1e-9);
    EXPECT_FALSE(fit.partial);
}

TEST(IdentityCase, LocalNoiseSatisfiesProductRule) {
    const auto lambda = noise_to_ptm(noise::LocalDepolarizing{0.01, 0.02});
    const SequenceSpec spec{{1, 2, 4, 8, 16, 32, 64}, 100, 1000, 31337};
    const auto fit = fit_identity_case(run_irb(TwoQubitUnitary::identity(), lambda, spec));
    const double a = value(fit, "a"), b = value(fit, "b"), c = value(fit, "c");
    const double s = std::sqrt(std::pow(sigma(fit, "c"), 2) + std::pow(b * sigma(fit, "a"), 2) +
                               std::pow(a * sigma(fit, "b"), 2));
    EXPECT_LE(std::abs(c - a * b), 3 * s);
}

TEST(IdentityCase, CorrelatedNoiseBreaksProductRule) {
    const auto lambda = noise_to_ptm(noise::CorrelatedZZ{0.3});
    const SequenceSpec spec{{1, 2, 4, 8, 16, 32, 64}, 100, 1000, 4242};
    const auto fit = fit_identity_case(run_irb(TwoQubitUnitary::identity(), lambda, spec));
    const double a = value(fit, "a"), b = value(fit, "b"), c = value(fit, "c");
    const double s = std::sqrt(std::pow(sigma(fit, "c"), 2) + std::pow(b * sigma(fit, "a"), 2) +
                               std::pow(a * sigma(fit, "b"), 2));
    EXPECT_GE(std::abs(c - a * b), 3 * s);
    // The injected triple itself, from the twirl.
    const auto iso = twirl_project(lambda);
    EXPECT_GT(iso.c - iso.a * iso.b, 0.03);
}

TEST(IdentityCase, ChannelsBelowNoiseFloor) {
    // Channels decay to nothing beyond the first point: only two usable points.
    const auto m = build_m_with_noise(TwoQubitUnitary::identity(), iso_to_ptm({0.9, 0.05, 0.05}));
    const auto fit = fit_identity_case(exact_series(m, {1, 2, 40, 80}, 1e4));
    EXPECT_TRUE(fit.partial);
    EXPECT_TRUE(fit.factor("a")->valid);
    EXPECT_FALSE(fit.factor("b")->valid);
    EXPECT_FALSE(fit.mu_full.has_value());
    const auto dead = build_m_with_noise(TwoQubitUnitary::identity(), iso_to_ptm({0.01, 0.01, 0.01}));
    expect_code(ErrorCode::ChannelBelowNoiseFloor, [&] { (void)fit_identity_case(exact_series(dead, {5, 6, 7}, 1e4)); });
}

TEST(SwapCase, ExactRecovery) {
    const IsoChannel iso{0.99, 0.97, 0.962};
    const auto m = build_m_with_noise(gates::swap(), iso_to_ptm(iso));
    const auto fit = fit_swap_case(exact_series(m, range(1, 20)));
    EXPECT_EQ(fit.mode, FitMode::SwapCase);
    EXPECT_NEAR(value(fit, "a"), 0.99, 1e-9);
    EXPECT_NEAR(value(fit, "b"), 0.97, 1e-9);
    EXPECT_NEAR(value(fit, "c"), 0.962, 1e-9);
    EXPECT_NEAR(*fit.mu_full, mu_full(iso), 1e-9);
}

TEST(SwapCase, EqualFactorsGiveSamePerStepDecay) {
    const auto m = build_m_with_noise(gates::swap(), iso_to_ptm({0.98, 0.98, 0.965}));
    const auto fit = fit_swap_case(exact_series(m, range(1, 12)));
    EXPECT_NEAR(value(fit, "a"), 0.98, 1e-9);
    EXPECT_NEAR(value(fit, "b"), 0.98, 1e-9);
    EXPECT_NEAR(std::sqrt(value(fit, "a") * value(fit, "b")), 0.98, 1e-9);
}

TEST(SwapCase, ParityImbalance) {
    const auto m = build_m_with_noise(gates::swap(), iso_to_ptm({0.99, 0.97, 0.962}));
    expect_code(ErrorCode::ParityImbalance, [&] { (void)fit_swap_case(exact_series(m, {2, 4, 6, 7})); });
    expect_code(ErrorCode::InsufficientData, [&] { (void)fit_swap_case(exact_series(m, {1, 2})); });
}

TEST(SwapCase, SimulatedRecoveryWithinThreeSigma) {
    const IsoChannel iso{0.99, 0.97, 0.962};
    const SequenceSpec spec{{1, 2, 3, 4, 7, 8, 15, 16, 31, 32}, 100, 1000, 99};
    const auto fit = fit_swap_case(run_irb(gates::swap(), noise_to_ptm(noise::Iso{iso.a, iso.b, iso.c}), spec));
    EXPECT_LE(std::abs(value(fit, "a") - iso.a), 3 * sigma(fit, "a"));
    EXPECT_LE(std::abs(value(fit, "b") - iso.b), 3 * sigma(fit, "b"));
    EXPECT_LE(std::abs(value(fit, "c") - iso.c), 3 * sigma(fit, "c"));
    EXPECT_LE(std::abs(*fit.mu_full - mu_full(iso)), 3 * *fit.mu_full_stderr);
}

TEST(Compare, DepolarizingIsAFixedPoint) {
    const double p = 0.02;
    const auto rep = compare_partial_vs_full(gates::cnot(), noise_to_ptm(noise::GlobalDepolarizing{p}));
    EXPECT_NEAR(rep.mu_partial, 1 - p, 1e-10);
    EXPECT_NEAR(rep.mu_first_order, 1 - p, 1e-10);
    EXPECT_NEAR(rep.mu_full, 1 - p, 1e-10);
    ASSERT_TRUE(rep.mu_second_order.has_value());
    EXPECT_NEAR(*rep.mu_second_order, 1 - p, 1e-10);
}

TEST(Compare, SpecialFamilyHasNoCorrection) {
    const auto w = special_family_gate(special_family_single_decay_lambda());
    const IsoChannel iso{0.99, 0.95, 0.945};
    const auto rep = compare_partial_vs_full(w, iso_to_ptm(iso));
    EXPECT_NEAR(rep.mu_partial, mu_full(iso), 1e-10);
    EXPECT_NEAR(*rep.mu_second_order, mu_full(iso), 1e-10);
}

TEST(Compare, CnotCorrectionMatchesSecondOrderFormula) {
    const auto rep = compare_partial_vs_full(gates::cnot(), iso_to_ptm({0.99, 0.97, 0.965}));
    const double correction = rep.mu_partial - rep.mu_full;
    EXPECT_GT(std::abs(correction), 1e-5);
    // third-order residual: eps ~ 1e-2 so eps^3 ~ 1e-6
    EXPECT_LT(std::abs(rep.mu_partial - *rep.mu_second_order), 3e-6);
    EXPECT_LT(std::abs(rep.mu_partial - *rep.mu_second_order), 0.1 * std::abs(correction));
}

TEST(Compare, DegenerateGatesGetANote) {
    const auto rep = compare_partial_vs_full(gates::swap(), iso_to_ptm({0.99, 0.97, 0.962}));
    EXPECT_FALSE(rep.mu_second_order.has_value());
    EXPECT_NE(rep.note.find("second-order"), std::string::npos);
    EXPECT_EQ(rep.classification.kind, GateKind::NearSwapFamily);
}

TEST(Compare, RejectsUnphysicalChannels) {
    expect_code(ErrorCode::NonCptpChannel, [] { (void)compare_partial_vs_full(gates::cnot(), iso_to_ptm({1.5, 1, 1})); });
    Matrix16 m = Matrix16::Identity();
    m(15, 2) = 0.1;
    expect_code(ErrorCode::NonTracePreserving,
                [&] { (void)compare_partial_vs_full(gates::cnot(), TransferMatrix16(m)); });
}

TEST(Reports, JsonShape) {
    const auto m = build_m_with_noise(gates::swap(), iso_to_ptm({0.99, 0.97, 0.962}));
    const auto fit = fit_swap_case(exact_series(m, range(1, 10)));
    const auto j = nlohmann::json::parse(fit_report_json(fit, "NearSwapFamily", "caller"));
    EXPECT_EQ(j["mode"], "swap");
    EXPECT_EQ(j["factors"].size(), 3u);
    EXPECT_EQ(j["factors"][0]["name"], "a");
    EXPECT_TRUE(j["factors"][0].contains("stderr"));
    EXPECT_TRUE(j["mu_partial"].is_null());
    EXPECT_NEAR(j["mu_full"].get<double>(), *fit.mu_full, 0);
    EXPECT_TRUE(j.contains("residual_norm"));
    EXPECT_EQ(j["classification"], "NearSwapFamily");

    const auto rep = compare_partial_vs_full(gates::cnot(), iso_to_ptm({0.99, 0.97, 0.965}));
    const auto c = nlohmann::json::parse(comparison_report_json(rep));
    for (const char* key : {"mu_partial", "mu_first_order", "mu_full", "mu_second_order", "differences", "spectrum"})
        EXPECT_TRUE(c.contains(key)) << key;
}
