#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twirlbench/iteration.hpp"
#include "twirlbench/rb_simulator.hpp"

namespace twirlbench {

enum class FitMode { SingleExponential, IdentityCase, SwapCase };

std::string_view to_string(FitMode mode) noexcept;

/// Pooled outcome frequencies at one sequence length; `samples` is the number
/// of shots behind them (sequences x shots for simulator records).
struct DecayPoint {
    std::uint64_t length = 0;
    OutcomeProbabilities probabilities{};
    double samples = 0.0;
};

using DecaySeries = std::vector<DecayPoint>;

/// Throws MalformedProbabilities for records whose counts do not add up.
DecaySeries series_from_records(std::span<const IrbRecord> records);

struct FactorEstimate {
    std::string name;
    double value = 0.0;
    double stderr_value = 0.0;
    double amplitude = 0.0;
    double amplitude_stderr = 0.0;
    std::size_t points_used = 0;
    /// False when every point of this channel sat below its shot-noise floor.
    bool valid = true;
};

struct DecayFit {
    FitMode mode = FitMode::SingleExponential;
    std::vector<FactorEstimate> factors;
    /// Constant offset B of A mu^n + B (single-exponential mode only).
    double offset = 0.0;
    double offset_stderr = 0.0;
    /// sqrt of the weighted chi^2 over all fitted points.
    double residual_norm = 0.0;
    double reduced_chi2 = 0.0;
    std::size_t points = 0;
    int iterations = 0;
    /// Set when some channel could not be fitted.
    bool partial = false;
    /// (a + b + 3c)/5 from the extracted triple (identity and SWAP modes).
    std::optional<double> mu_full;
    std::optional<double> mu_full_stderr;

    const FactorEstimate* factor(std::string_view name) const;
};

/// The +-1 combination of (P_uu, P_ud, P_du, P_dd) giving (c^n, b^n, a^n, 1).
/// Throws MalformedProbabilities unless the inputs sum to 1 within 1e-6.
std::array<double, 4> hadamard_combine(const OutcomeProbabilities& p);

/// Weighted nonlinear least squares of P_uu(n) = A mu^n + B, binomial weights.
/// Throws InsufficientData (< 3 distinct lengths) or FitDiverged.
DecayFit fit_single_exponential(const DecaySeries& series);
DecayFit fit_single_exponential(std::span<const IrbRecord> records);

/// Three independent decays a^n, b^n, c^n read off the combined channels.
/// Channel points within 3 standard deviations of zero are dropped; a channel
/// with fewer than two surviving points is flagged invalid (partial fit).
/// Throws InsufficientData or ChannelBelowNoiseFloor (no channel usable).
DecayFit fit_identity_case(const DecaySeries& series);
DecayFit fit_identity_case(std::span<const IrbRecord> records);

/// SWAP-equivalent gates: channel 1 decays as c^n, channels 2 and 3 as
/// a^k b^{k+p} and a^{k+p} b^k with n = 2k + p. Throws InsufficientData or
/// ParityImbalance (fewer than two lengths of either parity).
DecayFit fit_swap_case(const DecaySeries& series);
DecayFit fit_swap_case(std::span<const IrbRecord> records);

struct ComparisonReport {
    LocalInvariants invariants;
    M0Entries entries{};
    GateClassification classification;
    IsoChannel iso{};
    std::array<Complex, 3> spectrum{};
    /// Slow eigenvalue of the noisy iteration matrix.
    double mu_partial = 0.0;
    double mu_first_order = 0.0;
    /// (a + b + 3c)/5 of the twirled error channel.
    double mu_full = 0.0;
    std::optional<double> mu_second_order;
    std::string note;
};

/// Throws NonCptpChannel / NonTracePreserving for unphysical lambda.
ComparisonReport compare_partial_vs_full(const TwoQubitUnitary& w0, const TransferMatrix16& lambda,
                                         double threshold = kDefaultClassificationThreshold);

/// {mode, factors: [{name, value, stderr}], mu_partial, mu_full,
///  mu_second_order?, classification, residual_norm, ...}
std::string fit_report_json(const DecayFit& fit, std::string_view classification = "unknown",
                            std::string_view mode_selection = "caller");
std::string comparison_report_json(const ComparisonReport& report);

}  // namespace twirlbench
