#include "twirlbench/decay_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "least_squares.hpp"
#include "twirlbench/error.hpp"
#include "twirlbench/noise_models.hpp"

namespace twirlbench {

std::string_view to_string(FitMode mode) noexcept {
    switch (mode) {
        case FitMode::SingleExponential: return "single";
        case FitMode::IdentityCase: return "identity";
        case FitMode::SwapCase: return "swap";
    }
    return "unknown";
}

const FactorEstimate* DecayFit::factor(std::string_view name) const {
    for (const auto& f : factors) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

namespace {

// Binomial variances get this floor on p(1 - p) (and 1 - v^2 for channels),
// which keeps weights finite for saturated points without depending on the
// sample count.
constexpr double kVarianceFloor = 1e-6;
constexpr double kNoiseFloorSigmas = 3.0;

double channel_variance(double v, double samples) {
    return std::max(1.0 - v * v, kVarianceFloor) / samples;
}

void require_lengths(const DecaySeries& series, std::size_t minimum) {
    std::set<std::uint64_t> lengths;
    for (const auto& p : series) lengths.insert(p.length);
    if (lengths.size() < minimum) {
        throw Error(ErrorCode::InsufficientData, "need at least " + std::to_string(minimum) +
                                                     " distinct sequence lengths, got " +
                                                     std::to_string(lengths.size()));
    }
    for (const auto& p : series) {
        if (!(p.samples > 0.0)) throw Error(ErrorCode::InsufficientData, "point with no samples");
    }
}

std::vector<std::array<double, 4>> combined_channels(const DecaySeries& series) {
    std::vector<std::array<double, 4>> out;
    out.reserve(series.size());
    for (const auto& p : series) out.push_back(hadamard_combine(p.probabilities));
    return out;
}

struct ChannelSample {
    double n;
    double value;
    double variance;
};

std::vector<ChannelSample> above_noise_floor(const DecaySeries& series,
                                             const std::vector<std::array<double, 4>>& channels,
                                             int index) {
    std::vector<ChannelSample> kept;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double v = channels[i][index];
        const double var = channel_variance(v, series[i].samples);
        if (v > kNoiseFloorSigmas * std::sqrt(var)) {
            kept.push_back({static_cast<double>(series[i].length), v, var});
        }
    }
    return kept;
}

struct PureDecay {
    FactorEstimate estimate;
    double chi2 = 0.0;
    int iterations = 0;
};

// value(n) = A f^n: weighted log-linear seed, then nonlinear refinement.
PureDecay fit_pure_decay(const std::string& name, const std::vector<ChannelSample>& points) {
    PureDecay out;
    out.estimate.name = name;
    out.estimate.points_used = points.size();
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.n);
    if (distinct.size() < 2) {
        out.estimate.valid = false;
        return out;
    }

    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd x(m, 2);
    Eigen::VectorXd y(m), w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        x(i, 0) = 1.0;
        x(i, 1) = p.n;
        y(i) = std::log(p.value);
        w(i) = p.value * p.value / p.variance;  // delta method: var(log v) = var(v)/v^2
    }
    Eigen::VectorXd beta;
    Eigen::MatrixXd cov;
    if (!detail::weighted_linear_fit(x, y, w, beta, cov)) {
        throw Error(ErrorCode::FitDiverged, "log-linear seed for channel " + name + " is singular");
    }

    const detail::WhitenedModel model = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& r,
                                            Eigen::MatrixXd& jac) {
        if (!(theta(1) > 0.0)) return false;
        r.resize(m);
        jac.resize(m, 2);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& p = points[static_cast<std::size_t>(i)];
            const double sigma = std::sqrt(p.variance);
            const double pw = std::pow(theta(1), p.n);
            const double f = theta(0) * pw;
            r(i) = (p.value - f) / sigma;
            jac(i, 0) = pw / sigma;
            jac(i, 1) = theta(0) * p.n * std::pow(theta(1), p.n - 1.0) / sigma;
        }
        return true;
    };
    const auto lm = detail::levenberg_marquardt(model, Eigen::Vector2d(std::exp(beta(0)), std::exp(beta(1))));
    if (!lm.converged) throw Error(ErrorCode::FitDiverged, "refinement of channel " + name + " did not converge");

    out.estimate.amplitude = lm.params(0);
    out.estimate.value = lm.params(1);
    out.estimate.amplitude_stderr = std::sqrt(lm.covariance(0, 0));
    out.estimate.stderr_value = std::sqrt(lm.covariance(1, 1));
    out.chi2 = lm.chi2;
    out.iterations = lm.iterations;
    return out;
}

void finish_mu_full(DecayFit& fit, double cov_ab) {
    const auto* a = fit.factor("a");
    const auto* b = fit.factor("b");
    const auto* c = fit.factor("c");
    if (a && b && c && a->valid && b->valid && c->valid) {
        fit.mu_full = (a->value + b->value + 3.0 * c->value) / 5.0;
        const double var = a->stderr_value * a->stderr_value + b->stderr_value * b->stderr_value +
                           2.0 * cov_ab + 9.0 * c->stderr_value * c->stderr_value;
        fit.mu_full_stderr = std::sqrt(std::max(var, 0.0)) / 5.0;
    }
}

void finish_residuals(DecayFit& fit, double chi2, std::size_t params) {
    fit.residual_norm = std::sqrt(chi2);
    fit.reduced_chi2 = fit.points > params ? chi2 / static_cast<double>(fit.points - params) : 0.0;
}

}  // namespace

DecaySeries series_from_records(std::span<const IrbRecord> records) {
    DecaySeries series;
    series.reserve(records.size());
    for (const auto& rec : records) {
        const std::uint64_t total = rec.total();
        if (total == 0 || total != rec.sequences * rec.shots) {
            throw Error(ErrorCode::MalformedProbabilities,
                        "record at length " + std::to_string(rec.length) +
                            ": counts do not sum to sequences x shots");
        }
        DecayPoint p;
        p.length = rec.length;
        p.samples = static_cast<double>(total);
        for (int k = 0; k < 4; ++k) p.probabilities[k] = static_cast<double>(rec.counts[k]) / p.samples;
        series.push_back(p);
    }
    return series;
}

std::array<double, 4> hadamard_combine(const OutcomeProbabilities& p) {
    const double sum = p[0] + p[1] + p[2] + p[3];
    if (!(std::abs(sum - 1.0) <= 1e-6)) {
        throw Error(ErrorCode::MalformedProbabilities,
                    "probabilities sum to " + std::to_string(sum) + ", expected 1");
    }
    return {p[0] - p[1] - p[2] + p[3], p[0] - p[1] + p[2] - p[3], p[0] + p[1] - p[2] - p[3], sum};
}

DecayFit fit_single_exponential(const DecaySeries& series) {
    require_lengths(series, 3);
    const auto m = static_cast<Eigen::Index>(series.size());
    Eigen::VectorXd n(m), y(m), sigma(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& p = series[static_cast<std::size_t>(i)];
        n(i) = static_cast<double>(p.length);
        y(i) = p.probabilities[0];
        sigma(i) = std::sqrt(std::max(y(i) * (1.0 - y(i)), kVarianceFloor) / p.samples);
    }

    constexpr double kAmplitudeSeed = 0.75;
    constexpr double kOffsetSeed = 0.25;
    double mu_seed = 0.99;
    {
        std::vector<Eigen::Index> usable;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (y(i) - kOffsetSeed > 3.0 * sigma(i)) usable.push_back(i);
        }
        std::set<double> distinct;
        for (auto i : usable) distinct.insert(n(i));
        if (distinct.size() >= 2) {
            const auto k = static_cast<Eigen::Index>(usable.size());
            Eigen::MatrixXd x(k, 2);
            Eigen::VectorXd ly(k), w(k);
            for (Eigen::Index r = 0; r < k; ++r) {
                const auto i = usable[static_cast<std::size_t>(r)];
                const double v = (y(i) - kOffsetSeed) / kAmplitudeSeed;
                x(r, 0) = 1.0;
                x(r, 1) = n(i);
                ly(r) = std::log(v);
                w(r) = std::pow((y(i) - kOffsetSeed) / sigma(i), 2);
            }
            Eigen::VectorXd beta;
            Eigen::MatrixXd cov;
            if (detail::weighted_linear_fit(x, ly, w, beta, cov)) mu_seed = std::clamp(std::exp(beta(1)), 1e-3, 1.0);
        }
    }

    const detail::WhitenedModel model = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& r,
                                            Eigen::MatrixXd& jac) {
        const double a = theta(0), mu = theta(1), b = theta(2);
        if (!(mu > 0.0)) return false;
        r.resize(m);
        jac.resize(m, 3);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double pw = std::pow(mu, n(i));
            r(i) = (y(i) - (a * pw + b)) / sigma(i);
            jac(i, 0) = pw / sigma(i);
            jac(i, 1) = a * n(i) * std::pow(mu, n(i) - 1.0) / sigma(i);
            jac(i, 2) = 1.0 / sigma(i);
        }
        return true;
    };
    const auto lm = detail::levenberg_marquardt(model, Eigen::Vector3d(kAmplitudeSeed, mu_seed, kOffsetSeed));
    if (!lm.converged) throw Error(ErrorCode::FitDiverged, "single-exponential fit did not converge");

    DecayFit fit;
    fit.mode = FitMode::SingleExponential;
    FactorEstimate mu;
    mu.name = "mu";
    mu.value = lm.params(1);
    mu.stderr_value = std::sqrt(lm.covariance(1, 1));
    mu.amplitude = lm.params(0);
    mu.amplitude_stderr = std::sqrt(lm.covariance(0, 0));
    mu.points_used = series.size();
    fit.factors.push_back(mu);
    fit.offset = lm.params(2);
    fit.offset_stderr = std::sqrt(lm.covariance(2, 2));
    fit.points = series.size();
    fit.iterations = lm.iterations;
    finish_residuals(fit, lm.chi2, 3);
    return fit;
}

DecayFit fit_single_exponential(std::span<const IrbRecord> records) {
    return fit_single_exponential(series_from_records(records));
}

DecayFit fit_identity_case(const DecaySeries& series) {
    require_lengths(series, 3);
    const auto channels = combined_channels(series);

    DecayFit fit;
    fit.mode = FitMode::IdentityCase;
    double chi2 = 0.0;
    std::size_t params = 0;
    // Combined channel order is (c, b, a, 1).
    const std::array<std::pair<const char*, int>, 3> layout = {{{"a", 2}, {"b", 1}, {"c", 0}}};
    for (const auto& [name, index] : layout) {
        const auto points = above_noise_floor(series, channels, index);
        PureDecay d = fit_pure_decay(name, points);
        if (d.estimate.valid) {
            chi2 += d.chi2;
            fit.points += points.size();
            params += 2;
            fit.iterations = std::max(fit.iterations, d.iterations);
        } else {
            fit.partial = true;
        }
        fit.factors.push_back(d.estimate);
    }
    if (params == 0) {
        throw Error(ErrorCode::ChannelBelowNoiseFloor, "every combined channel is below its shot-noise floor");
    }
    finish_residuals(fit, chi2, params);
    finish_mu_full(fit, 0.0);
    return fit;
}

DecayFit fit_identity_case(std::span<const IrbRecord> records) {
    return fit_identity_case(series_from_records(records));
}

DecayFit fit_swap_case(const DecaySeries& series) {
    require_lengths(series, 3);
    std::set<std::uint64_t> even, odd;
    for (const auto& p : series) (p.length % 2 == 0 ? even : odd).insert(p.length);
    if (even.size() < 2 || odd.size() < 2) {
        throw Error(ErrorCode::ParityImbalance, "SWAP extraction needs at least two even and two odd lengths");
    }
    const auto channels = combined_channels(series);

    DecayFit fit;
    fit.mode = FitMode::SwapCase;

    // Channel 1: c^n.
    const auto c_points = above_noise_floor(series, channels, 0);
    PureDecay c = fit_pure_decay("c", c_points);
    double chi2 = 0.0;
    std::size_t params = 0;
    if (c.estimate.valid) {
        chi2 += c.chi2;
        params += 2;
        fit.points += c_points.size();
    } else {
        fit.partial = true;
    }

    // Channels 2, 3 jointly: parameters (a, b, A2, A3).
    struct ParityPoint {
        double even_steps;  // k
        double parity;      // p
        int channel;        // 0: a^k b^{k+p}, 1: a^{k+p} b^k
        double value;
        double variance;
    };
    std::vector<ParityPoint> pts;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double k = static_cast<double>(series[i].length / 2);
        const double p = static_cast<double>(series[i].length % 2);
        for (int ch = 0; ch < 2; ++ch) {
            const double v = channels[i][1 + ch];
            const double var = channel_variance(v, series[i].samples);
            if (v > kNoiseFloorSigmas * std::sqrt(var)) pts.push_back({k, p, ch, v, var});
        }
    }
    const auto m = static_cast<Eigen::Index>(pts.size());
    auto exponents = [](const ParityPoint& q) {
        // (power of a, power of b)
        return q.channel == 0 ? std::pair{q.even_steps, q.even_steps + q.parity}
                              : std::pair{q.even_steps + q.parity, q.even_steps};
    };

    Eigen::MatrixXd x(m, 4);
    Eigen::VectorXd ly(m), w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& q = pts[static_cast<std::size_t>(i)];
        const auto [pa, pb] = exponents(q);
        x.row(i) << pa, pb, q.channel == 0 ? 1.0 : 0.0, q.channel == 1 ? 1.0 : 0.0;
        ly(i) = std::log(q.value);
        w(i) = q.value * q.value / q.variance;
    }
    Eigen::VectorXd beta;
    Eigen::MatrixXd cov;
    if (m < 4 || !detail::weighted_linear_fit(x, ly, w, beta, cov)) {
        throw Error(ErrorCode::InsufficientData,
                    "parity channels do not have enough points above the shot-noise floor");
    }
    const detail::WhitenedModel model = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& r,
                                            Eigen::MatrixXd& jac) {
        if (!(theta(0) > 0.0 && theta(1) > 0.0)) return false;
        r.resize(m);
        jac.resize(m, 4);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& q = pts[static_cast<std::size_t>(i)];
            const auto [pa, pb] = exponents(q);
            const double sigma = std::sqrt(q.variance);
            const double amp = q.channel == 0 ? theta(2) : theta(3);
            const double f = amp * std::pow(theta(0), pa) * std::pow(theta(1), pb);
            r(i) = (q.value - f) / sigma;
            jac(i, 0) = amp * pa * std::pow(theta(0), pa - 1.0) * std::pow(theta(1), pb) / sigma;
            jac(i, 1) = amp * pb * std::pow(theta(0), pa) * std::pow(theta(1), pb - 1.0) / sigma;
            jac(i, 2) = q.channel == 0 ? f / amp / sigma : 0.0;
            jac(i, 3) = q.channel == 1 ? f / amp / sigma : 0.0;
        }
        return true;
    };
    Eigen::Vector4d seed(std::exp(beta(0)), std::exp(beta(1)), std::exp(beta(2)), std::exp(beta(3)));
    const auto lm = detail::levenberg_marquardt(model, seed);
    if (!lm.converged) throw Error(ErrorCode::FitDiverged, "parity-channel fit did not converge");

    auto make = [&](const char* name, int idx, int amp_idx) {
        FactorEstimate f;
        f.name = name;
        f.value = lm.params(idx);
        f.stderr_value = std::sqrt(lm.covariance(idx, idx));
        f.amplitude = lm.params(amp_idx);
        f.amplitude_stderr = std::sqrt(lm.covariance(amp_idx, amp_idx));
        f.points_used = pts.size();
        return f;
    };
    fit.factors.push_back(make("a", 0, 3));
    fit.factors.push_back(make("b", 1, 2));
    fit.factors.push_back(c.estimate);
    chi2 += lm.chi2;
    params += 4;
    fit.points += pts.size();
    fit.iterations = std::max(c.iterations, lm.iterations);
    finish_residuals(fit, chi2, params);
    finish_mu_full(fit, lm.covariance(0, 1));
    return fit;
}

DecayFit fit_swap_case(std::span<const IrbRecord> records) {
    return fit_swap_case(series_from_records(records));
}

ComparisonReport compare_partial_vs_full(const TwoQubitUnitary& w0, const TransferMatrix16& lambda,
                                         double threshold) {
    const CptpReport cptp = is_cptp(lambda);
    if (cptp.trace_error > 1e-9) {
        throw Error(ErrorCode::NonTracePreserving, "error channel is not trace preserving");
    }
    if (!cptp.ok) {
        throw Error(ErrorCode::NonCptpChannel, "error channel is not completely positive (min Choi eigenvalue " +
                                                   std::to_string(cptp.min_choi_eigenvalue) + ")");
    }
    ComparisonReport rep;
    rep.invariants = local_invariants(w0);
    rep.entries = m0_entries_from_invariants(rep.invariants);
    rep.classification = classify_entries(rep.entries, threshold);
    rep.iso = twirl_project(lambda);
    const IterationMatrix3 m = build_m_with_noise(w0, lambda);
    rep.spectrum = eig3(m.matrix());
    rep.mu_partial = top_eigenvalue(m);
    rep.mu_first_order = mu_first_order(lambda);
    rep.mu_full = mu_full(rep.iso);
    try {
        rep.mu_second_order = mu_second_order(rep.iso.a, rep.iso.b, rep.iso.c, rep.entries.m1, rep.entries.m2);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateGate) throw;
        rep.note = "second-order correction undefined: gate is locally equivalent to identity or SWAP (" +
                   std::string(to_string(rep.classification.kind)) + "); use the exceptional-gate extraction";
    }
    if (rep.note.empty() && rep.classification.kind != GateKind::Generic) {
        rep.note = "gate is close to an exceptional family; several slow decays are expected";
    }
    return rep;
}

namespace {

using nlohmann::json;

json number_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string fit_report_json(const DecayFit& fit, std::string_view classification, std::string_view mode_selection) {
    json factors = json::array();
    for (const auto& f : fit.factors) {
        json entry = {{"name", f.name}, {"points", f.points_used}, {"valid", f.valid}};
        if (f.valid) {
            entry["value"] = f.value;
            entry["stderr"] = f.stderr_value;
            entry["amplitude"] = f.amplitude;
            entry["amplitude_stderr"] = f.amplitude_stderr;
        } else {
            entry["value"] = nullptr;
            entry["stderr"] = nullptr;
        }
        factors.push_back(entry);
    }
    json j = {
        {"mode", std::string(to_string(fit.mode))},
        {"mode_selection", std::string(mode_selection)},
        {"factors", factors},
        {"classification", std::string(classification)},
        {"residual_norm", fit.residual_norm},
        {"reduced_chi2", fit.reduced_chi2},
        {"points", fit.points},
        {"iterations", fit.iterations},
        {"partial", fit.partial},
    };
    if (fit.mode == FitMode::SingleExponential) {
        j["mu_partial"] = fit.factors.front().value;
        j["mu_partial_stderr"] = fit.factors.front().stderr_value;
        j["offset"] = fit.offset;
        j["offset_stderr"] = fit.offset_stderr;
    } else {
        j["mu_partial"] = nullptr;
    }
    j["mu_full"] = number_or_null(fit.mu_full);
    j["mu_full_stderr"] = number_or_null(fit.mu_full_stderr);
    return j.dump(2);
}

std::string comparison_report_json(const ComparisonReport& r) {
    json spectrum = json::array();
    for (const auto& z : r.spectrum) spectrum.push_back({z.real(), z.imag()});
    json j = {
        {"mode", "compare"},
        {"G1", {r.invariants.g1.real(), r.invariants.g1.imag()}},
        {"G2", r.invariants.g2},
        {"m1", r.entries.m1},
        {"m2", r.entries.m2},
        {"classification", std::string(to_string(r.classification.kind))},
        {"slow_eigenvalue_count", r.classification.slow_eigenvalue_count},
        {"iso", {{"a", r.iso.a}, {"b", r.iso.b}, {"c", r.iso.c}}},
        {"spectrum", spectrum},
        {"mu_partial", r.mu_partial},
        {"mu_first_order", r.mu_first_order},
        {"mu_full", r.mu_full},
        {"mu_second_order", number_or_null(r.mu_second_order)},
        {"note", r.note},
    };
    json diffs = {
        {"partial_minus_full", r.mu_partial - r.mu_full},
        {"partial_minus_first_order", r.mu_partial - r.mu_first_order},
        {"first_order_minus_full", r.mu_first_order - r.mu_full},
    };
    if (r.mu_second_order) {
        diffs["partial_minus_second_order"] = r.mu_partial - *r.mu_second_order;
        diffs["second_order_minus_full"] = *r.mu_second_order - r.mu_full;
    }
    j["differences"] = diffs;
    j["factors"] = json::array({{{"name", "mu_partial"}, {"value", r.mu_partial}, {"stderr", 0.0}}});
    j["residual_norm"] = 0.0;
    return j.dump(2);
}

}  // namespace twirlbench
