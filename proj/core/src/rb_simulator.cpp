#include "twirlbench/rb_simulator.hpp"

#include <cmath>

#include "twirlbench/detail/parallel.hpp"
#include "twirlbench/error.hpp"

namespace twirlbench {

void SequenceSpec::validate() const {
    if (lengths.empty()) throw Error(ErrorCode::InvalidSequenceSpec, "no sequence lengths given");
    if (sequences_per_length < 1 || shots_per_sequence < 1) {
        throw Error(ErrorCode::InvalidSequenceSpec, "sequence and shot counts must be >= 1");
    }
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (lengths[i] < 1) throw Error(ErrorCode::InvalidSequenceSpec, "lengths must be >= 1");
        if (i > 0 && lengths[i] <= lengths[i - 1]) {
            throw Error(ErrorCode::InvalidSequenceSpec, "lengths must be strictly increasing");
        }
    }
}

namespace {

void require_unitary(const TwoQubitUnitary& w0) {
    if (!(w0.unitarity_error() <= kUnitarityTolerance)) {
        throw Error(ErrorCode::NonUnitaryInput, "interleaved gate is not unitary");
    }
}

}  // namespace

TransferMatrix16 sample_sequence_channel(const TwoQubitUnitary& w0, const TransferMatrix16& lambda,
                                         std::uint64_t n, CounterRng& rng,
                                         const TransferMatrix16* local_noise) {
    require_unitary(w0);
    const auto& table = local_clifford_ptms();
    const Matrix16 w = ptm_from_unitary_unchecked(w0.matrix()).matrix();
    const Matrix16 noisy = w * lambda.matrix();

    Matrix16 ideal = Matrix16::Identity();
    Matrix16 actual = Matrix16::Identity();
    if (local_noise == nullptr) {
        for (std::uint64_t i = 0; i < n; ++i) {
            const Matrix16& g = table[rng.below(kLocalCliffordCount)].matrix();
            ideal = g.transpose() * w * g * ideal;
            actual = g.transpose() * noisy * g * actual;
        }
    } else {
        const Matrix16 after_local = noisy * local_noise->matrix();
        Matrix16 previous = Matrix16::Identity();
        for (std::uint64_t i = 0; i < n; ++i) {
            const Matrix16& g = table[rng.below(kLocalCliffordCount)].matrix();
            const Matrix16 v = g * previous.transpose();
            ideal = w * v * ideal;
            actual = after_local * v * actual;
            previous = g;
        }
    }
    // Unitary channels are orthogonal in the normalized Pauli basis.
    return TransferMatrix16(ideal.transpose() * actual);
}

TransferMatrix16 exact_average_sequence(const TwoQubitUnitary& w0, const TransferMatrix16& lambda,
                                        std::uint64_t n, unsigned threads) {
    if (n < 1 || n > 2) {
        throw Error(ErrorCode::UnsupportedLength, "exact enumeration supports n = 1 or 2 only");
    }
    require_unitary(w0);
    const auto& table = local_clifford_ptms();
    const Matrix16 w = ptm_from_unitary_unchecked(w0.matrix()).matrix();
    const Matrix16 noisy = w * lambda.matrix();

    // Per local element: inverse of the error-free factor and the noisy factor.
    std::vector<Matrix16> inverse_ideal(kLocalCliffordCount), factor(kLocalCliffordCount);
    for (std::size_t k = 0; k < kLocalCliffordCount; ++k) {
        const Matrix16& g = table[k].matrix();
        inverse_ideal[k] = (g.transpose() * w * g).transpose();
        factor[k] = g.transpose() * noisy * g;
    }

    const double count = static_cast<double>(kLocalCliffordCount);
    if (n == 1) {
        const Matrix16 sum = pairwise_sum(0, kLocalCliffordCount, [&](std::size_t k) -> Matrix16 {
            return inverse_ideal[k] * factor[k];
        });
        return TransferMatrix16(sum / count);
    }

    // Lambda_2 = E_1^T E_2^T P_2 P_1 for every ordered pair (first, second).
    std::vector<Matrix16> second_stage(kLocalCliffordCount);
    for (std::size_t k = 0; k < kLocalCliffordCount; ++k) second_stage[k] = inverse_ideal[k] * factor[k];

    std::vector<Matrix16> per_first(kLocalCliffordCount);
    detail::parallel_for(kLocalCliffordCount, threads, [&](std::size_t k1) {
        per_first[k1] = pairwise_sum(0, kLocalCliffordCount, [&](std::size_t k2) -> Matrix16 {
            return inverse_ideal[k1] * second_stage[k2] * factor[k1];
        });
    });
    const Matrix16 sum = pairwise_sum(0, kLocalCliffordCount, [&](std::size_t k) { return per_first[k]; });
    return TransferMatrix16(sum / (count * count));
}

OutcomeProbabilities outcome_probabilities(const TransferMatrix16& channel) {
    static const Vector16 initial = PauliCoefficients::basis_state(0, 0).to_vector();
    const Vector16 y = channel.matrix() * initial;
    // <k|rho|k> only involves the z-type coefficients.
    const double t = y(pauli_index::kTrace);
    const double z1 = y(pauli_index::qubit1(2));
    const double z2 = y(pauli_index::qubit2(2));
    const double zz = y(pauli_index::correlation(2, 2));
    return {0.5 * (t + z1 + z2 + zz), 0.5 * (t + z1 - z2 - zz), 0.5 * (t - z1 + z2 - zz),
            0.5 * (t - z1 - z2 + zz)};
}

OutcomeProbabilities predict_probabilities(const IsoChannel& f) {
    const OutcomeProbabilities p = {0.25 * (1.0 + f.a + f.b + f.c), 0.25 * (1.0 + f.a - f.b - f.c),
                                    0.25 * (1.0 - f.a + f.b - f.c), 0.25 * (1.0 - f.a - f.b + f.c)};
    for (double v : p) {
        if (v < -1e-9) {
            throw Error(ErrorCode::NonPhysicalTriple, "triple maps |up up> to negative probabilities");
        }
    }
    return p;
}

namespace {

struct SequenceOutcome {
    OutcomeProbabilities probabilities{};
    std::array<std::uint64_t, 4> counts{};
};

SequenceOutcome run_one_sequence(const TwoQubitUnitary& w0, const TransferMatrix16& lambda, std::uint64_t n,
                                 CounterRng rng, std::uint64_t shots, const SimulationOptions& options) {
    SequenceOutcome out;
    const TransferMatrix16 channel = sample_sequence_channel(
        w0, lambda, n, rng, options.local_noise ? &*options.local_noise : nullptr);
    out.probabilities = outcome_probabilities(channel);

    std::array<double, 4> cumulative{};
    double running = 0.0;
    for (int k = 0; k < 4; ++k) {
        running += std::max(out.probabilities[k], 0.0);
        cumulative[k] = running;
    }
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * running;
        int k = 0;
        while (k < 3 && u >= cumulative[k]) ++k;
        ++out.counts[k];
    }
    return out;
}

std::vector<SequenceOutcome> run_all(const TwoQubitUnitary& w0, const TransferMatrix16& lambda,
                                     const SequenceSpec& spec, const SimulationOptions& options,
                                     std::uint64_t shots) {
    spec.validate();
    require_unitary(w0);
    if (!(lambda.trace_preservation_error() <= 1e-9)) {
        throw Error(ErrorCode::NonTracePreserving, "error channel is not trace preserving");
    }
    const CounterRng root(spec.seed);
    const std::size_t per_length = spec.sequences_per_length;
    std::vector<SequenceOutcome> outcomes(spec.lengths.size() * per_length);
    detail::parallel_for(outcomes.size(), options.threads, [&](std::size_t item) {
        const std::size_t li = item / per_length;
        const std::size_t si = item % per_length;
        outcomes[item] = run_one_sequence(w0, lambda, spec.lengths[li], root.substream(spec.lengths[li], si),
                                          shots, options);
    });
    return outcomes;
}

}  // namespace

std::vector<LengthProbabilities> simulate_probabilities(const TwoQubitUnitary& w0,
                                                        const TransferMatrix16& lambda,
                                                        const SequenceSpec& spec,
                                                        const SimulationOptions& options) {
    const auto outcomes = run_all(w0, lambda, spec, options, 0);
    std::vector<LengthProbabilities> out;
    const std::size_t per_length = spec.sequences_per_length;
    for (std::size_t li = 0; li < spec.lengths.size(); ++li) {
        LengthProbabilities lp;
        lp.length = spec.lengths[li];
        lp.sequences = per_length;
        for (std::size_t si = 0; si < per_length; ++si) {
            for (int k = 0; k < 4; ++k) lp.probabilities[k] += outcomes[li * per_length + si].probabilities[k];
        }
        for (double& v : lp.probabilities) v /= static_cast<double>(per_length);
        out.push_back(lp);
    }
    return out;
}

std::vector<IrbRecord> run_irb(const TwoQubitUnitary& w0, const TransferMatrix16& lambda,
                               const SequenceSpec& spec, const SimulationOptions& options) {
    const auto outcomes = run_all(w0, lambda, spec, options, spec.shots_per_sequence);
    std::vector<IrbRecord> records;
    const std::size_t per_length = spec.sequences_per_length;
    for (std::size_t li = 0; li < spec.lengths.size(); ++li) {
        IrbRecord rec;
        rec.length = spec.lengths[li];
        rec.sequences = per_length;
        rec.shots = spec.shots_per_sequence;
        for (std::size_t si = 0; si < per_length; ++si) {
            for (int k = 0; k < 4; ++k) rec.counts[k] += outcomes[li * per_length + si].counts[k];
        }
        records.push_back(rec);
    }
    return records;
}

}  // namespace twirlbench
