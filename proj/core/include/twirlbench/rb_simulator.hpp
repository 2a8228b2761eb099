#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "twirlbench/iteration.hpp"
#include "twirlbench/random.hpp"

namespace twirlbench {

/// Outcome order used throughout: up-up, up-down, down-up, down-down, i.e.
/// computational states |00>, |01>, |10>, |11> with |0> = up.
using OutcomeProbabilities = std::array<double, 4>;

struct SequenceSpec {
    std::vector<std::uint64_t> lengths;
    std::uint64_t sequences_per_length = 100;
    std::uint64_t shots_per_sequence = 1000;
    std::uint64_t seed = 0;

    /// Throws InvalidSequenceSpec unless counts >= 1 and lengths strictly increasing.
    void validate() const;
};

struct IrbRecord {
    std::uint64_t length = 0;
    std::array<std::uint64_t, 4> counts{};
    std::uint64_t sequences = 0;
    std::uint64_t shots = 0;

    std::uint64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
    friend bool operator==(const IrbRecord&, const IrbRecord&) = default;
};

/// Sequence-averaged outcome probabilities before shot sampling.
struct LengthProbabilities {
    std::uint64_t length = 0;
    OutcomeProbabilities probabilities{};
    std::uint64_t sequences = 0;
};

struct SimulationOptions {
    /// Worker threads; 0 picks hardware concurrency. Results do not depend on it.
    unsigned threads = 1;
    /// Error channel attached to every random local gate V_i (acting after it).
    /// Off by default: the analysis assumes noiseless random gates.
    std::optional<TransferMatrix16> local_noise;
};

/// One realization of the interleaved sequence with random local Cliffords
/// U_1..U_n: F_n (U_n^dag W0 Lambda U_n) ... (U_1^dag W0 Lambda U_1), where
/// F_n undoes the error-free product. With `local_noise` set the sequence is
/// built from the physical gates V_1 = U_1, V_i = U_i U_{i-1}^dag, each
/// followed by the local noise channel. Throws NonUnitaryInput.
TransferMatrix16 sample_sequence_channel(const TwoQubitUnitary& w0, const TransferMatrix16& lambda,
                                         std::uint64_t n, CounterRng& rng,
                                         const TransferMatrix16* local_noise = nullptr);

/// Exact average of sample_sequence_channel over all 576^n choices of the
/// local Cliffords, n in {1, 2}. Throws UnsupportedLength otherwise.
TransferMatrix16 exact_average_sequence(const TwoQubitUnitary& w0, const TransferMatrix16& lambda,
                                        std::uint64_t n, unsigned threads = 1);

/// Outcome probabilities after applying `channel` to |up up>.
OutcomeProbabilities outcome_probabilities(const TransferMatrix16& channel);

/// (1/4)(1 + a + b + c, 1 + a - b - c, 1 - a + b - c, 1 - a - b + c): the
/// inverse of the Hadamard-type combination in decay_analysis.
/// Throws NonPhysicalTriple if an entry is below -1e-9.
OutcomeProbabilities predict_probabilities(const IsoChannel& f);

std::vector<LengthProbabilities> simulate_probabilities(const TwoQubitUnitary& w0,
                                                        const TransferMatrix16& lambda,
                                                        const SequenceSpec& spec,
                                                        const SimulationOptions& options = {});

/// Full experiment: per sequence, apply the sampled channel to |up up>, draw
/// `shots_per_sequence` outcomes, and pool counts per length.
std::vector<IrbRecord> run_irb(const TwoQubitUnitary& w0, const TransferMatrix16& lambda,
                               const SequenceSpec& spec, const SimulationOptions& options = {});

}  // namespace twirlbench
