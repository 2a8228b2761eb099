#pragma once

#include <concepts>
#include <string>
#include <type_traits>
#include <string_view>
#include <variant>
#include <vector>

#include "twirlbench/pauli_algebra.hpp"
#include "twirlbench/twirl.hpp"

namespace twirlbench {

namespace noise {

struct Identity {};
/// rho -> (1 - p) rho + p 1/4.
struct GlobalDepolarizing {
    double p = 0.0;
};
/// Independent single-qubit depolarizing: Bloch vector of qubit k shrinks by 1 - p_k.
struct LocalDepolarizing {
    double p1 = 0.0;
    double p2 = 0.0;
};
/// |1> -> |0> decay with probabilities g1, g2. Non-unital.
struct AmplitudeDamping {
    double g1 = 0.0;
    double g2 = 0.0;
};
struct PhaseDamping {
    double z1 = 0.0;
    double z2 = 0.0;
};
enum class Axis { X, Y, Z };
/// exp(-i angle/2 sigma_axis) on one qubit (1 or 2).
struct CoherentOverRotation {
    int qubit = 1;
    Axis axis = Axis::X;
    double angle = 0.0;
};
/// exp(-i theta/2 Z (x) Z).
struct CorrelatedZZ {
    double theta = 0.0;
};
/// Locally invariant channel (a, b, c); rejected unless completely positive.
struct Iso {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
};

}  // namespace noise

struct NoiseSpec;

namespace noise {
/// Stages in time order: the first listed acts first.
struct Composite {
    std::vector<NoiseSpec> stages;
};
}  // namespace noise

struct NoiseSpec {
    using Variant = std::variant<noise::Identity, noise::GlobalDepolarizing, noise::LocalDepolarizing,
                                 noise::AmplitudeDamping, noise::PhaseDamping,
                                 noise::CoherentOverRotation, noise::CorrelatedZZ, noise::Iso,
                                 noise::Composite>;
    Variant variant;

    NoiseSpec() = default;
    template <typename T>
        requires(!std::same_as<std::remove_cvref_t<T>, NoiseSpec> && std::constructible_from<Variant, T>)
    NoiseSpec(T v) : variant(std::move(v)) {}  // NOLINT(google-explicit-constructor)
};

/// Throws ParameterOutOfRange for probabilities outside [0, 1], qubit not in
/// {1, 2}, or an Iso triple that is not completely positive.
TransferMatrix16 noise_to_ptm(const NoiseSpec& spec);

/// R_ab = (1/4) sum_k Tr[P_a K_k P_b K_k^dagger].
TransferMatrix16 ptm_from_kraus(const std::vector<Matrix4c>& kraus);

/// Unnormalized Choi matrix sum_ij E(|i><j|) (x) |i><j|.
Eigen::Matrix<Complex, 16, 16> choi_matrix(const TransferMatrix16& m);

struct CptpReport {
    bool ok = false;
    double trace_error = 0.0;
    double min_choi_eigenvalue = 0.0;
};

/// Trace row within 1e-9 of e_16 and Choi spectrum >= -1e-9.
CptpReport is_cptp(const TransferMatrix16& m);

/// {"type": "local_depolarizing", "p1": 0.01, "p2": 0.02},
/// {"type": "composite", "stages": [...]}, ... Throws MalformedNoiseSpec.
NoiseSpec parse_noise_spec(std::string_view json);
std::string noise_spec_to_json(const NoiseSpec& spec);

}  // namespace twirlbench
