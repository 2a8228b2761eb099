#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "twirlbench/invariants.hpp"
#include "twirlbench/twirl.hpp"

namespace twirlbench {

/// 3x3 map f_{n+1} = M f_n on the triple f = (a, b, c).
class IterationMatrix3 {
public:
    IterationMatrix3() : m_(Eigen::Matrix3d::Identity()) {}
    explicit IterationMatrix3(const Eigen::Matrix3d& m) : m_(m) {}

    const Eigen::Matrix3d& matrix() const noexcept { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    /// Largest violation of the error-free relations: unit row sums,
    /// column relations M1j + M2j + 3 M3j = (1, 1, 3)_j and qubit-swap symmetry.
    double error_free_relation_residual() const;

private:
    Eigen::Matrix3d m_;
};

struct M0Entries {
    double m1;
    double m2;
};

enum class GateKind { Generic, NearIdentityFamily, NearSwapFamily };

std::string_view to_string(GateKind kind) noexcept;

struct GateClassification {
    GateKind kind = GateKind::Generic;
    int slow_eigenvalue_count = 1;
};

inline constexpr double kDefaultClassificationThreshold = 0.05;
inline constexpr double kDegeneracyFloor = 1e-6;

/// m1 = (2|G1| + G2 + 1)/6, m2 = (2|G1| - G2 + 1)/6. Throws
/// InadmissibleInvariants when the invariants lie outside the admissible
/// region by more than 1e-6.
M0Entries m0_entries_from_invariants(const LocalInvariants& inv);

IterationMatrix3 m0_matrix(double m1, double m2);
inline IterationMatrix3 m0_matrix(const M0Entries& e) { return m0_matrix(e.m1, e.m2); }

/// (1, m1 - m2, (5 m1 + 5 m2 - 2)/3); eigenvectors (1,1,1), (1,-1,0), (3,3,-2).
std::array<double, 3> m0_spectrum(double m1, double m2);

/// Iteration matrix built column by column: column j is the block-trace
/// triple of the exact C1 (x) C1 twirl of ptm(w0^dagger) iso(e_j) ptm(w0) lambda,
/// where lambda acts first.
IterationMatrix3 build_m_with_noise(const TwoQubitUnitary& w0, const TransferMatrix16& lambda);
IterationMatrix3 build_m0_from_gate(const TwoQubitUnitary& w0);

/// M^n (1, 1, 1) by repeated squaring.
IsoChannel predict_f(const IterationMatrix3& m, std::uint64_t n);
/// M^n f0.
Eigen::Vector3d matrix_power_apply(const IterationMatrix3& m, std::uint64_t n, const Eigen::Vector3d& f0);

GateClassification classify_gate(const LocalInvariants& inv,
                                 double threshold = kDefaultClassificationThreshold);
GateClassification classify_entries(const M0Entries& e,
                                    double threshold = kDefaultClassificationThreshold);

/// 0 <= m1, m2 <= 1, m1 + m2 >= 1/3, sqrt(m1) + sqrt(m2) <= 1, slack `slack`.
bool region_check(double m1, double m2, double slack = 1e-9);

/// (1/15) sum of the 15 traceless diagonal entries. Throws NonTracePreserving.
double mu_first_order(const TransferMatrix16& lambda);

/// Second-order partial-RB slow eigenvalue for a locally invariant error
/// (a, b, c) on a gate with entries (m1, m2). Throws DegenerateGate when
/// |1 - m1 + m2| or |m1 + m2 - 1| falls below the degeneracy floor.
double mu_second_order(double a, double b, double c, double m1, double m2);

/// The eigenvalue of M with the largest real part (the slow partial-RB decay).
double top_eigenvalue(const IterationMatrix3& m);

/// W_lambda; m1 = m2 = (5 + cos(lambda pi))/24.
TwoQubitUnitary special_family_gate(double lambda);
/// Member of the family with cos(lambda pi) = -1/5, where m1 = m2 = 1/5.
double special_family_single_decay_lambda();

}  // namespace twirlbench
