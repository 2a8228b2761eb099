#pragma once

#include "twirlbench/pauli_algebra.hpp"

namespace twirlbench {

/// Local invariants of a two-qubit gate class: complex G1 and real G2.
/// Two gates are locally equivalent iff both agree.
struct LocalInvariants {
    Complex g1{1.0, 0.0};
    double g2 = 3.0;

    double abs_g1() const { return std::abs(g1); }
    /// 2|G1| + 1 >= |G2|, G2^2 + 3 >= 12|G1|, each with slack `slack`.
    bool admissible(double slack = 1e-9) const;
};

/// Closed forms on the canonical family, with k_i = cos(2 c_i).
struct CanonicalInvariants {
    double abs_g1;
    double g2;
    double re_g1;
    double im_g1_abs;
};

inline constexpr double kDefaultEquivalenceTolerance = 1e-8;

/// Magic-basis change Q; its columns are (phase-adjusted) Bell states.
const Matrix4c& bell_matrix();

/// Normalizes u to det 1, moves to the Bell basis w_B = Q^dagger u Q and
/// evaluates G1 = tr^2(w)/16, G2 = (tr^2(w) - tr(w^2))/4 with w = w_B^T w_B.
LocalInvariants local_invariants(const TwoQubitUnitary& u);

/// Same pipeline with a caller-supplied basis change (used to check that the
/// result does not depend on the Bell-basis labelling).
LocalInvariants local_invariants_in_basis(const TwoQubitUnitary& u, const Matrix4c& q);

CanonicalInvariants invariants_from_c(double cx, double cy, double cz);

bool locally_equivalent(const TwoQubitUnitary& u, const TwoQubitUnitary& v,
                        double tol = kDefaultEquivalenceTolerance);

}  // namespace twirlbench
