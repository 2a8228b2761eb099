#include "twirlbench/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twirlbench/error.hpp"

namespace twirlbench {

std::string_view to_string(GateKind kind) noexcept {
    switch (kind) {
        case GateKind::Generic: return "Generic";
        case GateKind::NearIdentityFamily: return "NearIdentityFamily";
        case GateKind::NearSwapFamily: return "NearSwapFamily";
    }
    return "Unknown";
}

double IterationMatrix3::error_free_relation_residual() const {
    const Eigen::Matrix3d& m = m_;
    double worst = (m.rowwise().sum() - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff();
    const Eigen::RowVector3d weights(1.0, 1.0, 3.0);
    worst = std::max(worst, (weights * m - weights).cwiseAbs().maxCoeff());
    worst = std::max({worst, std::abs(m(0, 1) - m(1, 0)), std::abs(m(0, 2) - m(1, 2)),
                      std::abs(m(2, 0) - m(2, 1)), std::abs(m(0, 0) - m(1, 1))});
    return worst;
}

M0Entries m0_entries_from_invariants(const LocalInvariants& inv) {
    if (!inv.admissible(1e-6)) {
        throw Error(ErrorCode::InadmissibleInvariants,
                    "invariants outside the admissible region: |G1| = " +
                        std::to_string(inv.abs_g1()) + ", G2 = " + std::to_string(inv.g2));
    }
    const double a = inv.abs_g1();
    return {(2.0 * a + inv.g2 + 1.0) / 6.0, (2.0 * a - inv.g2 + 1.0) / 6.0};
}

IterationMatrix3 m0_matrix(double m1, double m2) {
    const double rest = 1.0 - m1 - m2;
    Eigen::Matrix3d m;
    m << m1, m2, rest,
         m2, m1, rest,
         rest / 3.0, rest / 3.0, (1.0 + 2.0 * m1 + 2.0 * m2) / 3.0;
    return IterationMatrix3(m);
}

std::array<double, 3> m0_spectrum(double m1, double m2) {
    return {1.0, m1 - m2, (5.0 * m1 + 5.0 * m2 - 2.0) / 3.0};
}

IterationMatrix3 build_m_with_noise(const TwoQubitUnitary& w0, const TransferMatrix16& lambda) {
    if (!(lambda.trace_preservation_error() <= 1e-9)) {
        throw Error(ErrorCode::NonTracePreserving, "build_m_with_noise: lambda is not trace preserving");
    }
    const TransferMatrix16 w = ptm_from_unitary(w0);
    const Matrix16 wt = w.matrix().transpose();  // ptm(w0^dagger) for unitary w0
    Eigen::Matrix3d m;
    for (int j = 0; j < 3; ++j) {
        IsoChannel basis{0.0, 0.0, 0.0};
        if (j == 0) basis.a = 1.0;
        if (j == 1) basis.b = 1.0;
        if (j == 2) basis.c = 1.0;
        const TransferMatrix16 term(wt * iso_to_ptm(basis).matrix() * w.matrix() * lambda.matrix());
        m.col(j) = twirl_project(twirl_exact(term)).as_vector();
    }
    return IterationMatrix3(m);
}

IterationMatrix3 build_m0_from_gate(const TwoQubitUnitary& w0) {
    return build_m_with_noise(w0, TransferMatrix16::identity());
}

Eigen::Vector3d matrix_power_apply(const IterationMatrix3& m, std::uint64_t n, const Eigen::Vector3d& f0) {
    Eigen::Matrix3d result = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d base = m.matrix();
    while (n > 0) {
        if (n & 1u) result = result * base;
        n >>= 1u;
        if (n > 0) base = base * base;
    }
    return result * f0;
}

IsoChannel predict_f(const IterationMatrix3& m, std::uint64_t n) {
    return IsoChannel::from_vector(matrix_power_apply(m, n, Eigen::Vector3d::Ones()));
}

GateClassification classify_entries(const M0Entries& e, double threshold) {
    GateClassification out;
    if (std::abs(e.m1 - 1.0) + std::abs(e.m2) < threshold) {
        out.kind = GateKind::NearIdentityFamily;
    } else if (std::abs(e.m1) + std::abs(e.m2 - 1.0) < threshold) {
        out.kind = GateKind::NearSwapFamily;
    }
    out.slow_eigenvalue_count = out.kind == GateKind::Generic ? 1 : 3;
    return out;
}

GateClassification classify_gate(const LocalInvariants& inv, double threshold) {
    const double a = inv.abs_g1();
    return classify_entries({(2.0 * a + inv.g2 + 1.0) / 6.0, (2.0 * a - inv.g2 + 1.0) / 6.0}, threshold);
}

bool region_check(double m1, double m2, double slack) {
    if (m1 < -slack || m1 > 1.0 + slack || m2 < -slack || m2 > 1.0 + slack) return false;
    if (m1 + m2 < 1.0 / 3.0 - slack) return false;
    // sqrt(m1) + sqrt(m2) <= 1, written as m2 <= (1 - sqrt(m1))^2. The sqrt blows
    // roundoff up near the axes, so take whichever side is well conditioned.
    const double r1 = std::sqrt(std::clamp(m1, 0.0, 1.0));
    const double r2 = std::sqrt(std::clamp(m2, 0.0, 1.0));
    return m2 - (1.0 - r1) * (1.0 - r1) <= slack || m1 - (1.0 - r2) * (1.0 - r2) <= slack;
}

double mu_first_order(const TransferMatrix16& lambda) {
    if (!(lambda.trace_preservation_error() <= 1e-9)) {
        throw Error(ErrorCode::NonTracePreserving, "mu_first_order: lambda is not trace preserving");
    }
    return lambda.matrix().diagonal().head<15>().sum() / 15.0;
}

double mu_second_order(double a, double b, double c, double m1, double m2) {
    const double antisym = 1.0 - m1 + m2;
    const double sym = -1.0 + m1 + m2;
    if (std::abs(antisym) < kDegeneracyFloor || std::abs(sym) < kDegeneracyFloor) {
        throw Error(ErrorCode::DegenerateGate,
                    "second-order correction diverges near identity/SWAP-equivalent gates");
    }
    const double first = (a + b + 3.0 * c) / 5.0;
    const double ab = a - b;
    const double abc = a + b - 2.0 * c;
    return first + (m1 - m2) * ab * ab / (10.0 * antisym) -
           3.0 * (-2.0 + 5.0 * m1 + 5.0 * m2) * abc * abc / (250.0 * sym);
}

double top_eigenvalue(const IterationMatrix3& m) {
    const auto ev = eig3(m.matrix());
    double best = ev[0].real();
    for (const auto& z : ev) best = std::max(best, z.real());
    return best;
}

TwoQubitUnitary special_family_gate(double lambda) {
    const double angle = lambda * std::numbers::pi / 4.0;
    const Complex c(std::cos(angle), 0.0);
    const Complex s(0.0, std::sin(angle));
    const Complex p(0.5, -0.5), q(0.5, 0.5);
    Matrix4c w;
    w << c, 0, 0, s,
         0, p, q, 0,
         0, q, p, 0,
         s, 0, 0, c;
    return TwoQubitUnitary::from_matrix(w);
}

double special_family_single_decay_lambda() { return std::acos(-0.2) / std::numbers::pi; }

}  // namespace twirlbench
