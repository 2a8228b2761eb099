#include "twirlbench/invariants.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "twirlbench/error.hpp"

namespace twirlbench {

namespace {

Matrix4c make_bell_matrix() {
    const Complex i(0.0, 1.0);
    Matrix4c q;
    q << 1, 0, 0, i,
         0, i, 1, 0,
         0, i, -1, 0,
         1, 0, 0, -i;
    return q / std::numbers::sqrt2;
}

}  // namespace

bool LocalInvariants::admissible(double slack) const {
    const double a = abs_g1();
    return 2.0 * a + 1.0 >= std::abs(g2) - slack && g2 * g2 + 3.0 >= 12.0 * a - slack &&
           a >= -slack;
}

const Matrix4c& bell_matrix() {
    static const Matrix4c q = make_bell_matrix();
    return q;
}

LocalInvariants local_invariants_in_basis(const TwoQubitUnitary& u, const Matrix4c& q) {
    if (!(u.unitarity_error() <= kUnitarityTolerance)) {
        throw Error(ErrorCode::NonUnitaryInput, "local_invariants: input is not unitary");
    }
    // Principal fourth root of det u; the remaining ambiguity i^k multiplies
    // w by (-1)^k and leaves both invariants unchanged.
    const Complex det = u.matrix().determinant();
    const Complex root = std::pow(det, 0.25);
    const Matrix4c su = u.matrix() / root;

    const Matrix4c wb = q.adjoint() * su * q;
    const Matrix4c omega = wb.transpose() * wb;
    const Complex tr = omega.trace();
    const Complex tr_sq = (omega * omega).trace();

    LocalInvariants inv;
    inv.g1 = tr * tr / 16.0;
    const Complex g2 = (tr * tr - tr_sq) / 4.0;
    if (std::abs(g2.imag()) > 1e-9) {
        throw Error(ErrorCode::NonUnitaryInput,
                    "local_invariants: G2 has imaginary residue " + std::to_string(g2.imag()));
    }
    inv.g2 = g2.real();
    return inv;
}

LocalInvariants local_invariants(const TwoQubitUnitary& u) {
    return local_invariants_in_basis(u, bell_matrix());
}

CanonicalInvariants invariants_from_c(double cx, double cy, double cz) {
    const double kx = std::cos(2.0 * cx), ky = std::cos(2.0 * cy), kz = std::cos(2.0 * cz);
    CanonicalInvariants out;
    out.g2 = kx + ky + kz;
    out.abs_g1 = (2.0 + out.g2 * out.g2 - (kx * kx + ky * ky + kz * kz)) / 8.0;
    out.re_g1 = (kx + ky + kz + kx * ky * kz) / 4.0;
    const double prod = (1.0 - kx * kx) * (1.0 - ky * ky) * (1.0 - kz * kz);
    out.im_g1_abs = std::sqrt(std::max(prod, 0.0)) / 4.0;
    return out;
}

bool locally_equivalent(const TwoQubitUnitary& u, const TwoQubitUnitary& v, double tol) {
    const LocalInvariants a = local_invariants(u);
    const LocalInvariants b = local_invariants(v);
    return std::abs(a.g1 - b.g1) <= tol && std::abs(a.g2 - b.g2) <= tol;
}

}  // namespace twirlbench
