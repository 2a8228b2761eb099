#pragma once

#include <array>
#include <complex>

#include <Eigen/Core>

#include "twirlbench/random.hpp"

namespace twirlbench {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Matrix16 = Eigen::Matrix<double, 16, 16>;
using Vector16 = Eigen::Matrix<double, 16, 1>;

inline constexpr double kUnitarityTolerance = 1e-10;

/// Two-qubit gate. Qubit 1 is the left Kronecker factor, so the computational
/// index of |q1 q2> is 2*q1 + q2.
class TwoQubitUnitary {
public:
    TwoQubitUnitary() : m_(Matrix4c::Identity()) {}

    /// Throws NonUnitaryInput if max|u^dagger u - 1| exceeds `tolerance`.
    static TwoQubitUnitary from_matrix(const Matrix4c& m, double tolerance = kUnitarityTolerance);
    static TwoQubitUnitary identity() { return {}; }
    /// Kronecker product of two single-qubit unitaries (first acts on qubit 1).
    static TwoQubitUnitary local(const Matrix2c& qubit1, const Matrix2c& qubit2);

    const Matrix4c& matrix() const noexcept { return m_; }
    TwoQubitUnitary adjoint() const { return TwoQubitUnitary(m_.adjoint(), Unchecked{}); }
    double unitarity_error() const;

    friend TwoQubitUnitary operator*(const TwoQubitUnitary& a, const TwoQubitUnitary& b) {
        return TwoQubitUnitary(a.m_ * b.m_, Unchecked{});
    }

private:
    struct Unchecked {};
    TwoQubitUnitary(Matrix4c m, Unchecked) : m_(std::move(m)) {}

    Matrix4c m_;
};

/// Index layout of the normalized two-qubit Pauli basis, P/2 orthonormal
/// under the trace inner product:
///   0..2   sigma_i (x) sigma_0   (qubit-1 block)
///   3..5   sigma_0 (x) sigma_j   (qubit-2 block)
///   6..14  sigma_i (x) sigma_j   (correlation block, index 6 + 3*i + j)
///   15     sigma_0 (x) sigma_0   (trace)
namespace pauli_index {
inline constexpr int kQubit1Begin = 0;
inline constexpr int kQubit2Begin = 3;
inline constexpr int kCorrelationBegin = 6;
inline constexpr int kTrace = 15;
constexpr int qubit1(int i) { return kQubit1Begin + i; }
constexpr int qubit2(int j) { return kQubit2Begin + j; }
constexpr int correlation(int i, int j) { return kCorrelationBegin + 3 * i + j; }
}  // namespace pauli_index

/// Single-qubit Pauli matrix: 0 = identity, 1 = x, 2 = y, 3 = z.
const Matrix2c& pauli2(int which);
/// The 4x4 operator P_alpha for basis index alpha in [0, 16).
const Matrix4c& pauli_basis(int alpha);
/// (first, second) single-qubit Pauli labels (0..3) of basis index alpha.
std::array<int, 2> pauli_labels(int alpha);

/// Density matrix in the parametrization
///   rho = t/4 + (1/2) s.sigma^(1) + (1/2) p.sigma^(2) + beta_ij sigma_i^(1) sigma_j^(2).
struct PauliCoefficients {
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    Eigen::Matrix3d beta = Eigen::Matrix3d::Zero();
    double t = 1.0;

    /// Coordinates x_alpha = Tr[(P_alpha / 2) rho] in the basis order above.
    Vector16 to_vector() const;
    static PauliCoefficients from_vector(const Vector16& x);

    static PauliCoefficients from_density(const Matrix4c& rho);
    Matrix4c density() const;
    /// Computational-basis state |q1 q2>.
    static PauliCoefficients basis_state(int q1, int q2);
};

/// Channel in the normalized Pauli basis. Acts on coefficient vectors from the
/// left; composition is ordinary matrix multiplication with the first-acting
/// channel on the right.
class TransferMatrix16 {
public:
    TransferMatrix16() : m_(Matrix16::Identity()) {}
    explicit TransferMatrix16(const Matrix16& m) : m_(m) {}

    static TransferMatrix16 identity() { return {}; }
    /// rho -> Tr(rho) * 1/4.
    static TransferMatrix16 fully_depolarizing();

    const Matrix16& matrix() const noexcept { return m_; }
    double operator()(int row, int col) const { return m_(row, col); }

    /// max |last row - e_16|; zero for trace-preserving maps.
    double trace_preservation_error() const;

    friend TransferMatrix16 operator*(const TransferMatrix16& a, const TransferMatrix16& b) {
        return TransferMatrix16(a.m_ * b.m_);
    }

private:
    Matrix16 m_;
};

/// R_ab = (1/4) Tr[P_a u P_b u^dagger]. Throws NonUnitaryInput.
TransferMatrix16 ptm_from_unitary(const TwoQubitUnitary& u);
/// Same, for an already validated matrix; skips the unitarity check.
TransferMatrix16 ptm_from_unitary_unchecked(const Matrix4c& u);

/// `first` acts on the state first.
TransferMatrix16 ptm_compose(const TransferMatrix16& second, const TransferMatrix16& first);

PauliCoefficients apply_channel(const TransferMatrix16& m, const PauliCoefficients& x);

/// exp((i/2)[cx XX + cy YY + cz ZZ]), built from its Bell-basis eigen-decomposition.
TwoQubitUnitary canonical_gate(double cx, double cy, double cz);

/// Eigenvalues of a real 3x3 matrix, sorted by descending modulus, ties
/// (within 1e-12) broken by descending real part.
std::array<Complex, 3> eig3(const Eigen::Matrix3d& m);

/// Haar-random U(4) element: complex Gaussian matrix, Householder QR, then the
/// triangular factor's diagonal phases are folded back into Q.
TwoQubitUnitary haar_unitary4(CounterRng& rng);
/// Haar-random U(2) element, same construction.
Matrix2c haar_unitary2(CounterRng& rng);

namespace gates {
TwoQubitUnitary cnot();
TwoQubitUnitary cz();
TwoQubitUnitary swap();
TwoQubitUnitary iswap();
TwoQubitUnitary sqrt_swap();
}  // namespace gates

}  // namespace twirlbench
