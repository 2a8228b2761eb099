#include "twirlbench/pauli_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/KroneckerProduct>

#include "twirlbench/error.hpp"

namespace twirlbench {

namespace {

constexpr Complex kI{0.0, 1.0};

// Basis index -> (label on qubit 1, label on qubit 2), labels 0 = identity.
constexpr std::array<std::array<int, 2>, 16> kLabels = {{
    {1, 0}, {2, 0}, {3, 0},
    {0, 1}, {0, 2}, {0, 3},
    {1, 1}, {1, 2}, {1, 3},
    {2, 1}, {2, 2}, {2, 3},
    {3, 1}, {3, 2}, {3, 3},
    {0, 0},
}};

std::array<Matrix2c, 4> make_paulis() {
    std::array<Matrix2c, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -kI, kI, 0;
    p[3] << 1, 0, 0, -1;
    return p;
}

std::array<Matrix4c, 16> make_basis() {
    std::array<Matrix4c, 16> basis;
    for (int a = 0; a < 16; ++a) {
        basis[a] = Eigen::kroneckerProduct(pauli2(kLabels[a][0]), pauli2(kLabels[a][1])).eval();
    }
    return basis;
}

double max_abs(const Matrix4c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

const Matrix2c& pauli2(int which) {
    static const std::array<Matrix2c, 4> paulis = make_paulis();
    return paulis.at(static_cast<std::size_t>(which));
}

const Matrix4c& pauli_basis(int alpha) {
    static const std::array<Matrix4c, 16> basis = make_basis();
    return basis.at(static_cast<std::size_t>(alpha));
}

std::array<int, 2> pauli_labels(int alpha) { return kLabels.at(static_cast<std::size_t>(alpha)); }

// -- TwoQubitUnitary ---------------------------------------------------------

TwoQubitUnitary TwoQubitUnitary::from_matrix(const Matrix4c& m, double tolerance) {
    const double err = max_abs(m.adjoint() * m - Matrix4c::Identity());
    if (!(err <= tolerance)) {
        throw Error(ErrorCode::NonUnitaryInput,
                    "max|u^dagger u - 1| = " + std::to_string(err) + " exceeds tolerance");
    }
    return TwoQubitUnitary(m, Unchecked{});
}

TwoQubitUnitary TwoQubitUnitary::local(const Matrix2c& qubit1, const Matrix2c& qubit2) {
    return from_matrix(Eigen::kroneckerProduct(qubit1, qubit2).eval());
}

double TwoQubitUnitary::unitarity_error() const {
    return max_abs(m_.adjoint() * m_ - Matrix4c::Identity());
}

// -- PauliCoefficients -------------------------------------------------------

Vector16 PauliCoefficients::to_vector() const {
    Vector16 x;
    for (int i = 0; i < 3; ++i) {
        x(pauli_index::qubit1(i)) = s(i);
        x(pauli_index::qubit2(i)) = p(i);
        for (int j = 0; j < 3; ++j) x(pauli_index::correlation(i, j)) = 2.0 * beta(i, j);
    }
    x(pauli_index::kTrace) = 0.5 * t;
    return x;
}

PauliCoefficients PauliCoefficients::from_vector(const Vector16& x) {
    PauliCoefficients c;
    for (int i = 0; i < 3; ++i) {
        c.s(i) = x(pauli_index::qubit1(i));
        c.p(i) = x(pauli_index::qubit2(i));
        for (int j = 0; j < 3; ++j) c.beta(i, j) = 0.5 * x(pauli_index::correlation(i, j));
    }
    c.t = 2.0 * x(pauli_index::kTrace);
    return c;
}

PauliCoefficients PauliCoefficients::from_density(const Matrix4c& rho) {
    Vector16 x;
    for (int a = 0; a < 16; ++a) x(a) = 0.5 * (pauli_basis(a) * rho).trace().real();
    return from_vector(x);
}

Matrix4c PauliCoefficients::density() const {
    const Vector16 x = to_vector();
    Matrix4c rho = Matrix4c::Zero();
    for (int a = 0; a < 16; ++a) rho += (0.5 * x(a)) * pauli_basis(a);
    return rho;
}

PauliCoefficients PauliCoefficients::basis_state(int q1, int q2) {
    Matrix4c rho = Matrix4c::Zero();
    const int k = 2 * q1 + q2;
    rho(k, k) = 1.0;
    return from_density(rho);
}

// -- TransferMatrix16 --------------------------------------------------------

TransferMatrix16 TransferMatrix16::fully_depolarizing() {
    Matrix16 m = Matrix16::Zero();
    m(pauli_index::kTrace, pauli_index::kTrace) = 1.0;
    return TransferMatrix16(m);
}

double TransferMatrix16::trace_preservation_error() const {
    Eigen::Matrix<double, 1, 16> unit = Eigen::Matrix<double, 1, 16>::Zero();
    unit(pauli_index::kTrace) = 1.0;
    return (m_.row(pauli_index::kTrace) - unit).cwiseAbs().maxCoeff();
}

TransferMatrix16 ptm_from_unitary_unchecked(const Matrix4c& u) {
    Matrix16 r;
    const Matrix4c ud = u.adjoint();
    for (int b = 0; b < 16; ++b) {
        const Matrix4c image = u * pauli_basis(b) * ud;
        for (int a = 0; a < 16; ++a) {
            // Tr[P_a X] without forming the product.
            r(a, b) = 0.25 * (pauli_basis(a).transpose().cwiseProduct(image)).sum().real();
        }
    }
    return TransferMatrix16(r);
}

TransferMatrix16 ptm_from_unitary(const TwoQubitUnitary& u) {
    if (!(u.unitarity_error() <= kUnitarityTolerance)) {
        throw Error(ErrorCode::NonUnitaryInput, "ptm_from_unitary: input is not unitary");
    }
    return ptm_from_unitary_unchecked(u.matrix());
}

TransferMatrix16 ptm_compose(const TransferMatrix16& second, const TransferMatrix16& first) {
    return second * first;
}

PauliCoefficients apply_channel(const TransferMatrix16& m, const PauliCoefficients& x) {
    return PauliCoefficients::from_vector(m.matrix() * x.to_vector());
}

// -- Canonical family ---------------------------------------------------------

TwoQubitUnitary canonical_gate(double cx, double cy, double cz) {
    // Bell states with their (XX, YY, ZZ) eigenvalues.
    const double r = 1.0 / std::numbers::sqrt2;
    struct BellState {
        Eigen::Vector4cd v;
        double xx, yy, zz;
    };
    std::array<BellState, 4> bell;
    bell[0].v << r, 0, 0, r;   // Phi+
    bell[0].xx = 1, bell[0].yy = -1, bell[0].zz = 1;
    bell[1].v << r, 0, 0, -r;  // Phi-
    bell[1].xx = -1, bell[1].yy = 1, bell[1].zz = 1;
    bell[2].v << 0, r, r, 0;   // Psi+
    bell[2].xx = 1, bell[2].yy = 1, bell[2].zz = -1;
    bell[3].v << 0, r, -r, 0;  // Psi-
    bell[3].xx = -1, bell[3].yy = -1, bell[3].zz = -1;

    Matrix4c w = Matrix4c::Zero();
    for (const auto& b : bell) {
        const double phase = 0.5 * (cx * b.xx + cy * b.yy + cz * b.zz);
        w += std::polar(1.0, phase) * (b.v * b.v.adjoint());
    }
    return TwoQubitUnitary::from_matrix(w);
}

// -- Spectra ------------------------------------------------------------------

std::array<Complex, 3> eig3(const Eigen::Matrix3d& m) {
    Eigen::EigenSolver<Eigen::Matrix3d> solver(m, /*computeEigenvectors=*/false);
    const Eigen::Vector3cd ev = solver.eigenvalues();
    std::array<Complex, 3> out = {ev(0), ev(1), ev(2)};
    std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
        const double da = std::abs(a), db = std::abs(b);
        if (std::abs(da - db) > 1e-12) return da > db;
        if (std::abs(a.real() - b.real()) > 1e-12) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

// -- Haar sampling --------------------------------------------------------------

namespace {

template <int N>
Eigen::Matrix<Complex, N, N> haar_unitary(CounterRng& rng) {
    using Mat = Eigen::Matrix<Complex, N, N>;
    Mat z;
    const double scale = 1.0 / std::numbers::sqrt2;
    for (int c = 0; c < N; ++c) {
        for (int r = 0; r < N; ++r) z(r, c) = Complex(rng.normal(), rng.normal()) * scale;
    }
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ() * Mat::Identity();
    const Mat rr = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (int k = 0; k < N; ++k) {
        const Complex d = rr(k, k);
        const double mag = std::abs(d);
        q.col(k) *= (mag > 0.0) ? d / mag : Complex(1.0);
    }
    return q;
}

}  // namespace

TwoQubitUnitary haar_unitary4(CounterRng& rng) {
    return TwoQubitUnitary::from_matrix(haar_unitary<4>(rng));
}

Matrix2c haar_unitary2(CounterRng& rng) { return haar_unitary<2>(rng); }

// -- Named gates -------------------------------------------------------------------

namespace gates {

TwoQubitUnitary cnot() {
    Matrix4c m;
    m << 1, 0, 0, 0,
         0, 1, 0, 0,
         0, 0, 0, 1,
         0, 0, 1, 0;
    return TwoQubitUnitary::from_matrix(m);
}

TwoQubitUnitary cz() {
    Matrix4c m = Matrix4c::Identity();
    m(3, 3) = -1.0;
    return TwoQubitUnitary::from_matrix(m);
}

TwoQubitUnitary swap() {
    Matrix4c m;
    m << 1, 0, 0, 0,
         0, 0, 1, 0,
         0, 1, 0, 0,
         0, 0, 0, 1;
    return TwoQubitUnitary::from_matrix(m);
}

TwoQubitUnitary iswap() {
    Matrix4c m;
    m << 1, 0, 0, 0,
         0, 0, kI, 0,
         0, kI, 0, 0,
         0, 0, 0, 1;
    return TwoQubitUnitary::from_matrix(m);
}

TwoQubitUnitary sqrt_swap() {
    const Complex p(0.5, 0.5), q(0.5, -0.5);
    Matrix4c m;
    m << 1, 0, 0, 0,
         0, p, q, 0,
         0, q, p, 0,
         0, 0, 0, 1;
    return TwoQubitUnitary::from_matrix(m);
}

}  // namespace gates

}  // namespace twirlbench
