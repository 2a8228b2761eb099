#include "twirlbench/twirl.hpp"

#include <cmath>
#include <deque>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

namespace twirlbench {

namespace {

// Fix the global phase so the first entry with modulus above 1e-9 is real
// positive; entries are then snapped onto the exact lattice
// {0, +-1, +-i, (+-1 +-i)/2, (+-1)/sqrt2, (+-i)/sqrt2}.
Matrix2c canonicalize(Matrix2c u) {
    for (int k = 0; k < 4; ++k) {
        const Complex z = u(k / 2, k % 2);
        if (std::abs(z) > 1e-9) {
            u *= std::conj(z) / std::abs(z);
            break;
        }
    }
    const double values[] = {0.0, 1.0, -1.0, 0.5, -0.5, std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2};
    for (int k = 0; k < 4; ++k) {
        Complex& z = u(k / 2, k % 2);
        double re = z.real(), im = z.imag();
        for (double v : values) {
            if (std::abs(re - v) < 1e-9) re = v;
            if (std::abs(im - v) < 1e-9) im = v;
        }
        z = Complex(re, im);
    }
    return u;
}

bool equal_up_to_phase(const Matrix2c& a, const Matrix2c& b, double tol) {
    // |Tr(a^dagger b)| = 2 iff b = e^{i phi} a for unitary a, b.
    return std::abs(std::abs((a.adjoint() * b).trace()) - 2.0) < tol;
}

}  // namespace

CliffordC1Set::CliffordC1Set() {
    const double r = 1.0 / std::numbers::sqrt2;
    Matrix2c h;
    h << r, r, r, -r;
    Matrix2c s;
    s << 1, 0, 0, Complex(0.0, 1.0);

    elements_.push_back(Matrix2c::Identity());
    // Breadth-first closure under right multiplication by the generators.
    std::deque<Matrix2c> frontier{Matrix2c::Identity()};
    while (!frontier.empty()) {
        const Matrix2c g = frontier.front();
        frontier.pop_front();
        for (const Matrix2c* gen : {&h, &s}) {
            const Matrix2c candidate = canonicalize(g * *gen);
            if (find(candidate) < 0) {
                elements_.push_back(candidate);
                frontier.push_back(candidate);
            }
        }
    }
}

const CliffordC1Set& CliffordC1Set::instance() {
    static const CliffordC1Set set;
    return set;
}

int CliffordC1Set::find(const Matrix2c& u, double tol) const {
    for (std::size_t k = 0; k < elements_.size(); ++k) {
        if (equal_up_to_phase(elements_[k], u, tol)) return static_cast<int>(k);
    }
    return -1;
}

const CliffordC1Set& single_qubit_cliffords() { return CliffordC1Set::instance(); }

TwoQubitUnitary local_clifford(std::size_t k) {
    const auto& c = single_qubit_cliffords();
    return TwoQubitUnitary::local(c[k / c.size()], c[k % c.size()]);
}

const std::array<TransferMatrix16, kLocalCliffordCount>& local_clifford_ptms() {
    static const auto table = [] {
        std::array<TransferMatrix16, kLocalCliffordCount> t;
        for (std::size_t k = 0; k < kLocalCliffordCount; ++k) t[k] = ptm_from_unitary(local_clifford(k));
        return t;
    }();
    return table;
}

TransferMatrix16 twirl_exact(const TransferMatrix16& m) {
    const auto& table = local_clifford_ptms();
    const Matrix16& x = m.matrix();
    Matrix16 sum = pairwise_sum(0, kLocalCliffordCount, [&](std::size_t k) -> Matrix16 {
        const Matrix16& g = table[k].matrix();
        return g.transpose() * x * g;
    });
    return TransferMatrix16(sum / static_cast<double>(kLocalCliffordCount));
}

IsoChannel twirl_project(const TransferMatrix16& m) {
    const Vector16 d = m.matrix().diagonal();
    return {d.segment<3>(pauli_index::kQubit1Begin).sum() / 3.0,
            d.segment<3>(pauli_index::kQubit2Begin).sum() / 3.0,
            d.segment<9>(pauli_index::kCorrelationBegin).sum() / 9.0};
}

TransferMatrix16 iso_to_ptm(const IsoChannel& ch) {
    Vector16 d;
    d.segment<3>(pauli_index::kQubit1Begin).setConstant(ch.a);
    d.segment<3>(pauli_index::kQubit2Begin).setConstant(ch.b);
    d.segment<9>(pauli_index::kCorrelationBegin).setConstant(ch.c);
    d(pauli_index::kTrace) = 1.0;
    return TransferMatrix16(Matrix16(d.asDiagonal()));
}

double mu_full(const IsoChannel& ch) { return (ch.a + ch.b + 3.0 * ch.c) / 5.0; }

}  // namespace twirlbench
