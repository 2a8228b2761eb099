#pragma once

#include <array>
#include <vector>

#include "twirlbench/pauli_algebra.hpp"

namespace twirlbench {

/// Locally invariant channel: s -> a s, p -> b p, beta -> c beta.
struct IsoChannel {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;

    Eigen::Vector3d as_vector() const { return {a, b, c}; }
    static IsoChannel from_vector(const Eigen::Vector3d& f) { return {f(0), f(1), f(2)}; }
    friend bool operator==(const IsoChannel&, const IsoChannel&) = default;
};

/// The single-qubit Clifford group modulo phase, 24 elements with the
/// identity first. Each element is canonicalized so its first nonzero entry
/// is real and positive.
class CliffordC1Set {
public:
    static const CliffordC1Set& instance();

    std::size_t size() const noexcept { return elements_.size(); }
    const Matrix2c& operator[](std::size_t k) const { return elements_[k]; }
    const std::vector<Matrix2c>& elements() const noexcept { return elements_; }

    /// Index of the element equal to `u` up to a global phase, or -1.
    int find(const Matrix2c& u, double tol = 1e-9) const;

private:
    CliffordC1Set();
    std::vector<Matrix2c> elements_;
};

inline constexpr std::size_t kLocalCliffordCount = 576;

const CliffordC1Set& single_qubit_cliffords();

/// Element g_k = C_{k / 24} (x) C_{k % 24} of C1 (x) C1.
TwoQubitUnitary local_clifford(std::size_t k);
/// Cached transfer matrices ptm(g_k) (and of g_k^dagger, which is ptm^T).
const std::array<TransferMatrix16, kLocalCliffordCount>& local_clifford_ptms();

/// Exact mean of ptm(g^dagger) m ptm(g) over all 576 elements of C1 (x) C1,
/// accumulated by pairwise summation.
TransferMatrix16 twirl_exact(const TransferMatrix16& m);

/// Block traces: a = (1/3) sum over the qubit-1 block of diagonal entries,
/// b likewise for qubit 2, c = (1/9) sum over the correlation block.
IsoChannel twirl_project(const TransferMatrix16& m);

/// a 1_3 (+) b 1_3 (+) c 1_9 (+) 1.
TransferMatrix16 iso_to_ptm(const IsoChannel& ch);

/// Depolarizing parameter a fully twirled (all of U(4)) channel would have.
double mu_full(const IsoChannel& ch);

/// Pairwise (cascade) sum of `count` matrices produced by `term(k)`.
template <typename F>
Matrix16 pairwise_sum(std::size_t begin, std::size_t end, const F& term) {
    if (end - begin == 1) return term(begin);
    if (end - begin == 2) return term(begin) + term(begin + 1);
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

}  // namespace twirlbench
