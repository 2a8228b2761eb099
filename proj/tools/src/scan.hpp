#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace twirlbench::cli {

struct ScanRow {
    double m1 = 0.0;
    double m2 = 0.0;
    double abs_g1 = 0.0;
    double g2 = 0.0;
    double re_g1 = 0.0;
    double im_g1 = 0.0;
    std::string label;
};

/// Haar samples in index order (sample i uses substream i), then the marker
/// gates identity, swap, cnot, iswap, sqrt_swap.
std::vector<ScanRow> scan_haar(std::uint64_t samples, std::uint64_t seed, unsigned threads);

std::string scan_csv(const std::vector<ScanRow>& rows);

/// Scatter over the unit square (m1 right, m2 up) with the region boundaries
/// m1 + m2 = 1/3 and sqrt(m1) + sqrt(m2) = 1.
std::string scan_svg(const std::vector<ScanRow>& rows);

}  // namespace twirlbench::cli
