#include "scan.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "twirlbench/detail/parallel.hpp"
#include "twirlbench/invariants.hpp"
#include "twirlbench/iteration.hpp"
#include "twirlbench/pauli_algebra.hpp"
#include "twirlbench/random.hpp"
#include "twirlbench_cli/cli.hpp"

namespace twirlbench::cli {

namespace {

constexpr std::uint64_t kScanStream = 0x5CA7;

ScanRow row_for(const TwoQubitUnitary& u, std::string label) {
    const LocalInvariants inv = local_invariants(u);
    const M0Entries e = m0_entries_from_invariants(inv);
    return {e.m1, e.m2, inv.abs_g1(), inv.g2, inv.g1.real(), inv.g1.imag(), std::move(label)};
}

}  // namespace

std::vector<ScanRow> scan_haar(std::uint64_t samples, std::uint64_t seed, unsigned threads) {
    std::vector<ScanRow> rows(samples);
    const CounterRng root(seed, kScanStream);
    detail::parallel_for(samples, threads, [&](std::size_t i) {
        CounterRng rng = root.substream(i);
        rows[i] = row_for(haar_unitary4(rng), "haar");
    });
    const std::pair<const char*, TwoQubitUnitary> markers[] = {
        {"identity", TwoQubitUnitary::identity()}, {"swap", gates::swap()},
        {"cnot", gates::cnot()},                   {"iswap", gates::iswap()},
        {"sqrt_swap", gates::sqrt_swap()},
    };
    for (const auto& [label, gate] : markers) rows.push_back(row_for(gate, label));
    return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
    std::string out = "m1,m2,abs_G1,G2,re_G1,im_G1,label\n";
    for (const auto& r : rows) {
        for (double v : {r.m1, r.m2, r.abs_g1, r.g2, r.re_g1, r.im_g1}) {
            out += format_double(v);
            out += ',';
        }
        out += r.label;
        out += '\n';
    }
    return out;
}

std::string scan_svg(const std::vector<ScanRow>& rows) {
    constexpr double kSize = 480.0;
    constexpr double kMargin = 40.0;
    const auto x = [&](double m1) { return kMargin + m1 * kSize; };
    const auto y = [&](double m2) { return kMargin + (1.0 - m2) * kSize; };

    std::ostringstream svg;
    svg.imbue(std::locale::classic());
    const double total = kSize + 2 * kMargin;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total << "\" height=\"" << total
        << "\" viewBox=\"0 0 " << total << ' ' << total << "\">\n";
    svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize << "\" height=\"" << kSize
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kMargin + kSize / 2 << "\" y=\"" << total - 8 << "\" text-anchor=\"middle\">m1</text>\n";
    svg << "<text x=\"12\" y=\"" << kMargin + kSize / 2 << "\" text-anchor=\"middle\">m2</text>\n";

    // m1 + m2 = 1/3
    svg << "<line x1=\"" << x(1.0 / 3.0) << "\" y1=\"" << y(0.0) << "\" x2=\"" << x(0.0) << "\" y2=\""
        << y(1.0 / 3.0) << "\" stroke=\"steelblue\"/>\n";
    // sqrt(m1) + sqrt(m2) = 1, parameterized by s = sqrt(m1)
    svg << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
    constexpr int kSteps = 200;
    for (int k = 0; k <= kSteps; ++k) {
        const double s = static_cast<double>(k) / kSteps;
        svg << x(s * s) << ',' << y((1.0 - s) * (1.0 - s)) << ' ';
    }
    svg << "\"/>\n";

    for (const auto& r : rows) {
        if (r.label == "haar") {
            svg << "<circle cx=\"" << x(r.m1) << "\" cy=\"" << y(r.m2) << "\" r=\"1\" fill=\"gray\"/>\n";
        }
    }
    for (const auto& r : rows) {
        if (r.label != "haar") {
            svg << "<circle cx=\"" << x(r.m1) << "\" cy=\"" << y(r.m2) << "\" r=\"4\" fill=\"crimson\"/>\n";
            svg << "<text x=\"" << x(r.m1) + 6 << "\" y=\"" << y(r.m2) - 6 << "\" font-size=\"12\">" << r.label
                << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace twirlbench::cli
