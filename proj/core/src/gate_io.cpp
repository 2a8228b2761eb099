#include "twirlbench/gate_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "twirlbench/error.hpp"
#include "twirlbench/iteration.hpp"

namespace twirlbench {

namespace {

using nlohmann::json;

bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::vector<std::string> registered_gate_names() {
    return {"identity", "cnot", "cz", "swap", "iswap", "sqrt_swap", "w_special", "w_lambda:<l>",
            "canonical:<cx>,<cy>,<cz>"};
}

TwoQubitUnitary gate_by_name(std::string_view name) {
    if (name == "identity") return TwoQubitUnitary::identity();
    if (name == "cnot") return gates::cnot();
    if (name == "cz") return gates::cz();
    if (name == "swap") return gates::swap();
    if (name == "iswap") return gates::iswap();
    if (name == "sqrt_swap") return gates::sqrt_swap();
    if (name == "w_special") return special_family_gate(special_family_single_decay_lambda());

    constexpr std::string_view kW = "w_lambda:";
    constexpr std::string_view kCanonical = "canonical:";
    if (name.starts_with(kW)) {
        double l = 0.0;
        if (parse_double(name.substr(kW.size()), l)) return special_family_gate(l);
    } else if (name.starts_with(kCanonical)) {
        std::string_view rest = name.substr(kCanonical.size());
        std::vector<double> c;
        bool ok = true;
        while (ok) {
            const auto comma = rest.find(',');
            double v = 0.0;
            ok = parse_double(rest.substr(0, comma), v);
            if (ok) c.push_back(v);
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (ok && c.size() == 3) return canonical_gate(c[0], c[1], c[2]);
    }
    throw Error(ErrorCode::UnknownGateName, "unknown gate '" + std::string(name) + "'");
}

TwoQubitUnitary parse_gate_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedGateFile, std::string("gate file is not JSON: ") + e.what());
    }
    const auto fail = [](const std::string& why) { throw Error(ErrorCode::MalformedGateFile, why); };
    if (!j.is_object() || !j.contains("matrix")) fail("gate file needs a \"matrix\" field");
    const json& m = j["matrix"];
    if (!m.is_array() || m.size() != 4) fail("\"matrix\" must have 4 rows");
    Matrix4c u;
    for (int r = 0; r < 4; ++r) {
        const json& row = m[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != 4) fail("row " + std::to_string(r) + " must have 4 entries");
        for (int c = 0; c < 4; ++c) {
            const json& e = row[static_cast<std::size_t>(c)];
            if (e.is_number()) {
                u(r, c) = Complex(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                u(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                fail("entry (" + std::to_string(r) + "," + std::to_string(c) + ") must be [re, im]");
            }
        }
    }
    return TwoQubitUnitary::from_matrix(u);
}

std::string gate_to_json(const TwoQubitUnitary& u) {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back({u.matrix()(r, c).real(), u.matrix()(r, c).imag()});
        rows.push_back(row);
    }
    return json{{"matrix", rows}}.dump();
}

TwoQubitUnitary resolve_gate(std::string_view source) {
    try {
        return gate_by_name(source);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UnknownGateName) throw;
    }
    const bool looks_like_name = source.find(':') != std::string_view::npos ||
                                 (source.find('.') == std::string_view::npos &&
                                  source.find('/') == std::string_view::npos);
    std::ifstream in{std::string(source)};
    if (!in) {
        if (looks_like_name) throw Error(ErrorCode::UnknownGateName, "unknown gate '" + std::string(source) + "'");
        throw Error(ErrorCode::MalformedGateFile, "cannot read gate file '" + std::string(source) + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_gate_json(buf.str());
}

}  // namespace twirlbench
