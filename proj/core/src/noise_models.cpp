#include "twirlbench/noise_models.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "twirlbench/error.hpp"

namespace twirlbench {

namespace {

using Kraus2 = std::vector<Matrix2c>;

void require_probability(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::ParameterOutOfRange,
                    std::string(name) + " = " + std::to_string(v) + " outside [0, 1]");
    }
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::ParameterOutOfRange, std::string(name) + " is not finite");
    }
}

Kraus2 depolarizing_kraus(double p) {
    const double w0 = std::sqrt(1.0 - 0.75 * p);
    const double w = std::sqrt(0.25 * p);
    return {w0 * pauli2(0), w * pauli2(1), w * pauli2(2), w * pauli2(3)};
}

Kraus2 amplitude_damping_kraus(double g) {
    Matrix2c k0, k1;
    k0 << 1, 0, 0, std::sqrt(1.0 - g);
    k1 << 0, std::sqrt(g), 0, 0;
    return {k0, k1};
}

Kraus2 phase_damping_kraus(double z) {
    Matrix2c k0, k1;
    k0 << 1, 0, 0, std::sqrt(1.0 - z);
    k1 << 0, 0, 0, std::sqrt(z);
    return {k0, k1};
}

std::vector<Matrix4c> tensor_kraus(const Kraus2& first, const Kraus2& second) {
    std::vector<Matrix4c> out;
    out.reserve(first.size() * second.size());
    for (const auto& a : first) {
        for (const auto& b : second) out.push_back(Eigen::kroneckerProduct(a, b).eval());
    }
    return out;
}

Matrix2c rotation(noise::Axis axis, double angle) {
    const int label = axis == noise::Axis::X ? 1 : axis == noise::Axis::Y ? 2 : 3;
    return std::cos(angle / 2.0) * pauli2(0) - Complex(0.0, std::sin(angle / 2.0)) * pauli2(label);
}

struct Materializer {
    TransferMatrix16 operator()(const noise::Identity&) const { return TransferMatrix16::identity(); }

    TransferMatrix16 operator()(const noise::GlobalDepolarizing& n) const {
        require_probability(n.p, "p");
        std::vector<Matrix4c> kraus;
        kraus.push_back(std::sqrt(1.0 - 15.0 * n.p / 16.0) * Matrix4c::Identity());
        for (int a = 0; a < 15; ++a) kraus.push_back(std::sqrt(n.p / 16.0) * pauli_basis(a));
        return ptm_from_kraus(kraus);
    }

    TransferMatrix16 operator()(const noise::LocalDepolarizing& n) const {
        require_probability(n.p1, "p1");
        require_probability(n.p2, "p2");
        return ptm_from_kraus(tensor_kraus(depolarizing_kraus(n.p1), depolarizing_kraus(n.p2)));
    }

    TransferMatrix16 operator()(const noise::AmplitudeDamping& n) const {
        require_probability(n.g1, "g1");
        require_probability(n.g2, "g2");
        return ptm_from_kraus(tensor_kraus(amplitude_damping_kraus(n.g1), amplitude_damping_kraus(n.g2)));
    }

    TransferMatrix16 operator()(const noise::PhaseDamping& n) const {
        require_probability(n.z1, "z1");
        require_probability(n.z2, "z2");
        return ptm_from_kraus(tensor_kraus(phase_damping_kraus(n.z1), phase_damping_kraus(n.z2)));
    }

    TransferMatrix16 operator()(const noise::CoherentOverRotation& n) const {
        require_finite(n.angle, "angle");
        if (n.qubit != 1 && n.qubit != 2) {
            throw Error(ErrorCode::ParameterOutOfRange, "qubit must be 1 or 2");
        }
        const Matrix2c r = rotation(n.axis, n.angle);
        const Matrix2c id = Matrix2c::Identity();
        return ptm_from_unitary(n.qubit == 1 ? TwoQubitUnitary::local(r, id) : TwoQubitUnitary::local(id, r));
    }

    TransferMatrix16 operator()(const noise::CorrelatedZZ& n) const {
        require_finite(n.theta, "theta");
        const Matrix4c u = std::cos(n.theta / 2.0) * Matrix4c::Identity() -
                           Complex(0.0, std::sin(n.theta / 2.0)) * pauli_basis(pauli_index::correlation(2, 2));
        return ptm_from_unitary(TwoQubitUnitary::from_matrix(u));
    }

    TransferMatrix16 operator()(const noise::Iso& n) const {
        require_finite(n.a, "a");
        require_finite(n.b, "b");
        require_finite(n.c, "c");
        const TransferMatrix16 m = iso_to_ptm({n.a, n.b, n.c});
        const CptpReport report = is_cptp(m);
        if (!report.ok) {
            throw Error(ErrorCode::ParameterOutOfRange,
                        "iso triple is not completely positive (min Choi eigenvalue " +
                            std::to_string(report.min_choi_eigenvalue) + ")");
        }
        return m;
    }

    TransferMatrix16 operator()(const noise::Composite& n) const {
        TransferMatrix16 total;
        for (const auto& stage : n.stages) total = noise_to_ptm(stage) * total;
        return total;
    }
};

// -- JSON ----------------------------------------------------------------------

using nlohmann::json;

double number_field(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) {
        throw Error(ErrorCode::MalformedNoiseSpec, std::string("field '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

NoiseSpec from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        throw Error(ErrorCode::MalformedNoiseSpec, "noise spec must be an object with a string 'type'");
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "identity" || type == "none") return noise::Identity{};
    if (type == "global_depolarizing") return noise::GlobalDepolarizing{number_field(j, "p", 0.0)};
    if (type == "local_depolarizing") {
        return noise::LocalDepolarizing{number_field(j, "p1", 0.0), number_field(j, "p2", 0.0)};
    }
    if (type == "amplitude_damping") {
        return noise::AmplitudeDamping{number_field(j, "g1", 0.0), number_field(j, "g2", 0.0)};
    }
    if (type == "phase_damping") {
        return noise::PhaseDamping{number_field(j, "z1", 0.0), number_field(j, "z2", 0.0)};
    }
    if (type == "coherent_over_rotation") {
        noise::CoherentOverRotation r;
        r.qubit = static_cast<int>(number_field(j, "qubit", 1.0));
        const std::string axis = j.value("axis", std::string("x"));
        if (axis == "x") r.axis = noise::Axis::X;
        else if (axis == "y") r.axis = noise::Axis::Y;
        else if (axis == "z") r.axis = noise::Axis::Z;
        else throw Error(ErrorCode::MalformedNoiseSpec, "axis must be one of x, y, z");
        r.angle = number_field(j, "angle", 0.0);
        return r;
    }
    if (type == "correlated_zz") return noise::CorrelatedZZ{number_field(j, "theta", 0.0)};
    if (type == "iso") {
        return noise::Iso{number_field(j, "a", 1.0), number_field(j, "b", 1.0), number_field(j, "c", 1.0)};
    }
    if (type == "composite") {
        if (!j.contains("stages") || !j.at("stages").is_array()) {
            throw Error(ErrorCode::MalformedNoiseSpec, "composite noise needs a 'stages' array");
        }
        noise::Composite c;
        for (const auto& stage : j.at("stages")) c.stages.push_back(from_json(stage));
        return c;
    }
    throw Error(ErrorCode::MalformedNoiseSpec, "unknown noise type '" + type + "'");
}

struct JsonWriter {
    json operator()(const noise::Identity&) const { return {{"type", "identity"}}; }
    json operator()(const noise::GlobalDepolarizing& n) const {
        return {{"type", "global_depolarizing"}, {"p", n.p}};
    }
    json operator()(const noise::LocalDepolarizing& n) const {
        return {{"type", "local_depolarizing"}, {"p1", n.p1}, {"p2", n.p2}};
    }
    json operator()(const noise::AmplitudeDamping& n) const {
        return {{"type", "amplitude_damping"}, {"g1", n.g1}, {"g2", n.g2}};
    }
    json operator()(const noise::PhaseDamping& n) const {
        return {{"type", "phase_damping"}, {"z1", n.z1}, {"z2", n.z2}};
    }
    json operator()(const noise::CoherentOverRotation& n) const {
        const char* axis = n.axis == noise::Axis::X ? "x" : n.axis == noise::Axis::Y ? "y" : "z";
        return {{"type", "coherent_over_rotation"}, {"qubit", n.qubit}, {"axis", axis}, {"angle", n.angle}};
    }
    json operator()(const noise::CorrelatedZZ& n) const {
        return {{"type", "correlated_zz"}, {"theta", n.theta}};
    }
    json operator()(const noise::Iso& n) const {
        return {{"type", "iso"}, {"a", n.a}, {"b", n.b}, {"c", n.c}};
    }
    json operator()(const noise::Composite& n) const {
        json stages = json::array();
        for (const auto& s : n.stages) stages.push_back(std::visit(*this, s.variant));
        return {{"type", "composite"}, {"stages", stages}};
    }
};

}  // namespace

TransferMatrix16 ptm_from_kraus(const std::vector<Matrix4c>& kraus) {
    Matrix16 r = Matrix16::Zero();
    for (int b = 0; b < 16; ++b) {
        Matrix4c image = Matrix4c::Zero();
        for (const auto& k : kraus) image += k * pauli_basis(b) * k.adjoint();
        for (int a = 0; a < 16; ++a) {
            r(a, b) = 0.25 * (pauli_basis(a).transpose().cwiseProduct(image)).sum().real();
        }
    }
    return TransferMatrix16(r);
}

TransferMatrix16 noise_to_ptm(const NoiseSpec& spec) { return std::visit(Materializer{}, spec.variant); }

Eigen::Matrix<Complex, 16, 16> choi_matrix(const TransferMatrix16& m) {
    Eigen::Matrix<Complex, 16, 16> choi = Eigen::Matrix<Complex, 16, 16>::Zero();
    const Eigen::Matrix<Complex, 16, 16> r = m.matrix().cast<Complex>();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            Eigen::Matrix<Complex, 16, 1> x;
            for (int b = 0; b < 16; ++b) x(b) = 0.5 * pauli_basis(b)(j, i);  // Tr[P_b |i><j|]/2
            const Eigen::Matrix<Complex, 16, 1> y = r * x;
            Matrix4c image = Matrix4c::Zero();
            for (int a = 0; a < 16; ++a) image += (0.5 * y(a)) * pauli_basis(a);
            // Block (i, j) of (E (x) id)(|Omega><Omega|) with the input index second.
            for (int r1 = 0; r1 < 4; ++r1) {
                for (int c1 = 0; c1 < 4; ++c1) choi(4 * r1 + i, 4 * c1 + j) = image(r1, c1);
            }
        }
    }
    return choi;
}

CptpReport is_cptp(const TransferMatrix16& m) {
    CptpReport report;
    report.trace_error = m.trace_preservation_error();
    const auto choi = choi_matrix(m);
    const Eigen::Matrix<Complex, 16, 16> herm = 0.5 * (choi + choi.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Complex, 16, 16>> solver(herm, Eigen::EigenvaluesOnly);
    report.min_choi_eigenvalue = solver.eigenvalues().minCoeff();
    report.ok = report.trace_error <= 1e-9 && report.min_choi_eigenvalue >= -1e-9;
    return report;
}

NoiseSpec parse_noise_spec(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedNoiseSpec, std::string("invalid JSON: ") + e.what());
    }
    return from_json(j);
}

std::string noise_spec_to_json(const NoiseSpec& spec) { return std::visit(JsonWriter{}, spec.variant).dump(); }

}  // namespace twirlbench
