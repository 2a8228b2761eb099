#include "twirlbench_cli/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scan.hpp"
#include "twirlbench/decay_analysis.hpp"
#include "twirlbench/error.hpp"
#include "twirlbench/gate_io.hpp"
#include "twirlbench/invariants.hpp"
#include "twirlbench/iteration.hpp"
#include "twirlbench/noise_models.hpp"
#include "twirlbench/rb_simulator.hpp"

namespace twirlbench::cli {

using nlohmann::json;

namespace {

constexpr std::string_view kRecordsHeader = "length,n_up_up,n_up_down,n_down_up,n_down_down,sequences,shots";

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::FitDiverged:
        case ErrorCode::NonCptpChannel:
        case ErrorCode::NonTracePreserving:
        case ErrorCode::ChannelBelowNoiseFloor:
        case ErrorCode::DegenerateGate:
        case ErrorCode::InadmissibleInvariants:
        case ErrorCode::NonPhysicalTriple:
            return kExitNumericalFailure;
        default:
            return kExitUserError;
    }
}

unsigned threads_from_env() {
    const char* env = std::getenv("TWIRLBENCH_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    unsigned v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::ParameterOutOfRange, "TWIRLBENCH_THREADS must be a non-negative integer");
    }
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IOFailure, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Inline JSON, or a path to a JSON file.
NoiseSpec load_noise(const std::string& source) {
    const auto first = source.find_first_not_of(" \t\n");
    if (first != std::string::npos && source[first] == '{') return parse_noise_spec(source);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(source, ec)) {
        throw Error(ErrorCode::MalformedNoiseSpec, "noise must be inline JSON or a readable file: '" + source + "'");
    }
    return parse_noise_spec(read_file(source));
}

json gate_echo(const std::string& source, const TwoQubitUnitary& gate) {
    return {{"source", source}, {"matrix", json::parse(gate_to_json(gate))["matrix"]}};
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
    } else {
        write_file_atomic(out_path, text.back() == '\n' ? text : text + '\n');
    }
}

std::string predict_csv(const IterationMatrix3& m, std::uint64_t max_length) {
    std::string csv = "n,a_n,b_n,c_n,p_up_up,p_up_down,p_down_up,p_down_down\n";
    for (std::uint64_t n = 1; n <= max_length; ++n) {
        const IsoChannel f = predict_f(m, n);
        const OutcomeProbabilities p = predict_probabilities(f);
        csv += std::to_string(n);
        for (double v : {f.a, f.b, f.c, p[0], p[1], p[2], p[3]}) {
            csv += ',';
            csv += format_double(v);
        }
        csv += '\n';
    }
    return csv;
}

std::string records_csv(const std::vector<IrbRecord>& records) {
    std::string csv(kRecordsHeader);
    csv += '\n';
    for (const auto& r : records) {
        csv += std::to_string(r.length);
        for (auto c : r.counts) csv += ',' + std::to_string(c);
        csv += ',' + std::to_string(r.sequences) + ',' + std::to_string(r.shots) + '\n';
    }
    return csv;
}

std::vector<IrbRecord> parse_records_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaMismatch, "records file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRecordsHeader) {
        throw Error(ErrorCode::SchemaMismatch, "expected header '" + std::string(kRecordsHeader) + "'");
    }
    std::vector<IrbRecord> records;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::uint64_t fields[7];
        std::string_view rest = line;
        for (int k = 0; k < 7; ++k) {
            const auto comma = rest.find(',');
            if ((k < 6) == (comma == std::string_view::npos)) {
                throw Error(ErrorCode::SchemaMismatch, "row " + std::to_string(row) + " must have 7 fields");
            }
            const auto field = rest.substr(0, comma);
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), fields[k]);
            if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
                throw Error(ErrorCode::SchemaMismatch,
                            "row " + std::to_string(row) + ": '" + std::string(field) + "' is not a count");
            }
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        IrbRecord r;
        r.length = fields[0];
        r.counts = {fields[1], fields[2], fields[3], fields[4]};
        r.sequences = fields[5];
        r.shots = fields[6];
        records.push_back(r);
    }
    if (records.empty()) throw Error(ErrorCode::InsufficientData, "records file has no rows");
    return records;
}

struct Context {
    std::ostream& out;
    std::ostream& err;
};

void add_gate_option(CLI::App& cmd, std::string& gate) {
    cmd.add_option("--gate", gate,
                   "Gate name (identity, cnot, cz, swap, iswap, sqrt_swap, w_special, w_lambda:<l>, "
                   "canonical:<cx>,<cy>,<cz>) or path to a gate JSON file")
        ->required();
}

void add_noise_option(CLI::App& cmd, std::string& noise) {
    cmd.add_option("--noise", noise,
                   "Error channel as inline JSON or a JSON file. Composite stages act in list order, "
                   "first listed first")
        ->default_val(R"({"type":"identity"})");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, ec == std::errc{} ? ptr : buf};
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::IOFailure, "cannot open '" + tmp.string() + "' for writing");
        f << contents;
        f.flush();
        if (!f) throw Error(ErrorCode::IOFailure, "write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IOFailure, "cannot move output into '" + path + "'");
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partial interleaved randomized benchmarking of two-qubit gates", "twirlbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    Context ctx{out, err};
    std::function<void()> action;

    // invariants
    std::string inv_gate;
    double inv_threshold = kDefaultClassificationThreshold;
    auto* inv = app.add_subcommand("invariants", "Local invariants, M0 entries, spectrum and classification");
    add_gate_option(*inv, inv_gate);
    inv->add_option("--threshold", inv_threshold, "Classification distance in the (m1, m2) plane")
        ->capture_default_str();
    inv->callback([&] {
        action = [&] {
            const TwoQubitUnitary gate = resolve_gate(inv_gate);
            const LocalInvariants li = local_invariants(gate);
            const M0Entries e = m0_entries_from_invariants(li);
            const auto spectrum = m0_spectrum(e.m1, e.m2);
            const GateClassification cls = classify_entries(e, inv_threshold);
            json j = {
                {"version", kVersion},
                {"config", {{"command", "invariants"}, {"gate", gate_echo(inv_gate, gate)}, {"threshold", inv_threshold}}},
                {"G1", complex_json(li.g1)},
                {"G2", li.g2},
                {"abs_G1", li.abs_g1()},
                {"m1", e.m1},
                {"m2", e.m2},
                {"spectrum", spectrum},
                {"classification", std::string(to_string(cls.kind))},
                {"slow_eigenvalue_count", cls.slow_eigenvalue_count},
            };
            ctx.out << j.dump(2) << '\n';
        };
    });

    // scan
    std::uint64_t scan_samples = 10000;
    std::uint64_t scan_seed = 0;
    std::string scan_out, scan_svg_path;
    auto* scan = app.add_subcommand("scan", "Haar-random gates in the (m1, m2) plane with marker gates");
    scan->add_option("--samples", scan_samples, "Number of Haar samples")->check(CLI::PositiveNumber)->capture_default_str();
    scan->add_option("--seed", scan_seed, "RNG seed")->required();
    scan->add_option("--out", scan_out, "CSV output path (stdout if omitted)");
    scan->add_option("--svg", scan_svg_path, "Also write a scatter plot here");
    scan->callback([&] {
        action = [&] {
            const auto rows = scan_haar(scan_samples, scan_seed, threads_from_env());
            std::size_t violations = 0;
            for (const auto& r : rows) violations += region_check(r.m1, r.m2) ? 0 : 1;
            emit(scan_csv(rows), scan_out, ctx.out);
            if (!scan_svg_path.empty()) write_file_atomic(scan_svg_path, scan_svg(rows));
            json summary = {
                {"version", kVersion},
                {"config", {{"command", "scan"}, {"samples", scan_samples}, {"seed", scan_seed}}},
                {"rows", rows.size()},
                {"region_violations", violations},
            };
            if (!scan_out.empty()) {
                write_file_atomic(scan_out + ".meta.json", summary.dump(2) + '\n');
                ctx.out << summary.dump(2) << '\n';
            } else {
                ctx.err << summary.dump() << '\n';
            }
        };
    });

    // predict
    std::string pred_gate, pred_noise, pred_out;
    std::uint64_t pred_max = 64;
    auto* predict = app.add_subcommand("predict", "Markovian prediction f_n = M^n (1,1,1) and outcome probabilities");
    add_gate_option(*predict, pred_gate);
    add_noise_option(*predict, pred_noise);
    predict->add_option("--max-length", pred_max, "Longest sequence length")->check(CLI::PositiveNumber)->capture_default_str();
    predict->add_option("--out", pred_out, "CSV output path (stdout if omitted)");
    predict->callback([&] {
        action = [&] {
            const TwoQubitUnitary gate = resolve_gate(pred_gate);
            const NoiseSpec noise = load_noise(pred_noise);
            const IterationMatrix3 m = build_m_with_noise(gate, noise_to_ptm(noise));
            emit(predict_csv(m, pred_max), pred_out, ctx.out);
            if (!pred_out.empty()) {
                json meta = {{"version", kVersion},
                             {"config", {{"command", "predict"},
                                         {"gate", gate_echo(pred_gate, gate)},
                                         {"noise", json::parse(noise_spec_to_json(noise))},
                                         {"max_length", pred_max}}}};
                write_file_atomic(pred_out + ".meta.json", meta.dump(2) + '\n');
            }
        };
    });

    // simulate
    std::string sim_gate, sim_noise, sim_out;
    std::vector<std::uint64_t> sim_lengths{1, 2, 4, 8, 16, 32, 64};
    SequenceSpec sim_spec;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo interleaved sequences with shot sampling");
    add_gate_option(*simulate, sim_gate);
    add_noise_option(*simulate, sim_noise);
    simulate->add_option("--lengths", sim_lengths, "Comma-separated, strictly increasing")->delimiter(',')->capture_default_str();
    simulate->add_option("--sequences", sim_spec.sequences_per_length, "Random sequences per length")->capture_default_str();
    simulate->add_option("--shots", sim_spec.shots_per_sequence, "Shots per sequence")->capture_default_str();
    simulate->add_option("--seed", sim_spec.seed, "RNG seed")->required();
    simulate->add_option("--out", sim_out, "Records CSV path; metadata goes to <out>.meta.json");
    simulate->callback([&] {
        action = [&] {
            sim_spec.lengths = sim_lengths;
            const TwoQubitUnitary gate = resolve_gate(sim_gate);
            const NoiseSpec noise = load_noise(sim_noise);
            SimulationOptions opts;
            opts.threads = threads_from_env();
            const auto records = run_irb(gate, noise_to_ptm(noise), sim_spec, opts);
            emit(records_csv(records), sim_out, ctx.out);
            if (!sim_out.empty()) {
                json meta = {{"version", kVersion},
                             {"command", "simulate"},
                             {"gate", gate_echo(sim_gate, gate)},
                             {"noise", json::parse(noise_spec_to_json(noise))},
                             {"seed", sim_spec.seed},
                             {"lengths", sim_spec.lengths},
                             {"sequences", sim_spec.sequences_per_length},
                             {"shots", sim_spec.shots_per_sequence}};
                write_file_atomic(sim_out + ".meta.json", meta.dump(2) + '\n');
            }
        };
    });

    // fit
    std::string fit_records, fit_mode = "auto", fit_gate, fit_out;
    double fit_threshold = kDefaultClassificationThreshold;
    auto* fit = app.add_subcommand("fit", "Decay-factor extraction from a records CSV");
    fit->add_option("--records", fit_records, "Records CSV in the simulate schema")->required();
    fit->add_option("--mode", fit_mode, "auto, single, identity or swap")
        ->check(CLI::IsMember({"auto", "single", "identity", "swap"}))
        ->capture_default_str();
    fit->add_option("--gate", fit_gate, "Gate used to pick the mode in auto (default: the records' metadata)");
    fit->add_option("--threshold", fit_threshold, "Classification distance for auto mode")->capture_default_str();
    fit->add_option("--out", fit_out, "Report path (stdout if omitted)");
    fit->callback([&] {
        action = [&] {
            const auto records = parse_records_csv(read_file(fit_records));
            std::string mode = fit_mode;
            std::string selection = "caller";
            std::optional<GateKind> kind;
            std::string gate_source = fit_gate;
            if (!gate_source.empty()) {
                kind = classify_gate(local_invariants(resolve_gate(gate_source)), fit_threshold).kind;
            } else {
                std::error_code ec;
                const std::string meta_path = fit_records + ".meta.json";
                if (std::filesystem::is_regular_file(meta_path, ec)) {
                    const json meta = json::parse(read_file(meta_path), nullptr, false);
                    if (meta.is_object() && meta.contains("gate") && meta["gate"].is_object() &&
                        meta["gate"].contains("matrix")) {
                        gate_source = meta_path;
                        kind = classify_gate(local_invariants(parse_gate_json(meta["gate"].dump())), fit_threshold).kind;
                    }
                }
            }
            const std::string classification = kind ? std::string(to_string(*kind)) : "unknown";
            if (mode == "auto") {
                if (!kind) {
                    mode = "single";
                    selection = "auto: no gate information, defaulted to single";
                } else {
                    mode = *kind == GateKind::NearIdentityFamily ? "identity"
                           : *kind == GateKind::NearSwapFamily   ? "swap"
                                                                 : "single";
                    selection = "auto: " + classification + " from " + gate_source;
                }
            }
            const DecayFit result = mode == "identity" ? fit_identity_case(std::span<const IrbRecord>(records))
                                    : mode == "swap"   ? fit_swap_case(std::span<const IrbRecord>(records))
                                                       : fit_single_exponential(std::span<const IrbRecord>(records));
            json report = json::parse(fit_report_json(result, classification, selection));
            report["version"] = kVersion;
            report["config"] = {{"command", "fit"}, {"records", fit_records}, {"mode", fit_mode},
                                {"gate", fit_gate}, {"threshold", fit_threshold}};
            emit(report.dump(2), fit_out, ctx.out);
        };
    });

    // compare
    std::string cmp_gate, cmp_noise, cmp_out;
    double cmp_threshold = kDefaultClassificationThreshold;
    auto* compare = app.add_subcommand("compare", "Partial-RB slow eigenvalue against full-RB and perturbative values");
    add_gate_option(*compare, cmp_gate);
    add_noise_option(*compare, cmp_noise);
    compare->add_option("--threshold", cmp_threshold, "Classification distance")->capture_default_str();
    compare->add_option("--out", cmp_out, "Report path (stdout if omitted)");
    compare->callback([&] {
        action = [&] {
            const TwoQubitUnitary gate = resolve_gate(cmp_gate);
            const NoiseSpec noise = load_noise(cmp_noise);
            const ComparisonReport rep = compare_partial_vs_full(gate, noise_to_ptm(noise), cmp_threshold);
            json report = json::parse(comparison_report_json(rep));
            report["version"] = kVersion;
            report["config"] = {{"command", "compare"},
                                {"gate", gate_echo(cmp_gate, gate)},
                                {"noise", json::parse(noise_spec_to_json(noise))},
                                {"threshold", cmp_threshold}};
            emit(report.dump(2), cmp_out, ctx.out);
        };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUserError;
    }
    if (!action) return kExitOk;
    try {
        action();
    } catch (const Error& e) {
        err << "twirlbench: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const json::exception& e) {
        err << "twirlbench: SchemaMismatch: " << e.what() << '\n';
        return kExitUserError;
    } catch (const std::exception& e) {
        err << "twirlbench: " << e.what() << '\n';
        return kExitNumericalFailure;
    }
    return kExitOk;
}

}  // namespace twirlbench::cli
