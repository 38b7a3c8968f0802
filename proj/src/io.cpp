#include "nwl/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "nwl/errors.hpp"

namespace nwl {

using nlohmann::json;

namespace {
void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw validation_error(std::string(where) + ": unknown key '" + key + "'");
        }
    }
}
} // namespace

json symbol_to_json(const SymbolSpec& s) {
    json factors = json::array();
    for (const auto& f : s.factors()) {
        factors.push_back({{"a", f.a}, {"e", f.e}});
    }
    return {{"prefactor", s.prefactor()}, {"factors", factors}};
}

SymbolSpec symbol_from_json(const json& j) {
    if (!j.is_object()) {
        throw validation_error("symbol: expected a JSON object");
    }
    reject_unknown_keys(j, {"prefactor", "factors"}, "symbol");
    const double prefactor = j.value("prefactor", 1.0);
    std::vector<SymbolFactor> factors;
    if (j.contains("factors")) {
        for (const auto& f : j.at("factors")) {
            reject_unknown_keys(f, {"a", "e"}, "symbol factor");
            factors.push_back({f.at("a").get<double>(), f.at("e").get<double>()});
        }
    }
    return SymbolSpec(prefactor, std::move(factors));
}

json model_to_json(const PDEModel& m) {
    return {{"l", symbol_to_json(m.l_spec())},
            {"b", symbol_to_json(m.b_spec())},
            {"p", m.p()},
            {"sigma", m.sigma()}};
}

PDEModel model_from_json(const json& j) {
    if (!j.is_object()) {
        throw validation_error("model: expected a JSON object");
    }
    reject_unknown_keys(j, {"l", "b", "p", "sigma"}, "model");
    for (const char* key : {"l", "b", "p", "sigma"}) {
        if (!j.contains(key)) {
            throw validation_error(std::string("model: missing key '") + key + "'");
        }
    }
    return build_model(symbol_from_json(j.at("l")), symbol_from_json(j.at("b")),
                       j.at("p").get<double>(), j.at("sigma").get<int>());
}

std::string model_hash(const PDEModel& m) {
    const std::string canon = model_to_json(m).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns) {
    if (header.size() != columns.size()) {
        throw validation_error("write_csv: header/column count mismatch");
    }
    std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (const auto* col : columns) {
        if (col->size() != rows) {
            throw validation_error("write_csv: ragged columns");
        }
    }
    std::ofstream out(path);
    if (!out) {
        throw validation_error("write_csv: cannot open " + path.string());
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i];
    }
    out << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << (i ? "," : "") << format_double((*columns[i])[r]);
        }
        out << "\n";
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw validation_error("write_json: cannot open " + path.string());
    }
    out << j.dump(2) << "\n";
}

void write_wave_outputs(const std::filesystem::path& dir, const TravelingWave& wave,
                        const PDEModel& model) {
    std::filesystem::create_directories(dir);
    const Grid& g = wave.profile.grid();
    const std::vector<double> x = g.nodes();
    write_csv(dir / "wave.csv", {"x", "phi"}, {&x, &wave.profile.values()});
    json j = {{"version", kVersionString},
              {"model", model_to_json(model)},
              {"model_hash", model_hash(model)},
              {"c", wave.c},
              {"grid", {{"n", g.n()}, {"length", g.length()}}},
              {"converged", wave.converged},
              {"diagnostics",
               {{"residual_l2", wave.diag.residual_l2},
                {"iterations", wave.diag.iterations},
                {"stabilizing_factor_final", wave.diag.stabilizing_factor_final},
                {"Ic", wave.diag.Ic},
                {"Q", wave.diag.Q},
                {"m1", wave.diag.m1},
                {"d", wave.diag.d},
                {"tail_mass", wave.diag.tail_mass}}}};
    write_json(dir / "wave.json", j);
}

json trajectory_manifest(const Trajectory& traj, const PDEModel& model) {
    std::string status;
    switch (traj.status) {
        case RunStatus::Completed: status = "Completed"; break;
        case RunStatus::BlewUp: status = "BlewUp"; break;
        case RunStatus::Aborted: status = "Aborted"; break;
    }
    json j = {{"version", kVersionString},
              {"model", model_to_json(model)},
              {"model_hash", model_hash(model)},
              {"grid", {{"n", traj.grid.n()}, {"length", traj.grid.length()}}},
              {"dt", traj.dt},
              {"t_end", traj.series.t.empty() ? 0.0 : traj.series.t.back()},
              {"status", status},
              {"t_star", traj.t_star},
              {"steps_recorded", traj.series.t.size()},
              {"snapshots", traj.snapshots.size()}};
    if (!traj.abort_reason.empty()) j["abort_reason"] = traj.abort_reason;
    return j;
}

void write_trajectory_outputs(const std::filesystem::path& dir, const Trajectory& traj,
                              bool write_snapshots) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> header = {"t", "E", "M", "x_norm", "sup_norm"};
    std::vector<const std::vector<double>*> cols = {&traj.series.t, &traj.series.E,
                                                    &traj.series.M, &traj.series.x_norm,
                                                    &traj.series.sup_norm};
    if (!traj.series.Ic.empty()) {
        header.insert(header.end(), {"Ic", "Q"});
        cols.insert(cols.end(), {&traj.series.Ic, &traj.series.Q});
    }
    if (!traj.series.levine_H.empty()) {
        header.push_back("H");
        cols.push_back(&traj.series.levine_H);
    }
    write_csv(dir / "diagnostics.csv", header, cols);

    if (write_snapshots && !traj.snapshots.empty()) {
        const std::filesystem::path snap_dir = dir / "snapshots";
        std::filesystem::create_directories(snap_dir);
        const std::vector<double> x = traj.grid.nodes();
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%06zu.csv", i);
            write_csv(snap_dir / name, {"x", "u", "w"},
                      {&x, &traj.snapshots[i].u, &traj.snapshots[i].w});
        }
    }
}

void write_dc_curve(const std::filesystem::path& path, const DcCurve& curve) {
    std::ofstream out(path);
    if (!out) {
        throw validation_error("write_dc_curve: cannot open " + path.string());
    }
    out << "c,m1,d,d1,d1_from_M,d2,class\n";
    for (const auto& s : curve.samples) {
        out << format_double(s.c) << "," << format_double(s.m1) << "," << format_double(s.d)
            << "," << format_double(s.d_prime) << "," << format_double(s.d_prime_from_M) << ","
            << format_double(s.d_second) << "," << convexity_name(s.convexity) << "\n";
    }
}

json stability_report_json(const StabilityReport& report, const PDEModel& model) {
    return {{"version", kVersionString},
            {"model_hash", model_hash(model)},
            {"c", report.c},
            {"lambda", report.perturbation.lambda},
            {"epsilon", report.perturbation.epsilon},
            {"seed", report.perturbation.seed},
            {"t_end", report.t_end},
            {"d_c", report.d_c},
            {"wave_x_norm", report.wave_x_norm},
            {"initial_distance", report.initial_distance},
            {"max_distance", report.max_distance},
            {"ratio", report.ratio},
            {"status", outcome_name(report.outcome)},
            {"t_star", report.t_star},
            {"sigma_minus_initial",
             {report.sigma_minus_initial_1, report.sigma_minus_initial_2}},
            {"sigma_minus_persisted", report.sigma_minus_persisted},
            {"lemma53_max_violation", report.lemma53_max_violation}};
}

json blowup_report_json(const BlowupReport& report, const PDEModel& model) {
    return {{"version", kVersionString},
            {"model_hash", model_hash(model)},
            {"c", report.c},
            {"d_c", report.d_c},
            {"filter_distance", report.filter_distance},
            {"energy_initial", report.energy_initial},
            {"ecm_initial", report.ecm_initial},
            {"two_Ic_minus_Q_initial", report.two_Ic_minus_Q_initial},
            {"preconditions_ok", report.preconditions_ok},
            {"status", outcome_name(report.outcome)},
            {"t_star", report.t_star},
            {"sigma_minus_persisted", report.sigma_minus_persisted},
            {"lemma53_max_violation", report.lemma53_max_violation}};
}

void write_levine_csv(const std::filesystem::path& path, const LevineSeries& series) {
    write_csv(path, {"t", "H", "H1", "H2", "condition"},
              {&series.t, &series.H, &series.H_prime, &series.H_second, &series.condition});
}

} // namespace nwl
