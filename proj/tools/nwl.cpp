// Command-line laboratory for nonlocal nonlinear wave equations
// u_tt - L u_xx = B(g(u))_xx with g(u) = sigma |u|^{p-1} u.
//
// Commands: wave | evolve | dc | stability | blowup | exact.
// All runs are driven by a JSON config (--config), with --set dot-path
// overrides; outputs are deterministic CSV/JSON in the run directory.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nwl/errors.hpp"
#include "nwl/evolution.hpp"
#include "nwl/io.hpp"
#include "nwl/model.hpp"
#include "nwl/stability.hpp"
#include "nwl/waves.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Cli {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::size_t workers = 0;
};

json parse_scalar(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception&) {
        return json(text); // plain string values need no quoting on the CLI
    }
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw nwl::validation_error("--set expects key=value, got '" + assignment + "'");
    }
    const std::string path = assignment.substr(0, eq);
    const json value = parse_scalar(assignment.substr(eq + 1));
    json* node = &config;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) {
            throw nwl::validation_error("--set: empty key segment in '" + path + "'");
        }
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

json load_config(const Cli& cli) {
    json config = json::object();
    if (!cli.config_path.empty()) {
        std::ifstream in(cli.config_path);
        if (!in) {
            throw nwl::validation_error("cannot open config file " + cli.config_path);
        }
        try {
            in >> config;
        } catch (const json::exception& e) {
            throw nwl::validation_error(std::string("config parse error: ") + e.what());
        }
    }
    for (const auto& o : cli.overrides) apply_override(config, o);
    return config;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    if (j.is_null()) return;
    if (!j.is_object()) {
        throw nwl::validation_error(where + ": expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw nwl::validation_error(where + ": unknown key '" + key + "'");
        }
    }
}

void validate_top_level(const json& config) {
    reject_unknown(config,
                   {"model", "grid", "seed", "output_dir", "wave", "evolve", "dc", "stability",
                    "blowup", "exact"},
                   "config");
}

nwl::Grid grid_from_config(const json& config) {
    if (!config.contains("grid")) {
        throw nwl::validation_error("config: missing 'grid' block");
    }
    const json& g = config.at("grid");
    reject_unknown(g, {"n", "length"}, "grid");
    return nwl::make_grid(g.at("n").get<std::size_t>(), g.at("length").get<double>());
}

nwl::PDEModel model_from_config(const json& config) {
    if (!config.contains("model")) {
        throw nwl::validation_error("config: missing 'model' block");
    }
    return nwl::model_from_json(config.at("model"));
}

fs::path resolve_out_dir(const Cli& cli, const json& config, const std::string& command) {
    if (!cli.out_dir.empty()) return cli.out_dir;
    if (config.contains("output_dir")) return config.at("output_dir").get<std::string>();
    if (const char* env = std::getenv("NONLOCAL_WAVE_LAB_OUT")) {
        return fs::path(env) / command;
    }
    return fs::path("runs") / command;
}

void write_manifest(const fs::path& dir, const json& config, const std::string& command) {
    json manifest = {{"version", nwl::kVersionString}, {"command", command}, {"config", config}};
    nwl::write_json(dir / "manifest.json", manifest);
}

nwl::WaveSolverOptions wave_opts_from_config(const json& config) {
    nwl::WaveSolverOptions opts;
    if (config.contains("wave")) {
        const json& w = config.at("wave");
        reject_unknown(w, {"c", "tol", "max_iter"}, "wave");
        opts.tol = w.value("tol", opts.tol);
        opts.max_iter = w.value("max_iter", opts.max_iter);
    }
    return opts;
}

double wave_velocity_from_config(const json& config) {
    if (!config.contains("wave") || !config.at("wave").contains("c")) {
        throw nwl::validation_error("config: missing wave.c");
    }
    return config.at("wave").at("c").get<double>();
}

int cmd_wave(const json& config, const fs::path& out) {
    const nwl::PDEModel model = model_from_config(config);
    const nwl::Grid grid = grid_from_config(config);
    const double c = wave_velocity_from_config(config);
    const nwl::TravelingWave wave =
        nwl::solve_wave_fixed_point(model, c, grid, wave_opts_from_config(config));
    fs::create_directories(out);
    nwl::write_wave_outputs(out, wave, model);
    if (wave.diag.tail_mass > 1.0e-10) {
        std::cerr << "warning: profile tail mass " << wave.diag.tail_mass
                  << " exceeds 1e-10; consider a larger box\n";
    }
    write_manifest(out, config, "wave");
    return 0;
}

int cmd_exact(const json& config, const fs::path& out) {
    if (!config.contains("exact")) {
        throw nwl::validation_error("config: missing 'exact' block");
    }
    const json& e = config.at("exact");
    reject_unknown(e, {"family", "p", "c", "a1", "a2", "regime"}, "exact");
    const std::string family = e.at("family").get<std::string>();
    const double p = e.at("p").get<double>();
    const double c = e.at("c").get<double>();
    const nwl::Grid grid = grid_from_config(config);

    std::optional<nwl::TravelingWave> wave;
    std::optional<nwl::PDEModel> model;
    if (family == "boussinesq") {
        wave = nwl::exact_boussinesq_wave(p, c, grid);
        model = nwl::boussinesq_model(p);
    } else if (family == "improved_boussinesq") {
        wave = nwl::exact_improved_boussinesq_wave(p, c, grid);
        model = nwl::improved_boussinesq_model(p);
    } else if (family == "double_dispersion") {
        const double a1 = e.at("a1").get<double>();
        const double a2 = e.at("a2").get<double>();
        const int regime_id = e.value("regime", 1);
        if (regime_id != 1 && regime_id != 2) {
            throw nwl::validation_error("exact: regime must be 1 or 2");
        }
        const nwl::Regime regime = regime_id == 1 ? nwl::Regime::A : nwl::Regime::B;
        wave = nwl::exact_double_dispersion_wave(p, c, a1, a2, grid, regime);
        model = nwl::double_dispersion_model(p, a1, a2, regime);
    } else {
        throw nwl::validation_error(
            "exact: family must be boussinesq | improved_boussinesq | double_dispersion");
    }
    fs::create_directories(out);
    nwl::write_wave_outputs(out, *wave, *model);
    write_manifest(out, config, "exact");
    return 0;
}

int cmd_evolve(const json& config, const fs::path& out) {
    const nwl::PDEModel model = model_from_config(config);
    const nwl::Grid grid = grid_from_config(config);
    if (!config.contains("evolve")) {
        throw nwl::validation_error("config: missing 'evolve' block");
    }
    const json& ev = config.at("evolve");
    reject_unknown(ev, {"dt", "t_end", "snapshot_stride", "blowup_factor", "dealias", "lambda"},
                   "evolve");
    const double c = wave_velocity_from_config(config);
    const nwl::TravelingWave wave =
        nwl::solve_wave_fixed_point(model, c, grid, wave_opts_from_config(config));
    const double lambda = ev.value("lambda", 1.0);

    std::vector<double> u0(grid.n()), w0(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) {
        u0[i] = lambda * wave.profile[i];
        w0[i] = -c * lambda * wave.profile[i];
    }
    nwl::SystemState state0(nwl::GridFunction(grid, std::move(u0)),
                            nwl::GridFunction(grid, std::move(w0)), 0.0);

    double dt = ev.value("dt", 0.0);
    if (dt <= 0.0) dt = nwl::stable_step_bounds(grid, model, state0.u).suggested;
    nwl::EvolveOptions opts;
    opts.snapshot_stride = ev.value("snapshot_stride", std::size_t{0});
    opts.blowup_factor = ev.value("blowup_factor", 1.0e6);
    opts.dealias = ev.value("dealias", true);
    opts.diag_c = c;

    const nwl::Trajectory traj =
        nwl::evolve(state0, model, dt, ev.at("t_end").get<double>(), opts);
    fs::create_directories(out);
    nwl::write_trajectory_outputs(out, traj, opts.snapshot_stride > 0);
    json manifest = nwl::trajectory_manifest(traj, model);
    manifest["command"] = "evolve";
    manifest["config"] = config;
    nwl::write_json(out / "manifest.json", manifest);
    return 0;
}

int cmd_dc(const json& config, const fs::path& out, std::size_t workers) {
    const nwl::PDEModel model = model_from_config(config);
    const nwl::Grid grid = grid_from_config(config);
    if (!config.contains("dc")) {
        throw nwl::validation_error("config: missing 'dc' block");
    }
    const json& dc = config.at("dc");
    reject_unknown(dc, {"c_min", "c_max", "c_step", "tol", "max_iter"}, "dc");
    nwl::DcCurveOptions opts;
    opts.workers = workers;
    opts.solver.tol = dc.value("tol", opts.solver.tol);
    opts.solver.max_iter = dc.value("max_iter", opts.solver.max_iter);
    const auto c_values = nwl::uniform_c_grid(dc.at("c_min").get<double>(),
                                              dc.at("c_max").get<double>(),
                                              dc.at("c_step").get<double>());
    const nwl::DcCurve curve = nwl::dc_curve(model, c_values, grid, opts);
    fs::create_directories(out);
    nwl::write_dc_curve(out / "dc_curve.csv", curve);
    write_manifest(out, config, "dc");
    return 0;
}

nwl::StabilityOptions stability_opts_from_json(const json& st) {
    nwl::StabilityOptions opts;
    opts.t_end = st.value("t_end", opts.t_end);
    opts.dt = st.value("dt", opts.dt);
    opts.snapshot_stride = st.value("snapshot_stride", opts.snapshot_stride);
    opts.stay_close_ratio = st.value("stay_close_ratio", opts.stay_close_ratio);
    opts.blowup_factor = st.value("blowup_factor", opts.blowup_factor);
    return opts;
}

int cmd_stability(const json& config, const fs::path& out, std::size_t workers,
                  std::uint64_t seed) {
    const nwl::PDEModel model = model_from_config(config);
    const nwl::Grid grid = grid_from_config(config);
    if (!config.contains("stability")) {
        throw nwl::validation_error("config: missing 'stability' block");
    }
    const json& st = config.at("stability");
    reject_unknown(st,
                   {"c", "lambda", "epsilon", "h", "t_end", "dt", "snapshot_stride",
                    "stay_close_ratio", "blowup_factor"},
                   "stability");
    const nwl::StabilityOptions opts = stability_opts_from_json(st);

    auto as_list = [](const json& v) {
        std::vector<double> out_list;
        if (v.is_array()) {
            for (const auto& x : v) out_list.push_back(x.get<double>());
        } else {
            out_list.push_back(v.get<double>());
        }
        return out_list;
    };
    const std::vector<double> c_list = as_list(st.at("c"));
    const std::vector<double> lambda_list = as_list(st.value("lambda", json(1.0)));
    const double epsilon = st.value("epsilon", 0.0);
    const double h = st.value("h", 0.0);

    fs::create_directories(out);
    struct Cell {
        double c, lambda;
        std::string status;
        double ratio, t_star, d, m1;
    };
    std::vector<Cell> cells(c_list.size() * lambda_list.size());

    std::vector<std::size_t> indices(cells.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    // cells are independent; report files are written after the parallel phase
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::atomic<std::size_t> next{0};
    auto worker_body = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const double c = c_list[i / lambda_list.size()];
            const double lambda = lambda_list[i % lambda_list.size()];
            try {
                nwl::Perturbation pert;
                pert.lambda = lambda;
                pert.epsilon = epsilon;
                pert.seed = seed;
                pert.highpass_h = h;
                const nwl::StabilityReport rep =
                    nwl::stability_experiment(model, c, pert, grid, opts);
                const nwl::TravelingWave wave = nwl::solve_wave_fixed_point(model, c, grid);
                cells[i] = {c,
                            lambda,
                            nwl::outcome_name(rep.outcome),
                            rep.ratio,
                            rep.t_star,
                            rep.d_c,
                            nwl::m1_from_wave(wave, model)};
                if (cells.size() == 1) {
                    nwl::write_json(out / "stability.json",
                                    nwl::stability_report_json(rep, model));
                    nwl::write_csv(out / "orbital_distance.csv", {"t", "distance"},
                                   {&rep.distance_t, &rep.distance});
                    nwl::write_trajectory_outputs(out, rep.trajectory, false);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::size_t n_workers = workers == 0 ? std::thread::hardware_concurrency() : workers;
    n_workers = std::max<std::size_t>(1, std::min(n_workers, cells.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker_body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    if (cells.size() > 1) {
        std::ofstream sweep(out / "sweep.csv");
        sweep << "model_hash,c,lambda,status,ratio,t_star,d,m1\n";
        for (const auto& cell : cells) {
            sweep << nwl::model_hash(model) << "," << nwl::format_double(cell.c) << ","
                  << nwl::format_double(cell.lambda) << "," << cell.status << ","
                  << nwl::format_double(cell.ratio) << "," << nwl::format_double(cell.t_star)
                  << "," << nwl::format_double(cell.d) << "," << nwl::format_double(cell.m1)
                  << "\n";
        }
    }
    write_manifest(out, config, "stability");
    return 0;
}

int cmd_blowup(const json& config, const fs::path& out) {
    const nwl::PDEModel model = model_from_config(config);
    const nwl::Grid grid = grid_from_config(config);
    if (!config.contains("blowup")) {
        throw nwl::validation_error("config: missing 'blowup' block");
    }
    const json& bl = config.at("blowup");
    reject_unknown(bl, {"c", "lambda", "h", "t_end", "dt", "blowup_factor"}, "blowup");
    nwl::BlowupOptions opts;
    opts.lambda = bl.value("lambda", opts.lambda);
    opts.h = bl.value("h", opts.h);
    opts.t_end = bl.value("t_end", opts.t_end);
    opts.dt = bl.value("dt", opts.dt);
    opts.blowup_factor = bl.value("blowup_factor", opts.blowup_factor);

    const nwl::BlowupReport report =
        nwl::blowup_experiment(model, bl.at("c").get<double>(), grid, opts);
    fs::create_directories(out);
    nwl::write_json(out / "blowup.json", nwl::blowup_report_json(report, model));
    nwl::write_trajectory_outputs(out, report.trajectory, false);
    nwl::write_levine_csv(out / "levine.csv", report.levine);
    write_manifest(out, config, "blowup");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal nonlinear wave lab"};
    app.require_subcommand(1);

    Cli cli;
    app.add_option("--config", cli.config_path, "JSON config file");
    app.add_option("--out", cli.out_dir, "output directory (overrides config)");
    app.add_option("--set", cli.overrides, "dot-path config override, key=value")
        ->take_all();
    app.add_option("--workers", cli.workers, "worker thread count for sweeps");

    const std::vector<std::string> commands = {"wave", "evolve", "dc",
                                               "stability", "blowup", "exact"};
    for (const auto& name : commands) app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const json config = load_config(cli);
        validate_top_level(config);
        const fs::path out = resolve_out_dir(cli, config, command);
        const std::uint64_t seed = config.value("seed", std::uint64_t{0});

        if (command == "wave") return cmd_wave(config, out);
        if (command == "evolve") return cmd_evolve(config, out);
        if (command == "dc") return cmd_dc(config, out, cli.workers);
        if (command == "stability") return cmd_stability(config, out, cli.workers, seed);
        if (command == "blowup") return cmd_blowup(config, out);
        if (command == "exact") return cmd_exact(config, out);
        throw nwl::validation_error("unknown command " + command);
    } catch (const nwl::validation_error& e) {
        std::cerr << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    } catch (const nwl::numerical_error& e) {
        std::cerr << json{{"error", {{"type", "numerical"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 3;
    }
}
