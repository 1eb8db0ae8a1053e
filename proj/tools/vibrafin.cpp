// vibrafin command-line tool.
//
// Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "vibrafin/server/ws_server.hpp"
#include "vibrafin/vibrafin.hpp"

namespace fs = std::filesystem;
using namespace vibrafin;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::string params;
    std::string out;
    std::string format = "text";
};

io::ToolkitConfig load(const Common& c) {
    io::ToolkitConfig cfg = c.config.empty() ? io::config_from_json(json::object()) : io::load_config(c.config);
    if (!c.params.empty()) io::apply_params(cfg, io::load_params(c.params));
    return cfg;
}

// Output goes to --out when given, else stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw ConfigurationError("out", "cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

// "10mm", "200um", "0.01m", "2.5" (unit defaults to `fallback_scale`).
double parse_quantity(const std::string& text, double fallback_scale) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ValidationError("value", "cannot parse '" + text + "'");
    }
    const std::string unit = text.substr(used);
    if (unit.empty()) return v * fallback_scale;
    if (unit == "m") return v;
    if (unit == "mm") return v * 1e-3;
    if (unit == "um") return v * 1e-6;
    if (unit == "V" || unit == "v" || unit == "Hz" || unit == "hz") return v;
    throw ValidationError("value", "unknown unit '" + unit + "' in '" + text + "'");
}

std::string fmt(double v, int digits = 6) { return csv::format(v, digits); }

void print_kv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& rows, const std::string& format) {
    if (format == "csv") {
        std::vector<std::string> keys, values;
        for (const auto& [k, v] : rows) keys.push_back(k), values.push_back(v);
        csv::write_row(os, keys);
        csv::write_row(os, values);
    } else {
        std::size_t w = 0;
        for (const auto& r : rows) w = std::max(w, r.first.size());
        for (const auto& [k, v] : rows) os << k << std::string(w - k.size() + 2, ' ') << v << '\n';
    }
}

void warn_uncalibrated(const io::ToolkitConfig& cfg) {
    if (!cfg.uncalibrated.empty())
        std::cerr << "note: " << cfg.uncalibrated.size()
                  << " parameters use uncalibrated defaults (pass --params for the calibrated set)\n";
}

// ---------------------------------------------------------------------------

int cmd_modal(const Common& c) {
    const auto cfg = load(c);
    const auto& b = cfg.bundle;
    const auto model = modal::build_reduced_model(b.rigid, b.fin, b.fluid, b.modal);
    const auto nf = modal::natural_frequencies(model);
    const auto chain = modal::assembly_frequencies(model);
    Output out(c.out);
    print_kv(out.stream(),
             {{"f1_hz", fmt(nf.f1_hz)},
              {"f2_hz", fmt(nf.f2_hz)},
              {"mode_axis", modal::to_string(nf.axis1)},
              {"gap_ratio", fmt(nf.gap_ratio())},
              {"fin_f1_vacuum_hz", fmt(modal::fin_first_frequency(b.fin, std::nullopt, b.modal))},
              {"fin_f1_water_hz", fmt(modal::fin_first_frequency(b.fin, b.fluid, b.modal))},
              {"assembly_f1_hz", fmt(chain.f1_hz)},
              {"assembly_f2_hz", fmt(chain.f2_hz)}},
             c.format);
    return 0;
}

int cmd_sweep(const Common& c, const std::string& axis_name, const std::string& from, const std::string& to,
              int steps) {
    const auto cfg = load(c);
    modal::SweepAxis axis;
    double scale = 1e-3;
    if (axis_name == "rod-length") {
        axis = modal::SweepAxis::RodLength;
    } else if (axis_name == "aspect-ratio") {
        axis = modal::SweepAxis::AspectRatio;
        scale = 1.0;
    } else if (axis_name == "fin-length") {
        axis = modal::SweepAxis::FinLength;
    } else {
        throw ValidationError("axis", "must be rod-length, aspect-ratio or fin-length");
    }
    if (steps < 1) throw ValidationError("steps", "must be at least 1");
    const double a = parse_quantity(from, scale), b = parse_quantity(to, scale);
    modal::GridAxis g{axis, {}};
    for (int i = 0; i < steps; ++i) g.values.push_back(steps == 1 ? a : a + (b - a) * i / (steps - 1));
    modal::SweepBase base{cfg.bundle.rigid, cfg.bundle.fin, cfg.bundle.fluid, cfg.bundle.modal};
    const auto table = modal::modal_sweep({g}, base);

    Output out(c.out);
    const double col_scale = axis == modal::SweepAxis::AspectRatio ? 1.0 : 1e3;
    csv::write_row(out.stream(), {modal::column_name(axis), "f1_hz", "f2_hz", "gap_ratio"});
    for (const auto& row : table.rows)
        csv::write_row(out.stream(), {csv::format(row.coordinates[0] * col_scale), csv::format(row.f1_hz),
                                      csv::format(row.f2_hz), csv::format(row.gap_ratio)});
    return 0;
}

int cmd_thrust(const Common& c, double from, double to, double step) {
    const auto cfg = load(c);
    warn_uncalibrated(cfg);
    const auto& b = cfg.bundle;
    if (!(step > 0.0)) throw ValidationError("step", "must be positive");
    Output out(c.out);
    csv::write_row(out.stream(), {"voltage_v", "freq_hz", "a_x1_m", "a_x2_m", "a_x3_m", "u_mps", "thrust_n"});
    const int n = static_cast<int>(std::floor((to - from) / step + 1e-9));
    for (int i = 0; i <= n; ++i) {
        const double v = from + step * i;
        const auto p = thrust::thrust_point(v, b.rigid, b.fin, b.fluid, b.motor, b.streaming, b.modal);
        csv::write_row(out.stream(), {csv::format(v), csv::format(p.frequency_hz), csv::format(p.amplitudes.a_x1_m),
                                      csv::format(p.amplitudes.a_x2_m), csv::format(p.amplitudes.a_x3_m),
                                      csv::format(p.velocity_m_s), csv::format(p.thrust_n)});
    }
    return 0;
}

int cmd_calibrate(const Common& c, const std::string& datasets_dir, const std::vector<std::string>& stages_wanted,
                  int max_iter) {
    auto cfg = load(c);
    const auto datasets = io::load_datasets(datasets_dir);
    calib::CalibrationOptions opts;
    if (max_iter > 0) opts.nelder_mead.max_iter = max_iter;

    io::ParamsFile params;
    if (!c.params.empty()) params = io::load_params(c.params);
    json stage_reports = json::object();
    auto set_param = [&](const std::string& name, double value) {
        for (auto& [n, v] : params.parameters)
            if (n == name) {
                v = value;
                return;
            }
        params.parameters.emplace_back(name, value);
    };

    for (const auto& stage : calib::default_stages()) {
        if (!stages_wanted.empty() &&
            std::find(stages_wanted.begin(), stages_wanted.end(), stage.name) == stages_wanted.end())
            continue;
        std::cerr << "stage " << stage.name << ": " << stage.free.size() << " free parameters\n";
        const auto t0 = std::chrono::steady_clock::now();
        const auto res = calib::fit_model_coefficients(calib::select(datasets, stage.datasets), stage.free,
                                                       cfg.bundle, opts);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cfg.bundle = res.bundle;
        for (std::size_t i = 0; i < res.fit.names.size(); ++i) set_param(res.fit.names[i], res.fit.parameters[i]);
        stage_reports[stage.name] = io::fit_report_json(res.fit);
        std::cerr << "  objective " << fmt(res.fit.objective) << " after " << res.fit.evaluations
                  << " evaluations (" << fmt(secs, 3) << " s)\n";
        for (const auto& e : res.fit.record_errors)
            if (e.dataset != "thrust_ordering")
                std::cerr << "  " << e.label << ": predicted " << fmt(e.predicted) << ", target " << fmt(e.target)
                          << ", rel err " << fmt(e.relative_error, 3) << "\n";
    }

    // pin the absolute thrust level through the caudal-fin force balance
    calib::tie_streaming_to_caudal(cfg.bundle, cfg.bundle.motor.rated_voltage_v, cfg.bundle.fin.fin_length_m);
    set_param("streaming.c_u_m2", cfg.bundle.streaming.c_u_m2);

    params.fit = {{"stages", stage_reports},
                  {"streaming_tie",
                   {{"voltage_v", cfg.bundle.motor.rated_voltage_v},
                    {"fin_length_m", cfg.bundle.fin.fin_length_m},
                    {"thrust_n", cfg.bundle.body.fin(loco::FinRole::Caudal).thrust_magnitude_n}}}};
    const auto text = io::params_to_json(params).dump(2) + "\n";
    if (c.out.empty()) {
        std::cout << text;
    } else {
        io::write_text(c.out, text);
    }
    return 0;
}

int cmd_optimize(const Common& c, const std::string& what, const std::string& lower, const std::string& upper,
                 double voltage, double target_hz) {
    const auto cfg = load(c);
    warn_uncalibrated(cfg);
    Output out(c.out);
    const double lo = parse_quantity(lower, 1e-3), hi = parse_quantity(upper, 1e-3);
    if (what == "rod-length") {
        const auto r = design::optimize_rod_length(lo, hi, cfg.bundle, target_hz);
        print_kv(out.stream(),
                 {{"rod_length_mm", fmt(r.rod_length_m * 1e3)},
                  {"f1_hz", fmt(r.f1_hz)},
                  {"mismatch", fmt(r.mismatch)},
                  {"at_boundary", r.at_boundary ? "true" : "false"},
                  {"method", design::to_string(r.method)},
                  {"probes", std::to_string(r.probes.size())}},
                 c.format);
    } else if (what == "fin-length") {
        const auto r = design::optimize_fin_length(lo, hi, voltage, cfg.bundle);
        print_kv(out.stream(),
                 {{"fin_length_mm", fmt(r.fin_length_m * 1e3)},
                  {"thrust_n", fmt(r.thrust_n)},
                  {"best_grid_thrust_n", fmt(r.best_grid_thrust_n)},
                  {"probes", std::to_string(r.probes.size())}},
                 c.format);
    } else {
        throw ValidationError("target", "must be rod-length or fin-length");
    }
    return 0;
}

int cmd_simulate(const Common& c, const std::string& scenario_path, const std::string& summary_path,
                 double window) {
    const auto cfg = load(c);
    warn_uncalibrated(cfg);
    const auto sf = io::load_scenario(scenario_path);
    const auto traj = loco::simulate(sf.scenario, cfg.bundle.body);
    if (!c.out.empty()) {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) throw ConfigurationError("out", "cannot write '" + c.out + "'");
        csv::write_trajectory(f, traj.samples);
    }
    const auto states = loco::states_of(traj);
    if (states.back().t - states.front().t <= 2.0) {
        std::cout << "samples  " << states.size() << "\nevents   " << traj.events.size() << "\n";
        return 0;
    }
    const auto s = loco::summarize(states, window);
    const auto j = io::summary_to_json(s, cfg.bundle.body.body_length_m, traj.events.size());
    if (!summary_path.empty()) io::write_json(summary_path, j);
    if (c.format == "csv") {
        std::vector<std::string> keys, values;
        for (auto it = j.begin(); it != j.end(); ++it) {
            keys.push_back(it.key());
            values.push_back(it.value().is_string() ? it.value().get<std::string>() : csv::format(it.value().get<double>()));
        }
        csv::write_row(std::cout, keys);
        csv::write_row(std::cout, values);
    } else {
        const double bl = cfg.bundle.body.body_length_m;
        std::cout << "scenario          " << sf.scenario.name << "\n"
                  << "steady speed      " << fmt(s.steady_speed_m_s * 100, 4) << " cm/s ("
                  << fmt(s.steady_speed_m_s / bl, 3) << " BL/s)\n"
                  << "steady yaw rate   " << fmt(s.steady_yaw_rate_rad_s, 4) << " rad/s\n"
                  << "turning radius    "
                  << (std::isfinite(s.turning_radius_m) ? fmt(s.turning_radius_m * 100, 4) + " cm (" +
                                                              fmt(s.turning_radius_m / bl, 3) + " BL)"
                                                        : std::string("inf"))
                  << "\n"
                  << "speed / yaw rate  "
                  << (std::isfinite(s.kinematic_radius_m) ? fmt(s.kinematic_radius_m * 100, 4) + " cm"
                                                          : std::string("inf"))
                  << "\n"
                  << "time to steady    " << fmt(s.time_to_steady_s, 4) << " s\n"
                  << "collision events  " << traj.events.size() << "\n";
    }
    return 0;
}

int cmd_report(const Common& c, double voltage, double target_hz) {
    const auto cfg = load(c);
    warn_uncalibrated(cfg);
    const auto r = design::design_report(cfg.bundle, voltage, target_hz);
    Output out(c.out);
    print_kv(out.stream(),
             {{"rod_length_mm", fmt(r.rod_length_m * 1e3)},
              {"rod_height_mm", fmt(r.rod_height_m * 1e3)},
              {"rod_width_mm", fmt(r.rod_width_m * 1e3)},
              {"fin_length_mm", fmt(r.fin_length_m * 1e3)},
              {"voltage_v", fmt(r.voltage_v)},
              {"drive_frequency_hz", fmt(r.drive_frequency_hz)},
              {"f1_hz", fmt(r.f1_hz)},
              {"f2_hz", fmt(r.f2_hz)},
              {"mode_axis", modal::to_string(r.mode_axis)},
              {"gap_ratio", fmt(r.gap_ratio)},
              {"assembly_f1_hz", fmt(r.assembly_f1_hz)},
              {"a_x1_m", fmt(r.amplitudes.a_x1_m)},
              {"a_x2_m", fmt(r.amplitudes.a_x2_m)},
              {"a_x3_m", fmt(r.amplitudes.a_x3_m)},
              {"a_1y_m", fmt(r.amplitudes.a_1y_m)},
              {"streaming_velocity_m_s", fmt(r.streaming_velocity_m_s)},
              {"thrust_n", fmt(r.thrust_n)},
              {"target_frequency_hz", fmt(r.target_frequency_hz)},
              {"resonance_mismatch", fmt(r.resonance_mismatch)}},
             c.format);
    return 0;
}

std::atomic<bool> g_stop{false};

int cmd_serve(const Common& c, const server::ServerOptions& options, double duration_s) {
    const auto cfg = load(c);
    warn_uncalibrated(cfg);
    server::WsServer srv(cfg.bundle.body, server::builtin_scenarios(), options);
    std::signal(SIGINT, [](int) { g_stop = true; });
    std::signal(SIGTERM, [](int) { g_stop = true; });
    srv.start();
    std::cerr << "listening on ws://" << options.address << ":" << srv.port() << "\n";
    const auto t0 = std::chrono::steady_clock::now();
    while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        if (duration_s > 0.0 &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= duration_s)
            break;
    }
    srv.stop();
    return 0;
}

int cmd_replay(const Common& c, const std::string& log_path, std::uint64_t end_tick) {
    const auto cfg = load(c);
    std::ifstream in(log_path);
    if (!in) throw ConfigurationError("log", "cannot open '" + log_path + "'");
    const auto log = server::parse_log(in);
    const auto traj = server::replay(log, server::builtin_scenarios(), cfg.bundle.body, end_tick);
    Output out(c.out);
    csv::write_trajectory(out.stream(), traj.samples);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vibration-driven robotic fish toolkit: modal analysis, thrust, calibration, locomotion"};
    app.set_version_flag("--version", std::string(VIBRAFIN_VERSION));
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "toolkit configuration (JSON)");
        sub->add_option("--params", common.params, "parameter file (JSON)");
        sub->add_option("--out", common.out, "output path (default stdout)");
        sub->add_option("--format", common.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
    };

    auto* modal_cmd = app.add_subcommand("modal", "rigid-part and fin natural frequencies");
    add_common(modal_cmd);

    std::string axis, from, to;
    int steps = 5;
    auto* sweep = app.add_subcommand("sweep", "modal grid sweep to CSV");
    add_common(sweep);
    sweep->add_option("--axis", axis, "rod-length | aspect-ratio | fin-length")->required();
    sweep->add_option("--from", from, "first value, e.g. 6mm")->required();
    sweep->add_option("--to", to, "last value, e.g. 14mm")->required();
    sweep->add_option("--steps", steps, "number of grid points");

    double v_from = 3.0, v_to = 4.0, v_step = 0.1;
    auto* thrust_cmd = app.add_subcommand("thrust", "thrust-versus-voltage table (CSV)");
    add_common(thrust_cmd);
    thrust_cmd->add_option("--from", v_from, "first voltage [V]");
    thrust_cmd->add_option("--to", v_to, "last voltage [V]");
    thrust_cmd->add_option("--step", v_step, "voltage step [V]");

    std::string datasets_dir = std::string(VIBRAFIN_DATA_DIR) + "/datasets";
    std::vector<std::string> stages;
    int max_iter = 0;
    auto* calibrate = app.add_subcommand("calibrate", "fit model coefficients to the bundled datasets");
    add_common(calibrate);
    calibrate->add_option("--datasets", datasets_dir, "directory of dataset files");
    calibrate->add_option("--stage", stages, "run only these stages (modal, thrust, locomotion)");
    calibrate->add_option("--max-iter", max_iter, "Nelder-Mead iteration cap per run");

    std::string opt_target = "rod-length", lower = "6mm", upper = "14mm";
    double voltage = 3.0, target_hz = 138.0;
    auto* optimize = app.add_subcommand("optimize", "optimize rod length or fin length");
    add_common(optimize);
    optimize->add_option("target", opt_target, "rod-length | fin-length")->required();
    optimize->add_option("--lower", lower, "lower bound, e.g. 6mm");
    optimize->add_option("--upper", upper, "upper bound, e.g. 14mm");
    optimize->add_option("--voltage", voltage, "supply voltage for fin-length [V]");
    optimize->add_option("--target-hz", target_hz, "resonance target for rod-length [Hz]");

    std::string scenario, summary;
    double window = 0.3;
    auto* simulate = app.add_subcommand("simulate", "run a scenario, write trajectory CSV and summary");
    add_common(simulate);
    simulate->add_option("--scenario", scenario, "scenario file")->required();
    simulate->add_option("--summary", summary, "write the summary as JSON");
    simulate->add_option("--window", window, "steady window fraction");

    auto* report = app.add_subcommand("report", "design report for the configured geometry");
    add_common(report);
    report->add_option("--voltage", voltage, "supply voltage [V]");
    report->add_option("--target-hz", target_hz, "resonance target [Hz]");

    server::ServerOptions sopts;
    double duration = 0.0;
    auto* serve = app.add_subcommand("serve", "interactive WebSocket simulation server");
    add_common(serve);
    serve->add_option("--port", sopts.port, "TCP port (0 picks a free port)");
    serve->add_option("--address", sopts.address, "listen address");
    serve->add_option("--scenario", sopts.initial_scenario, "initial built-in scenario");
    serve->add_option("--replay", sopts.replay_path, "append the command log to this file");
    serve->add_option("--duration", duration, "stop after this many seconds (0 runs until interrupted)");

    std::string log_path;
    std::uint64_t end_tick = 0;
    auto* replay = app.add_subcommand("replay", "re-run a server command log offline (trajectory CSV)");
    add_common(replay);
    replay->add_option("--log", log_path, "command log")->required();
    replay->add_option("--end-tick", end_tick, "last global tick to simulate")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*modal_cmd) return cmd_modal(common);
        if (*sweep) return cmd_sweep(common, axis, from, to, steps);
        if (*thrust_cmd) return cmd_thrust(common, v_from, v_to, v_step);
        if (*calibrate) return cmd_calibrate(common, datasets_dir, stages, max_iter);
        if (*optimize) return cmd_optimize(common, opt_target, lower, upper, voltage, target_hz);
        if (*simulate) return cmd_simulate(common, scenario, summary, window);
        if (*report) return cmd_report(common, voltage, target_hz);
        if (*serve) return cmd_serve(common, sopts, duration);
        if (*replay) return cmd_replay(common, log_path, end_tick);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << " [" << e.field() << "]\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const boost::system::system_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
