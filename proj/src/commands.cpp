#include "dqk/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "dqk/errors.hpp"
#include "dqk/io.hpp"

namespace dqk {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

const std::vector<std::string>& state_header()
{
    static const std::vector<std::string> h{"qr_x", "qr_y", "qr_z", "qr_w", "qd_x", "qd_y", "qd_z",
                                            "qd_w", "wx",   "wy",   "wz",   "vx",   "vy",   "vz"};
    return h;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string hex(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json header_json(const std::string& command, const ScenarioConfig& cfg)
{
    json j;
    j["command"] = command;
    j["seed"] = cfg.seed;
    j["config_hash"] = hex(cfg.hash());
    j["config"] = json::parse(cfg.canonical());
    return j;
}

std::filesystem::path write_summary(const std::filesystem::path& dir, const json& j, ResultBundle& bundle)
{
    std::filesystem::create_directories(dir);
    const auto path = dir / "summary.json";
    std::ofstream(path) << j.dump(2) << '\n';
    bundle.files.push_back(path);
    bundle.summary_json = j.dump(2);
    return path;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t c)
{
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

std::vector<PlotSeries> series(const CsvTable& t, std::size_t first, std::size_t count)
{
    std::vector<PlotSeries> out;
    for (std::size_t c = first; c < first + count; ++c) out.push_back({t.header[c], column(t.rows, c)});
    return out;
}

}  // namespace

Stabilization assess(const RigidBodyState& initial, const RigidBodyState& final_state)
{
    Stabilization s;
    s.position = translation_from(final_state.pose).norm();
    s.omega = final_state.omega.norm();
    s.velocity = final_state.vel.norm();
    const double start = translation_from(initial.pose).norm();
    const bool near = s.position < 0.05 * start || s.position == 0.0;
    s.converged = near && s.omega < 0.05 && s.velocity < 0.05;
    return s;
}

ResultBundle cmd_simulate(const ScenarioConfig& cfg, const CommandOptions& opt)
{
    const auto t0 = Clock::now();
    const InertiaMatrices mats = cfg.inertia_matrices();
    const DualInertia di = cfg.dual_inertia();
    RigidBodyState x = cfg.initial_state();
    const double e0 = rotational_energy(x, di);
    const DualForce force{cfg.sim_force.head<3>(), cfg.sim_force.tail<3>()};

    CsvTable t;
    t.header = {"time"};
    t.header.insert(t.header.end(), state_header().begin(), state_header().end());
    for (const char* n : {"tx", "ty", "tz", "energy"}) t.header.emplace_back(n);

    double max_violation = 0.0, max_energy_drift = 0.0;
    for (int k = 0; k <= cfg.horizon; ++k) {
        const Vec14 s = x.flatten();
        const Vec3 tr = translation_from(x.pose);
        const double e = rotational_energy(x, di);
        std::vector<double> row{k * cfg.dt};
        row.insert(row.end(), s.data(), s.data() + 14);
        row.insert(row.end(), {tr(0), tr(1), tr(2), e});
        t.rows.push_back(std::move(row));
        max_violation = std::max(max_violation, unit_violation(x.pose));
        if (e0 > 0.0) max_energy_drift = std::max(max_energy_drift, std::abs(e - e0) / e0);
        if (k < cfg.horizon) x = rk4_step_force(x, force, cfg.dt, mats);
    }

    ResultBundle b{opt.out, {}, {}};
    write_csv(opt.out / "trajectory.csv", t);
    b.files.push_back(opt.out / "trajectory.csv");
    const auto time = column(t.rows, 0);
    write_svg_plot(opt.out / "pose.svg", "Pose components", "time [s]", time, series(t, 1, 8));
    write_svg_plot(opt.out / "twist.svg", "Angular and linear velocity", "time [s]", time, series(t, 9, 6));
    write_svg_plot(opt.out / "translation.svg", "Body-frame translation", "time [s]", time, series(t, 15, 3));
    for (const char* f : {"pose.svg", "twist.svg", "translation.svg"}) b.files.push_back(opt.out / f);

    json j = header_json("simulate", cfg);
    j["steps"] = cfg.horizon;
    j["max_unit_violation"] = max_violation;
    j["max_relative_energy_drift"] = max_energy_drift;
    j["runtime_s"] = seconds_since(t0);
    write_summary(opt.out, j, b);
    if (!opt.quiet)
        std::cout << "simulate: " << cfg.horizon << " steps, max unit violation " << max_violation
                  << ", max relative energy drift " << max_energy_drift << '\n';
    return b;
}

ResultBundle cmd_fit(const ScenarioConfig& cfg, const CommandOptions& opt)
{
    const auto t0 = Clock::now();
    const InertiaMatrices mats = cfg.inertia_matrices();
    const ControlSettings settings = cfg.control_settings();
    const DataSet data = identification_data(cfg.initial_state(), settings, mats, 0);
    const Dictionary dict = make_dictionary(settings, data);
    const LiftedLinearModel model = fit(data, dict, settings.pinv_rtol);

    const Eigen::Index n_train = std::max<Eigen::Index>(1, data.size() * 4 / 5);
    const Eigen::Index n_hold = data.size() - n_train;
    const LiftedLinearModel train = fit(data.slice(0, n_train), dict, settings.pinv_rtol);
    const RolloutStats train_err = rollout_error(train, data.slice(0, n_train), 1);

    ResultBundle b{opt.out, {}, {}};
    write_matrix_csv(opt.out / "A_lift.csv", model.A, dict.coordinate_names());
    write_matrix_csv(opt.out / "B_lift.csv", model.B, {"u_fx", "u_fy", "u_fz", "u_tx", "u_ty", "u_tz"});
    Eigen::MatrixXd stacked(data.size(), 34);
    stacked << data.X.transpose(), data.U.transpose(), data.Y.transpose();
    std::vector<std::string> names;
    for (const auto& n : state_header()) names.push_back("x_" + n);
    for (const char* n : {"u_fx", "u_fy", "u_fz", "u_tx", "u_ty", "u_tz"}) names.emplace_back(n);
    for (const auto& n : state_header()) names.push_back("y_" + n);
    write_matrix_csv(opt.out / "data.csv", stacked, names);
    for (const char* f : {"A_lift.csv", "B_lift.csv", "data.csv"}) b.files.push_back(opt.out / f);

    json j = header_json("fit", cfg);
    j["dimension"] = dict.dimension();
    j["transitions"] = data.size();
    j["rank"] = model.rank;
    j["residual"] = model.residual;
    j["base_residual"] = model.base_residual;
    j["train_one_step_error"] = train_err.mean[0];
    if (n_hold > 0) {
        const RolloutStats hold = rollout_error(train, data.slice(n_train, n_hold), 1);
        j["holdout_one_step_error"] = hold.mean[0];
        j["holdout_one_step_max_error"] = hold.max[0];
    }
    j["runtime_s"] = seconds_since(t0);
    write_summary(opt.out, j, b);
    if (!opt.quiet)
        std::cout << "fit: n_z = " << dict.dimension() << ", residual " << model.residual << ", base residual "
                  << model.base_residual << '\n';
    return b;
}

void write_closed_loop_csv(const std::filesystem::path& path, const ClosedLoopLog& log)
{
    CsvTable t;
    t.header = {"time"};
    t.header.insert(t.header.end(), state_header().begin(), state_header().end());
    for (const char* n : {"u_fx", "u_fy", "u_fz", "u_tx", "u_ty", "u_tz", "F_x", "F_y", "F_z", "tau_x", "tau_y",
                          "tau_z", "stage_cost", "cumulative_cost"})
        t.header.emplace_back(n);
    for (const auto& s : log.steps) {
        const Vec14 x = s.state.flatten();
        std::vector<double> row{s.time};
        row.insert(row.end(), x.data(), x.data() + 14);
        row.insert(row.end(), s.u.data(), s.u.data() + 6);
        row.insert(row.end(), s.force.force.data(), s.force.force.data() + 3);
        row.insert(row.end(), s.force.torque.data(), s.force.torque.data() + 3);
        row.push_back(s.stage_cost);
        row.push_back(s.cumulative_cost);
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

namespace {

void plot_closed_loop(const std::filesystem::path& dir, const ClosedLoopLog& log, ResultBundle& b)
{
    const CsvTable t = read_csv(dir / "trajectory.csv");
    const auto time = column(t.rows, 0);
    std::vector<PlotSeries> translation{{"tx", {}}, {"ty", {}}, {"tz", {}}};
    for (const auto& s : log.steps) {
        const Vec3 tr = translation_from(s.state.pose);
        for (int i = 0; i < 3; ++i) translation[i].values.push_back(tr(i));
    }
    write_svg_plot(dir / "pose.svg", "Pose components", "time [s]", time, series(t, 1, 8));
    write_svg_plot(dir / "translation.svg", "Body-frame translation", "time [s]", time, translation);
    write_svg_plot(dir / "twist.svg", "Angular and linear velocity", "time [s]", time, series(t, 9, 6));
    write_svg_plot(dir / "force.svg", "Applied force and torque", "time [s]", time, series(t, 21, 6));
    for (const char* f : {"pose.svg", "translation.svg", "twist.svg", "force.svg"}) b.files.push_back(dir / f);
}

json refits_json(const ClosedLoopLog& log)
{
    json arr = json::array();
    for (const auto& r : log.refits)
        arr.push_back({{"step", r.step},
                       {"dare_iterations", r.dare_iterations},
                       {"dare_residual", r.dare_residual},
                       {"spectral_radius", r.spectral_radius},
                       {"fit_residual", r.fit_residual}});
    return arr;
}

}  // namespace

ResultBundle cmd_control(const ScenarioConfig& cfg, const CommandOptions& opt)
{
    const auto t0 = Clock::now();
    const InertiaMatrices mats = cfg.inertia_matrices();
    const RigidBodyState x0 = cfg.initial_state();
    ResultBundle b{opt.out, {}, {}};
    json j = header_json("control", cfg);

    ClosedLoopLog log;
    try {
        log = run_closed_loop(x0, cfg.control_settings(), mats);
    } catch (const NumericalError& e) {
        j["ok"] = false;
        j["error"] = e.what();
        j["module"] = e.module();
        j["runtime_s"] = seconds_since(t0);
        write_summary(opt.out, j, b);
        throw;
    }

    write_closed_loop_csv(opt.out / "trajectory.csv", log);
    b.files.push_back(opt.out / "trajectory.csv");
    plot_closed_loop(opt.out, log, b);

    const Stabilization s = assess(x0, log.final_state);
    j["ok"] = true;
    j["cost"] = log.cost;
    j["final_position"] = s.position;
    j["final_omega"] = s.omega;
    j["final_velocity"] = s.velocity;
    j["converged"] = s.converged;
    j["refits"] = refits_json(log);
    j["runtime_s"] = seconds_since(t0);
    write_summary(opt.out, j, b);
    if (!opt.quiet)
        std::cout << "control: J = " << log.cost << ", final |t| = " << s.position << ", |w| = " << s.omega
                  << ", |v| = " << s.velocity << (s.converged ? " (converged)" : " (not converged)") << '\n';
    return b;
}

ResultBundle cmd_compare(const ScenarioConfig& cfg, const CommandOptions& opt, std::vector<CompareCell>* cells_out)
{
    const auto t0 = Clock::now();
    const InertiaMatrices mats = cfg.inertia_matrices();
    const RigidBodyState x0 = cfg.initial_state();
    ResultBundle b{opt.out, {}, {}};

    std::vector<CompareCell> cells;
    for (const auto& dict : cfg.compare_dictionaries) {
        for (int order : cfg.compare_orders) {
            CompareCell c{dict, order, false, 0.0, {}, {}};
            const auto dir = opt.out / (dict + "_N" + std::to_string(order));
            std::filesystem::create_directories(dir);
            try {
                const ClosedLoopLog log = run_closed_loop(x0, cfg.control_settings(dict, order), mats);
                c.ok = true;
                c.cost = log.cost;
                c.result = assess(x0, log.final_state);
                write_closed_loop_csv(dir / "trajectory.csv", log);
                b.files.push_back(dir / "trajectory.csv");
                plot_closed_loop(dir, log, b);
            } catch (const NumericalError& e) {
                c.error = std::string(e.module()) + ": " + e.what();
            }
            if (!opt.quiet)
                std::cout << "compare: " << dict << " N=" << order << " -> "
                          << (c.ok ? std::to_string(c.cost) : "failed (" + c.error + ")") << '\n';
            cells.push_back(c);
        }
    }

    CsvTable table;
    table.header = {"N"};
    for (const auto& d : cfg.compare_dictionaries) table.header.push_back(d);
    std::filesystem::create_directories(opt.out);
    std::ofstream md(opt.out / "cost_table.md");
    md << "| N |";
    for (const auto& d : cfg.compare_dictionaries) md << ' ' << d << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < cfg.compare_dictionaries.size(); ++i) md << "---|";
    md << '\n';
    for (int order : cfg.compare_orders) {
        std::vector<double> row{static_cast<double>(order)};
        md << "| " << order << " |";
        for (const auto& d : cfg.compare_dictionaries) {
            for (const auto& c : cells) {
                if (c.dictionary != d || c.order != order) continue;
                row.push_back(c.ok ? c.cost : std::nan(""));
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.4e", c.cost);
                md << ' ' << (c.ok ? std::string(buf) : std::string("diverged")) << " |";
            }
        }
        md << '\n';
        table.rows.push_back(std::move(row));
    }
    md.close();
    write_csv(opt.out / "cost_table.csv", table);
    b.files.push_back(opt.out / "cost_table.csv");
    b.files.push_back(opt.out / "cost_table.md");

    json j = header_json("compare", cfg);
    json arr = json::array();
    for (const auto& c : cells) {
        json cell{{"dictionary", c.dictionary}, {"order", c.order}, {"ok", c.ok}};
        if (c.ok) {
            cell["cost"] = c.cost;
            cell["final_position"] = c.result.position;
            cell["final_omega"] = c.result.omega;
            cell["final_velocity"] = c.result.velocity;
            cell["converged"] = c.result.converged;
        } else {
            cell["error"] = c.error;
        }
        arr.push_back(cell);
    }
    j["cells"] = arr;
    j["runtime_s"] = seconds_since(t0);
    write_summary(opt.out, j, b);
    if (cells_out) *cells_out = cells;
    return b;
}

}  // namespace dqk
