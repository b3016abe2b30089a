#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dqk/lqr.hpp"

namespace dqk {

/// Everything needed to run one scenario, as read from a TOML file.
struct ScenarioConfig {
    double mass = 1.0;
    Mat3 inertia = Mat3::Identity();

    Vec4 quaternion = Vec4(0.0, 0.0, 0.0, 1.0);  ///< (x, y, z, w)
    Vec3 translation = Vec3::Zero();
    Vec3 omega = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();

    double dt = 0.05;
    int horizon = 600;
    Vec6 sim_force = Vec6::Zero();  ///< constant [force; torque] for open-loop runs

    std::string dictionary = "derived";
    ObservableConfig observables;
    double rbf_width = 1.0;

    int samples = 500;
    double amplitude = 1.0;
    double pinv_rtol = 1e-10;
    bool recenter = false;

    int refit = 500;
    double q_weight = 5.0;
    int q_dim = 16;
    double r_weight = 1.0;
    double dare_tol = 1e-9;
    int dare_max_iter = 100000;

    std::vector<int> compare_orders{0, 3, 5};
    std::vector<std::string> compare_dictionaries{"derived", "rbf"};

    std::uint64_t seed = 1;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    RigidBodyState initial_state() const;
    DualInertia dual_inertia() const;
    InertiaMatrices inertia_matrices() const;
    ControlSettings control_settings() const;
    /// Settings for one cell of the comparison grid.
    ControlSettings control_settings(const std::string& dictionary, int order) const;

    /// Canonical text form used for the config echo and hash.
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// The bundled default scenario.
const std::string& default_config_text();

ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace dqk
