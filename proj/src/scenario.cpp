#include "dqk/scenario.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "dqk/default_config.hpp"
#include "dqk/errors.hpp"

namespace dqk {

namespace {

template <typename View>
std::string where(const View& node)
{
    if (!node) return "";
    const auto& src = node.node()->source();
    return " (line " + std::to_string(src.begin.line) + ")";
}

class Reader {
public:
    explicit Reader(const toml::table& root) : root_(root) {}

    double number(const std::string& path, double fallback) const
    {
        auto node = root_.at_path(path);
        if (!node) return fallback;
        if (auto v = node.value<double>()) return *v;
        throw ConfigError("field '" + path + "': expected a number" + where(node));
    }

    int integer(const std::string& path, int fallback) const
    {
        auto node = root_.at_path(path);
        if (!node) return fallback;
        if (!node.is_integer()) throw ConfigError("field '" + path + "': expected an integer" + where(node));
        return static_cast<int>(*node.value<std::int64_t>());
    }

    bool boolean(const std::string& path, bool fallback) const
    {
        auto node = root_.at_path(path);
        if (!node) return fallback;
        if (auto v = node.value<bool>()) return *v;
        throw ConfigError("field '" + path + "': expected true or false" + where(node));
    }

    std::string string(const std::string& path, const std::string& fallback) const
    {
        auto node = root_.at_path(path);
        if (!node) return fallback;
        if (auto v = node.value<std::string>()) return *v;
        throw ConfigError("field '" + path + "': expected a string" + where(node));
    }

    Eigen::VectorXd vector(const std::string& path, const Eigen::VectorXd& fallback) const
    {
        auto node = root_.at_path(path);
        if (!node) return fallback;
        const toml::array* arr = node.as_array();
        if (!arr || static_cast<Eigen::Index>(arr->size()) != fallback.size())
            throw ConfigError("field '" + path + "': expected an array of " + std::to_string(fallback.size()) +
                              " numbers" + where(node));
        Eigen::VectorXd out(fallback.size());
        for (std::size_t i = 0; i < arr->size(); ++i) {
            auto v = arr->get(i)->value<double>();
            if (!v) throw ConfigError("field '" + path + "': entry " + std::to_string(i) + " is not a number" +
                                      where(node));
            out(static_cast<Eigen::Index>(i)) = *v;
        }
        return out;
    }

    Mat3 matrix3(const std::string& path, const Mat3& fallback) const
    {
        auto node = root_.at_path(path);
        if (!node) return fallback;
        const toml::array* rows = node.as_array();
        if (!rows || rows->size() != 3) throw ConfigError("field '" + path + "': expected a 3x3 array" + where(node));
        Mat3 out;
        for (std::size_t r = 0; r < 3; ++r) {
            const toml::array* row = rows->get(r)->as_array();
            if (!row || row->size() != 3)
                throw ConfigError("field '" + path + "': row " + std::to_string(r) + " must have 3 entries" +
                                  where(node));
            for (std::size_t c = 0; c < 3; ++c) {
                auto v = row->get(c)->value<double>();
                if (!v) throw ConfigError("field '" + path + "': non-numeric entry" + where(node));
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
            }
        }
        return out;
    }

    template <typename T>
    std::vector<T> list(const std::string& path, const std::vector<T>& fallback) const
    {
        auto node = root_.at_path(path);
        if (!node) return fallback;
        const toml::array* arr = node.as_array();
        if (!arr) throw ConfigError("field '" + path + "': expected an array" + where(node));
        std::vector<T> out;
        for (std::size_t i = 0; i < arr->size(); ++i) {
            auto v = arr->get(i)->value<T>();
            if (!v) throw ConfigError("field '" + path + "': entry " + std::to_string(i) + " has the wrong type" +
                                      where(node));
            out.push_back(*v);
        }
        return out;
    }

private:
    const toml::table& root_;
};

const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"body", {"mass", "inertia"}},
        {"initial", {"quaternion", "translation", "omega", "velocity"}},
        {"simulation", {"dt", "horizon", "force"}},
        {"observables", {"dictionary", "order", "omega0", "v0", "normalized", "include_twist", "rbf_width"}},
        {"identification", {"samples", "amplitude", "pinv_rtol", "recenter"}},
        {"control", {"refit", "q_weight", "q_dim", "r_weight", "dare_tol", "dare_max_iter"}},
        {"compare", {"orders", "dictionaries"}},
    };
    return keys;
}

void check_keys(const toml::table& root)
{
    for (const auto& [key, node] : root) {
        const std::string k(key.str());
        if (k == "seed") continue;
        auto it = known_keys().find(k);
        if (it == known_keys().end() || !node.is_table())
            throw ConfigError("unknown section '" + k + "' (line " + std::to_string(node.source().begin.line) + ")");
        for (const auto& [sub, subnode] : *node.as_table())
            if (!it->second.count(std::string(sub.str())))
                throw ConfigError("unknown field '" + k + "." + std::string(sub.str()) + "' (line " +
                                  std::to_string(subnode.source().begin.line) + ")");
    }
}

bool is_dictionary_name(const std::string& s) { return s == "derived" || s == "rbf"; }

}  // namespace

const std::string& default_config_text()
{
    static const std::string text(detail::kDefaultConfig);
    return text;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source)
{
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ConfigError(source + ":" + std::to_string(e.source().begin.line) + ": " +
                          std::string(e.description()));
    }
    check_keys(root);
    const Reader r(root);

    ScenarioConfig c;
    if (auto node = root["seed"]) {
        if (!node.is_integer() || *node.value<std::int64_t>() < 0)
            throw ConfigError("field 'seed': expected a non-negative integer" + where(node));
        c.seed = static_cast<std::uint64_t>(*node.value<std::int64_t>());
    }
    c.mass = r.number("body.mass", c.mass);
    c.inertia = r.matrix3("body.inertia", c.inertia);
    c.quaternion = r.vector("initial.quaternion", c.quaternion);
    c.translation = r.vector("initial.translation", c.translation);
    c.omega = r.vector("initial.omega", c.omega);
    c.velocity = r.vector("initial.velocity", c.velocity);
    c.dt = r.number("simulation.dt", c.dt);
    c.horizon = r.integer("simulation.horizon", c.horizon);
    c.sim_force = r.vector("simulation.force", c.sim_force);
    c.dictionary = r.string("observables.dictionary", c.dictionary);
    c.observables.order = r.integer("observables.order", c.observables.order);
    c.observables.omega0 = r.number("observables.omega0", c.observables.omega0);
    c.observables.v0 = r.number("observables.v0", c.observables.v0);
    c.observables.normalized = r.boolean("observables.normalized", c.observables.normalized);
    c.observables.include_twist = r.boolean("observables.include_twist", c.observables.include_twist);
    c.rbf_width = r.number("observables.rbf_width", c.rbf_width);
    c.samples = r.integer("identification.samples", c.samples);
    c.amplitude = r.number("identification.amplitude", c.amplitude);
    c.pinv_rtol = r.number("identification.pinv_rtol", c.pinv_rtol);
    c.recenter = r.boolean("identification.recenter", c.recenter);
    c.refit = r.integer("control.refit", c.refit);
    c.q_weight = r.number("control.q_weight", c.q_weight);
    c.q_dim = r.integer("control.q_dim", c.q_dim);
    c.r_weight = r.number("control.r_weight", c.r_weight);
    c.dare_tol = r.number("control.dare_tol", c.dare_tol);
    c.dare_max_iter = r.integer("control.dare_max_iter", c.dare_max_iter);
    c.compare_orders = r.list<int>("compare.orders", c.compare_orders);
    c.compare_dictionaries = r.list<std::string>("compare.dictionaries", c.compare_dictionaries);
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

void ScenarioConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (!(mass > 0.0)) fail("body.mass: must be positive");
    if (!inertia.allFinite()) fail("body.inertia: entries must be finite");
    if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail("body.inertia: must be symmetric");
    if (Eigen::SelfAdjointEigenSolver<Mat3>(inertia).eigenvalues().minCoeff() <= 0.0)
        fail("body.inertia: must be positive definite");
    if (!quaternion.allFinite() || std::abs(quaternion.norm() - 1.0) > 1e-6)
        fail("initial.quaternion: must have unit norm within 1e-6 (norm is " + std::to_string(quaternion.norm()) +
             ")");
    if (!translation.allFinite() || !omega.allFinite() || !velocity.allFinite())
        fail("initial: entries must be finite");
    if (!(dt > 0.0)) fail("simulation.dt: must be positive");
    if (horizon < 1) fail("simulation.horizon: must be at least 1");
    if (!sim_force.allFinite()) fail("simulation.force: entries must be finite");
    if (!is_dictionary_name(dictionary)) fail("observables.dictionary: expected \"derived\" or \"rbf\"");
    if (observables.order < 0) fail("observables.order: must be non-negative");
    if (observables.normalized && !(observables.omega0 > 0.0 && observables.v0 > 0.0))
        fail("observables.omega0/v0: must be positive");
    if (observables.normalized && observables.order > 0 &&
        (omega.norm() >= observables.omega0 || velocity.norm() >= observables.v0))
        fail("observables.omega0/v0: initial velocities exceed the normalization bounds");
    if (!(rbf_width > 0.0)) fail("observables.rbf_width: must be positive");
    if (samples < 1) fail("identification.samples: must be at least 1");
    if (!(amplitude > 0.0)) fail("identification.amplitude: must be positive");
    if (!(pinv_rtol >= 0.0 && pinv_rtol < 1.0)) fail("identification.pinv_rtol: must lie in [0, 1)");
    if (refit < 1) fail("control.refit: must be at least 1");
    if (!(q_weight >= 0.0)) fail("control.q_weight: must be non-negative");
    if (q_dim < 0) fail("control.q_dim: must be non-negative");
    if (!(r_weight > 0.0)) fail("control.r_weight: must be positive");
    if (!(dare_tol > 0.0)) fail("control.dare_tol: must be positive");
    if (dare_max_iter < 1) fail("control.dare_max_iter: must be at least 1");
    for (int n : compare_orders)
        if (n < 0) fail("compare.orders: entries must be non-negative");
    for (const auto& d : compare_dictionaries)
        if (!is_dictionary_name(d)) fail("compare.dictionaries: unknown dictionary '" + d + "'");
}

RigidBodyState ScenarioConfig::initial_state() const
{
    RigidBodyState s;
    s.pose = pose_from(Quaternion(Vec4(quaternion.normalized())), translation);
    s.omega = omega;
    s.vel = velocity;
    return s;
}

DualInertia ScenarioConfig::dual_inertia() const { return {mass, inertia}; }

InertiaMatrices ScenarioConfig::inertia_matrices() const { return dual_inertia_matrix(dual_inertia()); }

ControlSettings ScenarioConfig::control_settings() const
{
    return control_settings(dictionary, observables.order);
}

ControlSettings ScenarioConfig::control_settings(const std::string& dict, int order) const
{
    ControlSettings s;
    s.dictionary = dict == "rbf" ? Dictionary::Kind::Rbf : Dictionary::Kind::Derived;
    s.observables = observables;
    s.observables.order = s.dictionary == Dictionary::Kind::Derived ? order : 0;
    s.rbf_centers = s.dictionary == Dictionary::Kind::Rbf ? order : 0;
    s.rbf_width = rbf_width;
    s.dt = dt;
    s.n_total = horizon;
    s.n_refit = refit;
    s.n_data = samples;
    s.amplitude = amplitude;
    s.pinv_rtol = pinv_rtol;
    s.recenter = recenter;
    s.q_weight = q_weight;
    s.q_dim = q_dim;
    s.r_weight = r_weight;
    s.dare_tol = dare_tol;
    s.dare_max_iter = dare_max_iter;
    s.seed = seed;
    return s;
}

std::string ScenarioConfig::canonical() const
{
    using nlohmann::ordered_json;
    auto vec = [](const auto& v) {
        std::vector<double> out(v.data(), v.data() + v.size());
        return out;
    };
    ordered_json j;
    j["seed"] = seed;
    j["body"] = {{"mass", mass},
                 {"inertia", {vec(Vec3(inertia.row(0))), vec(Vec3(inertia.row(1))), vec(Vec3(inertia.row(2)))}}};
    j["initial"] = {{"quaternion", vec(quaternion)},
                    {"translation", vec(translation)},
                    {"omega", vec(omega)},
                    {"velocity", vec(velocity)}};
    j["simulation"] = {{"dt", dt}, {"horizon", horizon}, {"force", vec(sim_force)}};
    j["observables"] = {{"dictionary", dictionary},     {"order", observables.order},
                        {"omega0", observables.omega0}, {"v0", observables.v0},
                        {"normalized", observables.normalized}, {"include_twist", observables.include_twist},
                        {"rbf_width", rbf_width}};
    j["identification"] = {
        {"samples", samples}, {"amplitude", amplitude}, {"pinv_rtol", pinv_rtol}, {"recenter", recenter}};
    j["control"] = {{"refit", refit},       {"q_weight", q_weight}, {"q_dim", q_dim},
                    {"r_weight", r_weight}, {"dare_tol", dare_tol}, {"dare_max_iter", dare_max_iter}};
    j["compare"] = {{"orders", compare_orders}, {"dictionaries", compare_dictionaries}};
    return j.dump(2);
}

std::uint64_t ScenarioConfig::hash() const
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace dqk
