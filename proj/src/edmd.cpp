#include "dqk/edmd.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace dqk {

DataSet DataSet::slice(Eigen::Index begin, Eigen::Index count) const
{
    if (begin < 0 || count < 0 || begin + count > size()) throw std::out_of_range("data slice out of range");
    return {X.middleCols(begin, count), U.middleCols(begin, count), Y.middleCols(begin, count)};
}

DataSet generate_data(const RigidBodyState& x0, int n_steps, double amplitude, std::uint64_t seed,
                      double dt, const InertiaMatrices& mats, const std::optional<ObservableConfig>& bounds)
{
    if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
    if (!(amplitude > 0.0)) throw std::invalid_argument("amplitude must be positive");

    auto check = [&](const RigidBodyState& s, int step) {
        if (!bounds || !bounds->normalized) return;
        if (s.omega.norm() >= bounds->omega0 || s.vel.norm() >= bounds->v0)
            throw std::domain_error("excitation trajectory exceeds normalization bound at step " +
                                    std::to_string(step));
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);

    DataSet d;
    d.X.resize(14, n_steps);
    d.U.resize(6, n_steps);
    d.Y.resize(14, n_steps);
    RigidBodyState x = x0;
    check(x, 0);
    for (int j = 0; j < n_steps; ++j) {
        ModifiedInput u;
        for (int i = 0; i < 6; ++i) u(i) = dist(rng);
        d.X.col(j) = x.flatten();
        d.U.col(j) = u;
        x = rk4_step(x, u, dt, mats);
        check(x, j + 1);
        d.Y.col(j) = x.flatten();
    }
    return d;
}

Dictionary Dictionary::derived(const ObservableConfig& cfg)
{
    cfg.validate();
    Dictionary d;
    d.kind_ = Kind::Derived;
    d.cfg_ = cfg;
    return d;
}

Dictionary Dictionary::rbf(const RbfDictionary& dict)
{
    dict.validate();
    Dictionary d;
    d.kind_ = Kind::Rbf;
    d.rbf_ = dict;
    return d;
}

int Dictionary::dimension() const
{
    return kind_ == Kind::Derived ? cfg_.dimension() : rbf_.dimension();
}

Eigen::VectorXd Dictionary::lift(const RigidBodyState& s) const
{
    return kind_ == Kind::Derived ? dqk::lift(s, cfg_) : rbf_lift(s, rbf_);
}

Eigen::MatrixXd Dictionary::lift_columns(const Eigen::MatrixXd& states) const
{
    Eigen::MatrixXd z(dimension(), states.cols());
    for (Eigen::Index j = 0; j < states.cols(); ++j)
        z.col(j) = lift(RigidBodyState::unflatten(Vec14(states.col(j))));
    return z;
}

std::vector<Eigen::Index> Dictionary::base_rows() const
{
    std::vector<Eigen::Index> rows;
    if (kind_ == Kind::Rbf) {
        for (Eigen::Index i = 0; i < 14; ++i) rows.push_back(i);
        return rows;
    }
    for (Eigen::Index i = 0; i < 8; ++i) rows.push_back(i);
    if (cfg_.include_twist)
        for (Eigen::Index i = dimension() - 6; i < dimension(); ++i) rows.push_back(i);
    return rows;
}

std::vector<std::string> Dictionary::coordinate_names() const
{
    static const char* axes[] = {"x", "y", "z", "w"};
    static const char* state_names[] = {"qr_x", "qr_y", "qr_z", "qr_w", "qd_x", "qd_y", "qd_z",
                                        "qd_w", "wx",   "wy",   "wz",   "vx",   "vy",   "vz"};
    std::vector<std::string> names;
    if (kind_ == Kind::Rbf) {
        for (const char* n : state_names) names.emplace_back(n);
        for (std::size_t i = 0; i < rbf_.centers.size(); ++i) names.push_back("rbf" + std::to_string(i));
        return names;
    }
    for (int k = 0; k <= cfg_.order; ++k)
        for (const char* part : {"r", "d"})
            for (const char* a : axes) names.push_back("f" + std::to_string(k) + "_" + part + a);
    if (cfg_.include_twist)
        for (int i = 8; i < 14; ++i) names.emplace_back(state_names[i]);
    return names;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rtol, int* rank)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? rtol * s(0) : 0.0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) {
            inv(i) = 1.0 / s(i);
            ++r;
        }
    }
    if (rank) *rank = r;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

LiftedLinearModel fit_lifted(const Eigen::MatrixXd& x_lift, const Eigen::MatrixXd& u,
                             const Eigen::MatrixXd& y_lift, const Dictionary& dict, double rtol)
{
    if (x_lift.cols() == 0) throw std::invalid_argument("empty data set");
    if (!x_lift.allFinite() || !u.allFinite() || !y_lift.allFinite())
        throw std::invalid_argument("data contains non-finite values");
    const Eigen::Index nz = x_lift.rows();

    Eigen::MatrixXd g(nz + u.rows(), x_lift.cols());
    g << x_lift, u;
    LiftedLinearModel model;
    model.dictionary = dict;
    const Eigen::MatrixXd ab = y_lift * pinv(g, rtol, &model.rank);
    model.A = ab.leftCols(nz);
    model.B = ab.rightCols(u.rows());

    const Eigen::MatrixXd err = y_lift - ab * g;
    model.residual = err.norm();
    double base = 0.0;
    for (Eigen::Index r : dict.base_rows()) base += err.row(r).squaredNorm();
    model.base_residual = std::sqrt(base);
    return model;
}

LiftedLinearModel fit(const DataSet& data, const Dictionary& dict, double rtol)
{
    if (data.size() == 0) throw std::invalid_argument("empty data set");
    return fit_lifted(dict.lift_columns(data.X), data.U, dict.lift_columns(data.Y), dict, rtol);
}

Eigen::VectorXd predict(const LiftedLinearModel& model, const Eigen::VectorXd& z, const ModifiedInput& u)
{
    if (z.size() != model.A.cols()) throw std::invalid_argument("lifted state dimension mismatch");
    return model.A * z + model.B * u;
}

RolloutStats rollout_error(const LiftedLinearModel& model, const DataSet& data, int horizon)
{
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    const Eigen::MatrixXd zx = model.dictionary.lift_columns(data.X);
    const Eigen::MatrixXd zy = model.dictionary.lift_columns(data.Y);

    RolloutStats stats{std::vector<double>(horizon, 0.0), std::vector<double>(horizon, 0.0)};
    std::vector<int> counts(horizon, 0);
    for (Eigen::Index j = 0; j < data.size(); ++j) {
        Eigen::VectorXd z = zx.col(j);
        for (int h = 0; h < horizon && j + h < data.size(); ++h) {
            z = predict(model, z, data.U.col(j + h));
            const Eigen::VectorXd truth = zy.col(j + h);
            const double denom = truth.norm();
            const double e = denom > 0.0 ? (z - truth).norm() / denom : (z - truth).norm();
            stats.mean[h] += e;
            stats.max[h] = std::max(stats.max[h], e);
            ++counts[h];
        }
    }
    for (int h = 0; h < horizon; ++h)
        if (counts[h] > 0) stats.mean[h] /= counts[h];
    return stats;
}

}  // namespace dqk
