#include "dqk/lqr.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "dqk/errors.hpp"

namespace dqk {

LqrWeights LqrWeights::standard(int n_z, double q_weight, int q_dim, double r_weight)
{
    LqrWeights w;
    w.Q = Eigen::MatrixXd::Zero(n_z, n_z);
    const int k = std::min(q_dim, n_z);
    w.Q.topLeftCorner(k, k).diagonal().setConstant(q_weight);
    w.R = r_weight * Eigen::MatrixXd::Identity(6, 6);
    return w;
}

void LqrWeights::validate() const
{
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("Q not symmetric");
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("R not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(Q), er(R);
    if (eq.eigenvalues().minCoeff() < -1e-12) throw std::invalid_argument("Q not positive semidefinite");
    if (er.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("R not positive definite");
}

namespace {

Eigen::LDLT<Eigen::MatrixXd> inner_factor(const Eigen::MatrixXd& B, const Eigen::MatrixXd& R,
                                          const Eigen::MatrixXd& P)
{
    Eigen::LDLT<Eigen::MatrixXd> ldlt(R + B.transpose() * P * B);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().cwiseAbs().maxCoeff()))
        throw NumericalError("lqr_control", "R + B'PB is singular");
    return ldlt;
}

}  // namespace

Eigen::MatrixXd dare_map(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                         const Eigen::MatrixXd& R, const Eigen::MatrixXd& P)
{
    const Eigen::MatrixXd bpa = B.transpose() * P * A;
    Eigen::MatrixXd next = A.transpose() * P * A - bpa.transpose() * inner_factor(B, R, P).solve(bpa) + Q;
    return 0.5 * (next + next.transpose());
}

DareSolution solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                        const Eigen::MatrixXd& R, double tol, int max_iter)
{
    if (A.rows() != A.cols() || B.rows() != A.rows() || Q.rows() != A.rows() || R.rows() != B.cols())
        throw std::invalid_argument("DARE dimension mismatch");

    DareSolution sol;
    sol.P = Q;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::MatrixXd next = dare_map(A, B, Q, R, sol.P);
        if (!next.allFinite()) throw NumericalError("lqr_control", "DARE iteration produced non-finite values");
        const double scale = std::max(next.norm(), 1e-300);
        const double change = (next - sol.P).norm() / scale;
        sol.P = std::move(next);
        sol.iterations = it;
        if (change < tol) {
            sol.residual = (sol.P - dare_map(A, B, Q, R, sol.P)).norm() / std::max(sol.P.norm(), 1e-300);
            return sol;
        }
    }
    throw NumericalError("lqr_control", "DARE not converged");
}

Eigen::MatrixXd gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& P)
{
    return inner_factor(B, R, P).solve(B.transpose() * P * A);
}

double spectral_radius(const Eigen::MatrixXd& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

void ControlSettings::validate() const
{
    if (dictionary == Dictionary::Kind::Derived) observables.validate();
    if (rbf_centers < 0) throw std::invalid_argument("rbf center count must be non-negative");
    if (!(rbf_width > 0.0)) throw std::invalid_argument("rbf width must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (n_total < 1) throw std::invalid_argument("horizon must be at least 1 step");
    if (n_refit < 1) throw std::invalid_argument("refit period must be at least 1 step");
    if (n_data < 1) throw std::invalid_argument("identification length must be at least 1 step");
    if (!(amplitude > 0.0)) throw std::invalid_argument("excitation amplitude must be positive");
    if (!(pinv_rtol >= 0.0)) throw std::invalid_argument("pseudoinverse tolerance must be non-negative");
    if (!(q_weight >= 0.0) || q_dim < 0) throw std::invalid_argument("invalid state weight");
    if (!(r_weight > 0.0)) throw std::invalid_argument("input weight must be positive");
    if (!(dare_tol > 0.0) || dare_max_iter < 1) throw std::invalid_argument("invalid DARE settings");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kRbfStream = 2;

RigidBodyState setpoint() { return RigidBodyState{}; }

}  // namespace

Dictionary make_dictionary(const ControlSettings& cfg, const DataSet& data)
{
    if (cfg.dictionary == Dictionary::Kind::Derived) return Dictionary::derived(cfg.observables);

    RbfDictionary rbf;
    rbf.width = cfg.rbf_width;
    const auto n = static_cast<std::size_t>(data.size());
    if (static_cast<std::size_t>(cfg.rbf_centers) > n)
        throw std::invalid_argument("more rbf centers requested than training states");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(derive_seed(cfg.seed, kRbfStream));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i = 0; i < cfg.rbf_centers; ++i)
        rbf.centers.push_back(Vec14(data.X.col(static_cast<Eigen::Index>(idx[i]))));
    return Dictionary::rbf(rbf);
}

namespace {

RigidBodyState identification_origin(const RigidBodyState& x, const ControlSettings& cfg)
{
    if (!cfg.recenter) return x;
    RigidBodyState origin = x;
    origin.pose = DualQuaternion::identity();
    return origin;
}

}  // namespace

DataSet identification_data(const RigidBodyState& x, const ControlSettings& cfg, const InertiaMatrices& mats,
                            int step)
{
    std::optional<ObservableConfig> bounds;
    if (cfg.dictionary == Dictionary::Kind::Derived && cfg.observables.order > 0) bounds = cfg.observables;
    try {
        return generate_data(identification_origin(x, cfg), cfg.n_data, cfg.amplitude,
                             derive_seed(cfg.seed, kDataStream, static_cast<std::uint64_t>(step)), cfg.dt,
                             mats, bounds);
    } catch (const std::domain_error& e) {
        throw NumericalError("edmd", std::string(e.what()) + " (identification at step " +
                                         std::to_string(step) + ")");
    }
}

namespace {

struct Design {
    LiftedLinearModel model;
    Eigen::MatrixXd K;
    RefitRecord record;
};

Design design(const LiftedLinearModel& model, const LqrWeights& w, const ControlSettings& cfg, int step)
{
    Design d{model, {}, {}};
    try {
        const DareSolution sol = solve_dare(model.A, model.B, w.Q, w.R, cfg.dare_tol, cfg.dare_max_iter);
        d.K = gain(model.A, model.B, w.R, sol.P);
        d.record = {step, sol.iterations, sol.residual, spectral_radius(model.A - model.B * d.K),
                    model.residual};
    } catch (const NumericalError& e) {
        throw NumericalError(e.module(), std::string(e.what()) + " at step " + std::to_string(step));
    }
    return d;
}

}  // namespace

LiftedLinearModel identify(const RigidBodyState& x, const Dictionary& dict, const ControlSettings& cfg,
                           const InertiaMatrices& mats, int step)
{
    return fit(identification_data(x, cfg, mats, step), dict, cfg.pinv_rtol);
}

ClosedLoopLog run_closed_loop(const RigidBodyState& x0, const ControlSettings& cfg, const InertiaMatrices& mats)
{
    cfg.validate();

    const DataSet first = identification_data(x0, cfg, mats, 0);
    const Dictionary dict = make_dictionary(cfg, first);
    const LqrWeights w = LqrWeights::standard(dict.dimension(), cfg.q_weight, cfg.q_dim, cfg.r_weight);
    Design d = design(fit(first, dict, cfg.pinv_rtol), w, cfg, 0);

    ClosedLoopLog log;
    log.refits.push_back(d.record);
    const Eigen::VectorXd z_ref = dict.lift(setpoint());

    RigidBodyState x = x0;
    for (int k = 1; k <= cfg.n_total; ++k) {
        StepRecord rec;
        rec.time = (k - 1) * cfg.dt;
        rec.state = x;
        try {
            rec.z = dict.lift(x);
        } catch (const std::domain_error& e) {
            throw NumericalError("observables", std::string(e.what()) + " at step " + std::to_string(k));
        }
        rec.u = -d.K * (rec.z - z_ref);
        rec.force = modified_to_force(rec.u, x, mats);
        rec.stage_cost = rec.z.dot(w.Q * rec.z) + rec.u.dot(w.R * rec.u);
        log.cost += rec.stage_cost;
        rec.cumulative_cost = log.cost;
        log.steps.push_back(rec);

        try {
            x = rk4_step(x, rec.u, cfg.dt, mats);
        } catch (const std::exception&) {
            throw NumericalError("rigid_body", "closed loop diverged at step " + std::to_string(k));
        }
        if (!x.flatten().allFinite())
            throw NumericalError("rigid_body", "closed loop diverged at step " + std::to_string(k));

        if (k % cfg.n_refit == 0 && k < cfg.n_total) {
            d = design(identify(x, dict, cfg, mats, k), w, cfg, k);
            log.refits.push_back(d.record);
        }
    }
    log.final_state = x;
    return log;
}

double trajectory_cost(const ClosedLoopLog& log, const LqrWeights& weights)
{
    double j = 0.0;
    for (const auto& s : log.steps) j += s.z.dot(weights.Q * s.z) + s.u.dot(weights.R * s.u);
    return j;
}

}  // namespace dqk
