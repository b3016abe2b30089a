#pragma once

#include <cstdint>
#include <vector>

#include "dqk/edmd.hpp"

namespace dqk {

struct LqrWeights {
    Eigen::MatrixXd Q;
    Eigen::MatrixXd R;

    /// q_weight * I on the first min(q_dim, n_z) coordinates, r_weight * I_6.
    static LqrWeights standard(int n_z, double q_weight = 5.0, int q_dim = 16, double r_weight = 1.0);
    void validate() const;
};

struct DareSolution {
    Eigen::MatrixXd P;
    double residual = 0.0;  ///< ||P - F(P)||_F / ||P||_F
    int iterations = 0;
};

/// One Riccati map F(P) = A'PA - A'PB (R + B'PB)^-1 B'PA + Q.
Eigen::MatrixXd dare_map(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                         const Eigen::MatrixXd& R, const Eigen::MatrixXd& P);

/// Fixed-point iteration of the Riccati map from P = Q.
DareSolution solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                        const Eigen::MatrixXd& R, double tol = 1e-9, int max_iter = 100000);

/// K = (R + B'PB)^-1 B'PA.
Eigen::MatrixXd gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& P);

double spectral_radius(const Eigen::MatrixXd& m);

/// Settings of the data-driven closed loop.
struct ControlSettings {
    Dictionary::Kind dictionary = Dictionary::Kind::Derived;
    ObservableConfig observables;
    int rbf_centers = 0;  ///< number of Gaussian centers for the RBF dictionary
    double rbf_width = 1.0;

    double dt = 0.05;
    int n_total = 600;
    int n_refit = 500;

    int n_data = 500;         ///< transitions per identification experiment
    double amplitude = 1.0;   ///< excitation half-range
    double pinv_rtol = 1e-10;
    bool recenter = false;    ///< run identification from the setpoint pose with the current twist

    double q_weight = 5.0;
    int q_dim = 16;
    double r_weight = 1.0;
    double dare_tol = 1e-9;
    int dare_max_iter = 100000;

    std::uint64_t seed = 1;

    void validate() const;
};

struct StepRecord {
    double time = 0.0;
    RigidBodyState state;
    Eigen::VectorXd z;
    ModifiedInput u;
    DualForce force;
    double stage_cost = 0.0;
    double cumulative_cost = 0.0;
};

struct RefitRecord {
    int step = 0;
    int dare_iterations = 0;
    double dare_residual = 0.0;
    double spectral_radius = 0.0;
    double fit_residual = 0.0;
};

struct ClosedLoopLog {
    std::vector<StepRecord> steps;
    std::vector<RefitRecord> refits;
    RigidBodyState final_state;
    double cost = 0.0;
};

/// Excitation data for the identification experiment at closed-loop step `step`.
DataSet identification_data(const RigidBodyState& x, const ControlSettings& cfg, const InertiaMatrices& mats,
                            int step);

/// Identification experiment used by the closed loop at `step`.
LiftedLinearModel identify(const RigidBodyState& x, const Dictionary& dict, const ControlSettings& cfg,
                           const InertiaMatrices& mats, int step);

/// Dictionary for the settings; RBF centers are drawn from `data` with a dedicated stream.
Dictionary make_dictionary(const ControlSettings& cfg, const DataSet& data);

/// Receding identification loop: identify, solve the LQR problem, apply u = -K (z - z_ref) and refit periodically.
///
/// z_ref is the lift of the setpoint (identity pose, zero twist). Failures raise
/// NumericalError carrying the step index.
ClosedLoopLog run_closed_loop(const RigidBodyState& x0, const ControlSettings& cfg, const InertiaMatrices& mats);

/// J = sum of z'Qz + u'Ru over the logged steps.
double trajectory_cost(const ClosedLoopLog& log, const LqrWeights& weights);

/// Per-component seed derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0);

}  // namespace dqk
