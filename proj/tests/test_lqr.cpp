#include <doctest.h>

#include <cmath>

#include "dqk/errors.hpp"
#include "dqk/lqr.hpp"
#include "dqk/scenario.hpp"
#include "support.hpp"

using namespace dqk;
using dqk::test::Random;

namespace {

Eigen::MatrixXd mat1(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

Eigen::MatrixXd random_matrix(Random& r, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = r.uniform();
    return m;
}

const ScenarioConfig& scenario()
{
    static const ScenarioConfig cfg = parse_scenario(default_config_text());
    return cfg;
}

}  // namespace

TEST_SUITE("lqr_control") {

TEST_CASE("scalar golden-ratio Riccati solution")
{
    const DareSolution s = solve_dare(mat1(1), mat1(1), mat1(1), mat1(1));
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::abs(s.P(0, 0) - phi) <= 1e-10);
    CHECK(s.residual < 1e-9);
    const Eigen::MatrixXd K = gain(mat1(1), mat1(1), mat1(1), s.P);
    CHECK(std::abs(K(0, 0) - 1.0 / phi) <= 1e-10);
    CHECK(std::abs(K(0, 0) - 0.6180339887) <= 1e-10);
}

TEST_CASE("degenerate plants")
{
    Random r(139);
    const Eigen::MatrixXd B = random_matrix(r, 3, 2);
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(3, 3) * 2.0;
    const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(2, 2);

    const DareSolution zero_a = solve_dare(Eigen::MatrixXd::Zero(3, 3), B, Q, R);
    CHECK(zero_a.P == Q);
    CHECK(zero_a.iterations == 1);
    CHECK(gain(Eigen::MatrixXd::Zero(3, 3), B, R, zero_a.P).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd A = 0.5 * Eigen::MatrixXd::Identity(3, 3);
    const DareSolution no_b = solve_dare(A, Eigen::MatrixXd::Zero(3, 2), Q, R, 1e-12);
    CHECK((no_b.P - Q / 0.75).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(gain(A, Eigen::MatrixXd::Zero(3, 2), R, no_b.P).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Riccati errors")
{
    CHECK_THROWS_WITH_AS(solve_dare(mat1(1), mat1(1), mat1(1), mat1(1), 1e-9, 3), "DARE not converged",
                         NumericalError);
    try {
        solve_dare(mat1(1), mat1(0), mat1(1), mat1(0));
        FAIL("expected a singular inner matrix");
    } catch (const NumericalError& e) {
        CHECK(e.module() == "lqr_control");
    }
    CHECK_THROWS_AS(gain(mat1(1), mat1(0), mat1(0), mat1(1)), NumericalError);
    CHECK_THROWS_AS(solve_dare(Eigen::MatrixXd::Identity(2, 2), mat1(1), mat1(1), mat1(1)), std::invalid_argument);
}

TEST_CASE("Riccati solution properties on random plants")
{
    Random r(149);
    for (int n = 0; n < 50; ++n) {
        const Eigen::MatrixXd A = 1.2 * random_matrix(r, 5, 5), B = random_matrix(r, 5, 2);
        const Eigen::MatrixXd C = random_matrix(r, 5, 5);
        const Eigen::MatrixXd Q = C.transpose() * C, R = Eigen::MatrixXd::Identity(2, 2);
        const DareSolution s = solve_dare(A, B, Q, R);
        CHECK(s.residual < 1e-8);
        CHECK((s.P - s.P.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.P).eigenvalues().minCoeff() >= -1e-10);
        const Eigen::MatrixXd K = gain(A, B, R, s.P);
        CHECK(spectral_radius(A - B * K) < 1.0);

        // same gain when both weights are scaled
        const DareSolution s7 = solve_dare(A, B, 7.0 * Q, 7.0 * R, 1e-13);
        const DareSolution s1 = solve_dare(A, B, Q, R, 1e-13);
        CHECK((gain(A, B, 7.0 * R, s7.P) - gain(A, B, R, s1.P)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("standard weights")
{
    const LqrWeights w = LqrWeights::standard(54);
    CHECK(w.Q.rows() == 54);
    CHECK(w.Q.topLeftCorner(16, 16) == 5.0 * Eigen::MatrixXd::Identity(16, 16));
    CHECK(w.Q.bottomRightCorner(38, 38).cwiseAbs().maxCoeff() == 0.0);
    CHECK(w.R == Eigen::MatrixXd::Identity(6, 6));
    CHECK_NOTHROW(w.validate());
    CHECK(LqrWeights::standard(8).Q == 5.0 * Eigen::MatrixXd::Identity(8, 8));

    LqrWeights bad = w;
    bad.R(0, 0) = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("trajectory cost expansion")
{
    const LqrWeights w = LqrWeights::standard(54);
    ClosedLoopLog empty;
    CHECK(trajectory_cost(empty, w) == 0.0);

    Random r(151);
    ClosedLoopLog log;
    StepRecord rec;
    rec.z = random_matrix(r, 54, 1);
    rec.u = r.input();
    log.steps.push_back(rec);
    const double expect = 5.0 * rec.z.head(16).squaredNorm() + rec.u.squaredNorm();
    CHECK(trajectory_cost(log, w) == doctest::Approx(expect).epsilon(1e-14));

    StepRecord zero;
    zero.z = Eigen::VectorXd::Zero(54);
    zero.u.setZero();
    ClosedLoopLog zeros;
    zeros.steps.assign(5, zero);
    CHECK(trajectory_cost(zeros, w) == 0.0);
}

TEST_CASE("the Riccati design on the identified rigid-body model")
{
    const ControlSettings cfg = scenario().control_settings();
    const InertiaMatrices mats = scenario().inertia_matrices();
    const DataSet data = identification_data(scenario().initial_state(), cfg, mats, 0);
    const Dictionary dict = make_dictionary(cfg, data);
    const LiftedLinearModel model = fit(data, dict, cfg.pinv_rtol);
    const LqrWeights w = LqrWeights::standard(dict.dimension(), cfg.q_weight, cfg.q_dim, cfg.r_weight);
    const DareSolution s = solve_dare(model.A, model.B, w.Q, w.R, cfg.dare_tol, cfg.dare_max_iter);
    MESSAGE("residual ", s.residual, ", iterations ", s.iterations);
    CHECK(s.residual < 1e-8);
    CHECK(spectral_radius(model.A - model.B * gain(model.A, model.B, w.R, s.P)) < 1.0);
}

TEST_CASE("equilibrium start stays at the setpoint")
{
    ControlSettings cfg = scenario().control_settings();
    const InertiaMatrices mats = scenario().inertia_matrices();
    const ClosedLoopLog log = run_closed_loop(RigidBodyState{}, cfg, mats);
    CHECK(log.steps.size() == 600);
    double u_max = 0.0;
    for (const auto& s : log.steps) u_max = std::max(u_max, s.u.cwiseAbs().maxCoeff());
    CHECK(u_max == 0.0);
    CHECK(log.final_state.flatten() == RigidBodyState{}.flatten());
    // only the unit scalar of the identity pose is weighted
    CHECK(log.cost == doctest::Approx(5.0 * 600).epsilon(1e-14));
}

TEST_CASE("closed-loop log integrity")
{
    ControlSettings cfg = scenario().control_settings("derived", 0);
    const InertiaMatrices mats = scenario().inertia_matrices();
    const RigidBodyState x0 = scenario().initial_state();
    const ClosedLoopLog log = run_closed_loop(x0, cfg, mats);
    CHECK(log.steps.size() == 600);
    CHECK(log.refits.size() == 2);
    CHECK(log.refits[1].step == 500);

    const LqrWeights w = LqrWeights::standard(log.steps.front().z.size(), cfg.q_weight, cfg.q_dim, cfg.r_weight);
    CHECK(std::abs(trajectory_cost(log, w) - log.cost) <= 1e-10 * log.cost);
    CHECK(log.steps.back().cumulative_cost == log.cost);

    // replaying the logged inputs through the plant reproduces the logged states
    RigidBodyState x = x0;
    double worst = 0.0;
    for (std::size_t k = 0; k < log.steps.size(); ++k) {
        worst = std::max(worst, (x.flatten() - log.steps[k].state.flatten()).cwiseAbs().maxCoeff());
        const DualForce& f = log.steps[k].force;
        const ModifiedInput u = force_to_modified(f, x, mats);
        CHECK((u - log.steps[k].u).cwiseAbs().maxCoeff() <= 1e-12);
        x = rk4_step(x, log.steps[k].u, cfg.dt, mats);
    }
    worst = std::max(worst, (x.flatten() - log.final_state.flatten()).cwiseAbs().maxCoeff());
    CHECK(worst <= 1e-12);

    for (const auto& rf : log.refits) {
        CHECK(rf.dare_residual < 1e-8);
        CHECK(rf.spectral_radius < 1.0);
    }
}

TEST_CASE("closed loop is deterministic and seed dependent")
{
    const InertiaMatrices mats = scenario().inertia_matrices();
    const RigidBodyState x0 = scenario().initial_state();
    ControlSettings cfg = scenario().control_settings("derived", 0);
    cfg.n_total = 100;
    const ClosedLoopLog a = run_closed_loop(x0, cfg, mats), b = run_closed_loop(x0, cfg, mats);
    CHECK(a.cost == b.cost);
    CHECK(a.final_state.flatten() == b.final_state.flatten());
    cfg.seed = 2;
    CHECK(run_closed_loop(x0, cfg, mats).cost != a.cost);
    CHECK(derive_seed(1, 1, 0) != derive_seed(1, 1, 1));
    CHECK(derive_seed(1, 1, 0) != derive_seed(1, 2, 0));
    CHECK(derive_seed(1, 1, 0) == derive_seed(1, 1, 0));
}

TEST_CASE("Riccati failure reports the step")
{
    ControlSettings cfg = scenario().control_settings("derived", 0);
    cfg.dare_max_iter = 2;
    try {
        run_closed_loop(scenario().initial_state(), cfg, scenario().inertia_matrices());
        FAIL("expected a Riccati failure");
    } catch (const NumericalError& e) {
        CHECK(e.module() == "lqr_control");
        CHECK(std::string(e.what()).find("at step 0") != std::string::npos);
    }

    ControlSettings bad = cfg;
    bad.n_total = 0;
    CHECK_THROWS_AS(run_closed_loop(scenario().initial_state(), bad, scenario().inertia_matrices()),
                    std::invalid_argument);
}

TEST_CASE("stabilization verdict is stable across data seeds for the pose-only lift")
{
    const InertiaMatrices mats = scenario().inertia_matrices();
    const RigidBodyState x0 = scenario().initial_state();
    std::vector<double> costs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ControlSettings cfg = scenario().control_settings("derived", 0);
        cfg.seed = seed;
        const ClosedLoopLog log = run_closed_loop(x0, cfg, mats);
        CHECK(translation_from(log.final_state.pose).norm() < 0.05 * 3.0);
        CHECK(log.final_state.omega.norm() < 0.05);
        CHECK(log.final_state.vel.norm() < 0.05);
        costs.push_back(log.cost);
    }
    CHECK(costs[0] != costs[1]);
}

}  // TEST_SUITE
