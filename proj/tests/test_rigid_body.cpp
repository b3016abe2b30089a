#include <doctest.h>

#include <cmath>

#include "dqk/rigid_body.hpp"
#include "support.hpp"

using namespace dqk;
using dqk::test::Random;

namespace {

InertiaMatrices mats_for(double mass, const Mat3& inertia)
{
    return dual_inertia_matrix(DualInertia(mass, inertia));
}

Quaternion reference_rotation()
{
    return Quaternion(Vec4(Vec4(0.4618, 0.1917, 0.7999, 0.3320).normalized()));
}

RigidBodyState reference_state()
{
    RigidBodyState s;
    s.pose = pose_from(reference_rotation(), {2, 2, 1});
    s.omega = {-0.1, 0.2, 0.3};
    s.vel = {0.1, -0.2, 0.3};
    return s;
}

/// Largest quaternion-component error of an RK4 pure spin about z against the analytic rotation,
/// divided by elapsed time.
double spin_error_rate(double dt, double t_end, double* max_error = nullptr)
{
    const InertiaMatrices mats = mats_for(1.0, Mat3::Identity());
    RigidBodyState s;
    s.omega = {0, 0, 1};
    const int steps = static_cast<int>(std::lround(t_end / dt));
    double rate = 0.0, worst = 0.0;
    for (int k = 1; k <= steps; ++k) {
        s = rk4_step_force(s, DualForce{}, dt, mats);
        const double t = k * dt;
        Vec8 exact = Vec8::Zero();
        exact(2) = std::sin(t / 2);
        exact(3) = std::cos(t / 2);
        const double e = (s.pose.coeffs() - exact).cwiseAbs().maxCoeff();
        worst = std::max(worst, e);
        rate = std::max(rate, e / t);
    }
    if (max_error) *max_error = worst;
    return rate;
}

}  // namespace

TEST_SUITE("rigid_body") {

TEST_CASE("dual inertia matrix")
{
    const InertiaMatrices unit = mats_for(1.0, Mat3::Identity());
    CHECK(unit.m.dense() == Mat8::Identity());
    CHECK(unit.m_inv.dense() == Mat8::Identity());

    const InertiaMatrices ref = mats_for(1.0, test::reference_inertia());
    CHECK(ref.m.m22.topLeftCorner<3, 3>() == test::reference_inertia());
    CHECK(ref.m.m11 == Mat4::Identity());
    CHECK((ref.m.dense() * ref.m_inv.dense() - Mat8::Identity()).cwiseAbs().maxCoeff() <= 1e-12);

    const InertiaMatrices diag = mats_for(2.0, Vec3(1, 2, 3).asDiagonal());
    Vec8 expect;
    expect << 0.5, 0.5, 0.5, 1, 1, 0.5, 1.0 / 3.0, 1;
    CHECK((diag.m_inv.dense().diagonal() - expect).cwiseAbs().maxCoeff() <= 1e-15);
    Mat8 off = diag.m_inv.dense();
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dual inertia validation")
{
    CHECK_THROWS_AS(DualInertia(0.0, Mat3::Identity()), std::invalid_argument);
    CHECK_THROWS_AS(DualInertia(-1.0, Mat3::Identity()), std::invalid_argument);
    Mat3 singular = Mat3::Identity();
    singular(2, 2) = 0.0;
    CHECK_THROWS_WITH_AS(DualInertia(1.0, singular), doctest::Contains("inertia"), std::invalid_argument);
    Mat3 asym = Mat3::Identity();
    asym(0, 1) = 0.2;
    CHECK_THROWS_AS(DualInertia(1.0, asym), std::invalid_argument);
}

TEST_CASE("pose_from and translation_from")
{
    const DualQuaternion id = pose_from(Quaternion::identity(), Vec3::Zero());
    CHECK(id.coeffs() == DualQuaternion::identity().coeffs());

    const DualQuaternion p = pose_from(Quaternion::identity(), {2, 2, 1});
    CHECK(p.dual().coeffs() == Vec4(1, 1, 0.5, 0));

    const DualQuaternion ref = pose_from(reference_rotation(), {2, 2, 1});
    CHECK((translation_from(ref) - Vec3(2, 2, 1)).norm() <= 1e-10);

    Random r(41);
    for (int n = 0; n < 500; ++n) {
        const Vec3 t = r.vec3(-10, 10);
        CHECK((translation_from(pose_from(r.unit_quat(), t)) - t).norm() <= 1e-10);
    }

    CHECK_THROWS_AS(pose_from(Quaternion({0, 0, 0}, 1.1), Vec3::Zero()), std::invalid_argument);
}

TEST_CASE("kinematics rate")
{
    RigidBodyState s;
    s.pose = pose_from(reference_rotation(), {2, 2, 1});
    CHECK(kinematics_rate(s).coeffs() == Vec8::Zero());

    RigidBodyState spin;
    spin.omega = {0, 0, 1};
    Vec8 expect = Vec8::Zero();
    expect(2) = 0.5;
    CHECK(kinematics_rate(spin).coeffs() == expect);

    // rates stay tangent to the unit constraint: the dual dot of rate and pose vanishes
    Random r(43);
    for (int n = 0; n < 1000; ++n) {
        RigidBodyState x;
        x.pose = r.unit_pose();
        x.omega = r.vec3(-3, 3);
        x.vel = r.vec3(-3, 3);
        const DualQuaternion d = dot(kinematics_rate(x), x.pose);
        CHECK(d.coeffs().cwiseAbs().maxCoeff() <= 1e-12);
        // the real part of the circle pairing also vanishes
        CHECK(std::abs(dot(kinematics_rate(x).real(), x.pose.real())) <= 1e-12);
    }
}

TEST_CASE("dynamics rate: torque-free and Euler equation oracles")
{
    const InertiaMatrices unit = mats_for(1.0, Mat3::Identity());
    RigidBodyState rest;
    CHECK(dynamics_rate(rest, DualForce{}, unit) == Vec6::Zero());

    Random r(47);
    RigidBodyState iso;
    iso.omega = r.vec3(-2, 2);
    CHECK(dynamics_rate(iso, DualForce{}, unit).cwiseAbs().maxCoeff() <= 1e-15);

    RigidBodyState s;
    s.omega = {1, 1, 1};
    const Vec6 rate = dynamics_rate(s, DualForce{}, mats_for(1.0, Vec3(1, 2, 3).asDiagonal()));
    CHECK((rate.head<3>() - Vec3(-1, 1, -1.0 / 3.0)).norm() <= 1e-14);
    CHECK(rate.tail<3>() == Vec3::Zero());
}

TEST_CASE("dynamics rate matches body-frame Newton-Euler equations")
{
    Random r(53);
    const Mat3 I = test::reference_inertia();
    const double m = 2.5;
    const InertiaMatrices mats = mats_for(m, I);
    for (int n = 0; n < 500; ++n) {
        RigidBodyState s;
        s.pose = r.unit_pose();
        s.omega = r.vec3(-2, 2);
        s.vel = r.vec3(-2, 2);
        const DualForce f{r.vec3(-3, 3), r.vec3(-3, 3)};
        const Vec3 w_dot = I.inverse() * (f.torque - s.omega.cross(I * s.omega));
        const Vec3 v_dot = f.force / m - s.omega.cross(s.vel);
        const Vec6 rate = dynamics_rate(s, f, mats);
        CHECK((rate.head<3>() - w_dot).norm() <= 1e-12);
        CHECK((rate.tail<3>() - v_dot).norm() <= 1e-12);
    }
}

TEST_CASE("modified input maps")
{
    Random r(59);
    const InertiaMatrices mats = mats_for(1.0, test::reference_inertia());

    RigidBodyState rest;
    rest.pose = r.unit_pose();
    const ModifiedInput u0 = r.input();
    const DualForce f0 = modified_to_force(u0, rest, mats);
    CHECK(f0.force == Vec3(u0.head<3>()));
    CHECK(f0.torque == Vec3(u0.tail<3>()));

    for (int n = 0; n < 1000; ++n) {
        RigidBodyState s;
        s.pose = r.unit_pose();
        s.omega = r.vec3(-3, 3);
        s.vel = r.vec3(-3, 3);
        const ModifiedInput u = r.input(5.0);
        CHECK((force_to_modified(modified_to_force(u, s, mats), s, mats) - u).cwiseAbs().maxCoeff() <= 1e-12);
        const Vec6 via_force = dynamics_rate(s, modified_to_force(u, s, mats), mats);
        CHECK((via_force - modified_dynamics_rate(u, mats)).cwiseAbs().maxCoeff() <= 1e-12);
    }

    RigidBodyState iso;
    iso.omega = r.vec3(-3, 3);
    const DualQuaternion g = gyroscopic_term(iso, mats_for(1.0, 2.0 * Mat3::Identity()).m);
    CHECK(g.dual().coeffs().cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("renormalize projects onto unit poses")
{
    Random r(61);
    for (int n = 0; n < 200; ++n) {
        const DualQuaternion p = renormalize(r.dual_quat());
        CHECK(unit_violation(p) <= 1e-15);
    }
    const DualQuaternion unit = r.unit_pose();
    CHECK((renormalize(unit).coeffs() - unit.coeffs()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("rk4: equilibrium is a fixed point")
{
    const InertiaMatrices mats = mats_for(1.0, test::reference_inertia());
    RigidBodyState s;
    s.pose = pose_from(reference_rotation(), {2, 2, 1});
    const RigidBodyState next = rk4_step(s, ModifiedInput::Zero(), 0.05, mats);
    CHECK((next.flatten() - s.flatten()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(rk4_step(s, ModifiedInput::Zero(), 0.0, mats), std::invalid_argument);
}

TEST_CASE("rk4: pure spin tracks the analytic rotation")
{
    double worst = 0.0;
    const double rate = spin_error_rate(0.05, 30.0, &worst);
    MESSAGE("max error ", worst, ", per unit time ", rate);
    CHECK(rate <= 1e-8);

    // held modified input reproduces the same spin for an arbitrary inertia when the input is zero
    const InertiaMatrices mats = mats_for(1.0, test::reference_inertia());
    RigidBodyState s;
    s.omega = {0, 0, 1};
    for (int k = 0; k < 20; ++k) s = rk4_step(s, ModifiedInput::Zero(), 0.05, mats);
    CHECK(std::abs(s.pose.real().coeffs()(2) - std::sin(0.5)) <= 1e-8 * 1.0);
}

TEST_CASE("rk4: global error is fourth order")
{
    double e1 = 0.0, e2 = 0.0;
    spin_error_rate(0.05, 30.0, &e1);
    spin_error_rate(0.025, 30.0, &e2);
    MESSAGE("error ratio ", e1 / e2);
    CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("rk4: unit-pose invariants hold after every step")
{
    Random r(67);
    const InertiaMatrices mats = mats_for(1.0, test::reference_inertia());
    RigidBodyState s = reference_state();
    double worst = 0.0;
    for (int k = 0; k < 600; ++k) {
        s = rk4_step(s, r.input(), 0.05, mats);
        worst = std::max(worst, unit_violation(s.pose));
    }
    CHECK(worst <= 1e-9);

    s = reference_state();
    worst = 0.0;
    for (int k = 0; k < 600; ++k) {
        s = rk4_step_force(s, DualForce{r.vec3(), r.vec3()}, 0.05, mats);
        worst = std::max(worst, unit_violation(s.pose));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("rk4: torque-free rotational energy is conserved")
{
    const DualInertia di(1.0, test::reference_inertia());
    const InertiaMatrices mats = dual_inertia_matrix(di);
    RigidBodyState s = reference_state();
    const double e0 = rotational_energy(s, di);
    double drift = 0.0;
    for (int k = 0; k < 600; ++k) {
        s = rk4_step_force(s, DualForce{}, 0.05, mats);
        drift = std::max(drift, std::abs(rotational_energy(s, di) - e0) / e0);
    }
    MESSAGE("relative energy drift ", drift);
    CHECK(drift <= 1e-7);
}

TEST_CASE("state flattening round trip")
{
    Random r(71);
    RigidBodyState s;
    s.pose = r.unit_pose();
    s.omega = r.vec3();
    s.vel = r.vec3();
    const Vec14 x = s.flatten();
    CHECK(RigidBodyState::unflatten(x).flatten() == x);
    CHECK(x.segment<3>(8) == s.omega);
    CHECK(x.tail<3>() == s.vel);
}

}  // TEST_SUITE
