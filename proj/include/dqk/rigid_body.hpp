#pragma once

#include "dqk/quaternion.hpp"

namespace dqk {

using Vec14 = Eigen::Matrix<double, 14, 1>;

/// Pose plus body-frame twist.
///
/// Flattened as [pose 8-vector; omega; vel].
struct RigidBodyState {
    DualQuaternion pose = DualQuaternion::identity();
    Vec3 omega = Vec3::Zero();
    Vec3 vel = Vec3::Zero();

    Vec14 flatten() const;
    static RigidBodyState unflatten(const Vec14& x);
    /// Body twist (omega, 0) + eps (vel, 0).
    DualQuaternion twist() const { return DualQuaternion::pure(omega, vel); }
};

/// Mass and body inertia. The constructor validates positivity and symmetry.
class DualInertia {
public:
    DualInertia(double mass, const Mat3& inertia);

    double mass() const { return mass_; }
    const Mat3& inertia() const { return inertia_; }

private:
    double mass_;
    Mat3 inertia_;
};

/// Applied force and torque in the body frame.
struct DualForce {
    Vec3 force = Vec3::Zero();
    Vec3 torque = Vec3::Zero();
};

/// Modified input flattened as [force part; torque part].
using ModifiedInput = Vec6;

/// Dual inertia matrix and its blockwise inverse.
struct InertiaMatrices {
    BlockMatrix8 m;
    BlockMatrix8 m_inv;
};

InertiaMatrices dual_inertia_matrix(const DualInertia& di);

/// Pose q + eps 1/2 q t for a unit rotation q and body-frame translation t.
DualQuaternion pose_from(const Quaternion& q, const Vec3& t_body);
/// Body-frame translation 2 q_r* q_d.
Vec3 translation_from(const DualQuaternion& pose);

/// Pose rate 1/2 q w.
DualQuaternion kinematics_rate(const RigidBodyState& state);

/// Gyroscopic term w x (M * w^s).
DualQuaternion gyroscopic_term(const RigidBodyState& state, const BlockMatrix8& m);

/// Twist rate [omega_dot; vel_dot] under an applied dual force.
Vec6 dynamics_rate(const RigidBodyState& state, const DualForce& f, const InertiaMatrices& mats);

DualForce modified_to_force(const ModifiedInput& u, const RigidBodyState& state, const InertiaMatrices& mats);
ModifiedInput force_to_modified(const DualForce& f, const RigidBodyState& state, const InertiaMatrices& mats);

/// Twist rate [omega_dot; vel_dot] = (M^-1 * u)^s for a modified input.
Vec6 modified_dynamics_rate(const ModifiedInput& u, const InertiaMatrices& mats);

/// Scale q_r to unit length and remove the q_r component of q_d.
DualQuaternion renormalize(const DualQuaternion& pose);

/// One classical RK4 step with the input held over [0, dt], followed by pose renormalization.
RigidBodyState rk4_step(const RigidBodyState& state, const ModifiedInput& u, double dt,
                        const InertiaMatrices& mats);

/// RK4 step of the full Newton-Euler dynamics with the physical dual force held over [0, dt].
RigidBodyState rk4_step_force(const RigidBodyState& state, const DualForce& f, double dt,
                              const InertiaMatrices& mats);

/// Largest violation of |q_r.q_r - 1| and |q_r.q_d|.
double unit_violation(const DualQuaternion& pose);

/// Rotational kinetic energy 1/2 w^T I w.
double rotational_energy(const RigidBodyState& state, const DualInertia& di);

}  // namespace dqk
