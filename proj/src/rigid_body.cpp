#include "dqk/rigid_body.hpp"

#include <cmath>
#include <stdexcept>

namespace dqk {

Vec14 RigidBodyState::flatten() const
{
    Vec14 x;
    x << pose.coeffs(), omega, vel;
    return x;
}

RigidBodyState RigidBodyState::unflatten(const Vec14& x)
{
    RigidBodyState s;
    s.pose = DualQuaternion(Vec8(x.head<8>()));
    s.omega = x.segment<3>(8);
    s.vel = x.segment<3>(11);
    return s;
}

DualInertia::DualInertia(double mass, const Mat3& inertia) : mass_(mass), inertia_(inertia)
{
    if (!(mass > 0.0) || !std::isfinite(mass)) throw std::invalid_argument("mass must be positive");
    if (!inertia.allFinite()) throw std::invalid_argument("inertia entry is not finite");
    if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("inertia not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("inertia not positive definite");
}

InertiaMatrices dual_inertia_matrix(const DualInertia& di)
{
    Eigen::FullPivLU<Mat3> lu(di.inertia());
    if (!lu.isInvertible()) throw std::invalid_argument("inertia not invertible");

    InertiaMatrices out;
    out.m.m11.setIdentity();
    out.m.m11.topLeftCorner<3, 3>() *= di.mass();
    out.m.m22.setIdentity();
    out.m.m22.topLeftCorner<3, 3>() = di.inertia();

    out.m_inv.m11.setIdentity();
    out.m_inv.m11.topLeftCorner<3, 3>() /= di.mass();
    out.m_inv.m22.setIdentity();
    out.m_inv.m22.topLeftCorner<3, 3>() = lu.inverse();
    return out;
}

DualQuaternion pose_from(const Quaternion& q, const Vec3& t_body)
{
    if (std::abs(norm(q) - 1.0) > 1e-9) throw std::invalid_argument("rotation quaternion is not unit");
    return {q, 0.5 * (q * Quaternion::pure(t_body))};
}

Vec3 translation_from(const DualQuaternion& pose)
{
    return 2.0 * (conj(pose.real()) * pose.dual()).vec();
}

DualQuaternion kinematics_rate(const RigidBodyState& state)
{
    return 0.5 * (state.pose * state.twist());
}

DualQuaternion gyroscopic_term(const RigidBodyState& state, const BlockMatrix8& m)
{
    const DualQuaternion w = state.twist();
    return cross(w, matrix_star(m, swap(w)));
}

namespace {

DualQuaternion as_dual_force(const Vec3& force, const Vec3& torque)
{
    return DualQuaternion::pure(force, torque);
}

Vec6 twist_rate_from(const DualQuaternion& rhs, const BlockMatrix8& m_inv)
{
    const DualQuaternion w_dot = swap(matrix_star(m_inv, rhs));
    Vec6 out;
    out << w_dot.real().vec(), w_dot.dual().vec();
    return out;
}

}  // namespace

Vec6 dynamics_rate(const RigidBodyState& state, const DualForce& f, const InertiaMatrices& mats)
{
    const DualQuaternion rhs = as_dual_force(f.force, f.torque) - gyroscopic_term(state, mats.m);
    return twist_rate_from(rhs, mats.m_inv);
}

DualForce modified_to_force(const ModifiedInput& u, const RigidBodyState& state, const InertiaMatrices& mats)
{
    const DualQuaternion f =
        as_dual_force(u.head<3>(), u.tail<3>()) + gyroscopic_term(state, mats.m);
    return {f.real().vec(), f.dual().vec()};
}

ModifiedInput force_to_modified(const DualForce& f, const RigidBodyState& state, const InertiaMatrices& mats)
{
    const DualQuaternion u = as_dual_force(f.force, f.torque) - gyroscopic_term(state, mats.m);
    ModifiedInput out;
    out << u.real().vec(), u.dual().vec();
    return out;
}

Vec6 modified_dynamics_rate(const ModifiedInput& u, const InertiaMatrices& mats)
{
    return twist_rate_from(as_dual_force(u.head<3>(), u.tail<3>()), mats.m_inv);
}

DualQuaternion renormalize(const DualQuaternion& pose)
{
    const Vec4 r = pose.real().coeffs();
    const double n = r.norm();
    if (!(n > 0.0)) throw std::runtime_error("pose real part vanished");
    const Vec4 ru = r / n;
    Vec4 d = pose.dual().coeffs() / n;
    d -= ru.dot(d) * ru;
    return {Quaternion(ru), Quaternion(d)};
}

namespace {

template <typename TwistRate>
RigidBodyState integrate(const RigidBodyState& state, double dt, TwistRate&& twist_rate)
{
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    auto field = [&](const Vec14& x) {
        const RigidBodyState s = RigidBodyState::unflatten(x);
        Vec14 dx;
        dx << kinematics_rate(s).coeffs(), twist_rate(s);
        return dx;
    };
    const Vec14 x = state.flatten();
    const Vec14 k1 = field(x);
    const Vec14 k2 = field(x + 0.5 * dt * k1);
    const Vec14 k3 = field(x + 0.5 * dt * k2);
    const Vec14 k4 = field(x + dt * k3);
    RigidBodyState next = RigidBodyState::unflatten(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    next.pose = renormalize(next.pose);
    return next;
}

}  // namespace

RigidBodyState rk4_step(const RigidBodyState& state, const ModifiedInput& u, double dt,
                        const InertiaMatrices& mats)
{
    const Vec6 a = modified_dynamics_rate(u, mats);
    return integrate(state, dt, [&](const RigidBodyState&) { return a; });
}

RigidBodyState rk4_step_force(const RigidBodyState& state, const DualForce& f, double dt,
                              const InertiaMatrices& mats)
{
    return integrate(state, dt, [&](const RigidBodyState& s) { return dynamics_rate(s, f, mats); });
}

double unit_violation(const DualQuaternion& pose)
{
    const DualNumber n = dual_norm2(pose);
    return std::max(std::abs(n.real - 1.0), std::abs(0.5 * n.dual));
}

double rotational_energy(const RigidBodyState& state, const DualInertia& di)
{
    return 0.5 * state.omega.dot(di.inertia() * state.omega);
}

}  // namespace dqk
