#pragma once

#include <random>

#include "dqk/rigid_body.hpp"

namespace dqk::test {

class Random {
public:
    explicit Random(std::uint64_t seed = 12345) : rng_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    Vec3 vec3(double lo = -1.0, double hi = 1.0) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
    Quaternion quat(double lo = -1.0, double hi = 1.0) { return {vec3(lo, hi), uniform(lo, hi)}; }
    DualQuaternion dual_quat(double lo = -1.0, double hi = 1.0) { return {quat(lo, hi), quat(lo, hi)}; }
    Quaternion unit_quat()
    {
        const Vec4 v(uniform(), uniform(), uniform(), uniform());
        return Quaternion(Vec4(v.normalized()));
    }
    DualQuaternion unit_pose(double t_range = 5.0) { return pose_from(unit_quat(), vec3(-t_range, t_range)); }
    ModifiedInput input(double amp = 1.0)
    {
        ModifiedInput u;
        for (int i = 0; i < 6; ++i) u(i) = uniform(-amp, amp);
        return u;
    }

private:
    std::mt19937_64 rng_;
};

/// Hamilton product through the left-multiplication matrix of a, used as an independent oracle.
inline Vec4 hamilton_oracle(const Vec4& a, const Vec4& b)
{
    const double x = a(0), y = a(1), z = a(2), w = a(3);
    Mat4 L;
    L << w, -z, y, x,
         z, w, -x, y,
        -y, x, w, z,
        -x, -y, -z, w;
    return L * b;
}

/// Body inertia used by the reference scenario.
inline Mat3 reference_inertia()
{
    Mat3 I;
    I << 1.0, 0.1, 0.15, 0.1, 0.63, 0.05, 0.15, 0.05, 0.85;
    return I;
}

}  // namespace dqk::test
