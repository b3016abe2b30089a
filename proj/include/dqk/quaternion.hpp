#pragma once

#include <Eigen/Dense>

namespace dqk {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat8 = Eigen::Matrix<double, 8, 8>;

/// Quaternion stored as a (vector, scalar) pair.
///
/// The 4-vector form is [x, y, z, w] with the scalar last. Construction
/// rejects NaN and infinite components with std::invalid_argument.
class Quaternion {
public:
    Quaternion() : v_(Vec3::Zero()), w_(0.0) {}
    Quaternion(const Vec3& vec, double scalar);
    explicit Quaternion(const Vec4& xyzw);

    static Quaternion identity() { return {Vec3::Zero(), 1.0}; }
    static Quaternion pure(const Vec3& vec) { return {vec, 0.0}; }

    const Vec3& vec() const { return v_; }
    double scalar() const { return w_; }
    Vec4 coeffs() const;

private:
    Vec3 v_;
    double w_;
};

Quaternion operator+(const Quaternion& a, const Quaternion& b);
Quaternion operator-(const Quaternion& a, const Quaternion& b);
Quaternion operator*(double s, const Quaternion& a);
/// Hamilton product.
Quaternion operator*(const Quaternion& a, const Quaternion& b);

Quaternion conj(const Quaternion& a);
/// Scalar value of the dot product a4*b4 + a.b.
double dot(const Quaternion& a, const Quaternion& b);
/// Quaternion cross product (b4 a + a4 b + a x b, 0).
Quaternion cross(const Quaternion& a, const Quaternion& b);
double norm2(const Quaternion& a);
double norm(const Quaternion& a);

/// Dual quaternion q_r + eps q_d.
class DualQuaternion {
public:
    DualQuaternion() = default;
    DualQuaternion(const Quaternion& real, const Quaternion& dual) : r_(real), d_(dual) {}
    /// From the 8-vector layout [q_r vec; q_r4; q_d vec; q_d4].
    explicit DualQuaternion(const Vec8& v);

    static DualQuaternion identity() { return {Quaternion::identity(), Quaternion()}; }
    static DualQuaternion zero() { return {}; }
    /// Pure dual quaternion (a, 0) + eps (b, 0).
    static DualQuaternion pure(const Vec3& a, const Vec3& b)
    {
        return {Quaternion::pure(a), Quaternion::pure(b)};
    }

    const Quaternion& real() const { return r_; }
    const Quaternion& dual() const { return d_; }
    Vec8 coeffs() const;

private:
    Quaternion r_;
    Quaternion d_;
};

DualQuaternion operator+(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion operator-(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion operator*(double s, const DualQuaternion& a);
DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b);

DualQuaternion conj(const DualQuaternion& a);
DualQuaternion swap(const DualQuaternion& a);
/// Dual-number dot product; real part a_r.b_r, dual part a_d.b_r + a_r.b_d.
DualQuaternion dot(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion cross(const DualQuaternion& a, const DualQuaternion& b);
/// Circle product a_r.b_r + a_d.b_d.
double circle(const DualQuaternion& a, const DualQuaternion& b);
double norm2(const DualQuaternion& a);
double norm(const DualQuaternion& a);

/// Dual norm squared as (real, dual) = (a_r.a_r, 2 a_r.a_d).
struct DualNumber {
    double real;
    double dual;
};
DualNumber dual_norm2(const DualQuaternion& a);

/// 8x8 matrix split into four 4x4 blocks acting on the 8-vector layout.
struct BlockMatrix8 {
    Mat4 m11 = Mat4::Zero();
    Mat4 m12 = Mat4::Zero();
    Mat4 m21 = Mat4::Zero();
    Mat4 m22 = Mat4::Zero();

    static BlockMatrix8 identity();
    static BlockMatrix8 from_dense(const Mat8& m);
    Mat8 dense() const;
};

/// (M11 q_r + M12 q_d) + eps (M21 q_r + M22 q_d).
DualQuaternion matrix_star(const BlockMatrix8& m, const DualQuaternion& q);

/// Checks ||ab|| <= sqrt(3/2) ||a|| ||b|| + 1e-12.
bool dq_norm_bound_check(const DualQuaternion& a, const DualQuaternion& b);

}  // namespace dqk
