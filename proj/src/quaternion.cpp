#include "dqk/quaternion.hpp"

#include <cmath>
#include <stdexcept>

namespace dqk {

Quaternion::Quaternion(const Vec3& vec, double scalar) : v_(vec), w_(scalar)
{
    if (!v_.allFinite() || !std::isfinite(w_))
        throw std::invalid_argument("quaternion component is not finite");
}

Quaternion::Quaternion(const Vec4& xyzw) : Quaternion(Vec3(xyzw.head<3>()), xyzw(3)) {}

Vec4 Quaternion::coeffs() const
{
    Vec4 out;
    out << v_, w_;
    return out;
}

Quaternion operator+(const Quaternion& a, const Quaternion& b)
{
    return {a.vec() + b.vec(), a.scalar() + b.scalar()};
}

Quaternion operator-(const Quaternion& a, const Quaternion& b)
{
    return {a.vec() - b.vec(), a.scalar() - b.scalar()};
}

Quaternion operator*(double s, const Quaternion& a) { return {s * a.vec(), s * a.scalar()}; }

Quaternion operator*(const Quaternion& a, const Quaternion& b)
{
    return {a.scalar() * b.vec() + b.scalar() * a.vec() + a.vec().cross(b.vec()),
            a.scalar() * b.scalar() - a.vec().dot(b.vec())};
}

Quaternion conj(const Quaternion& a) { return {-a.vec(), a.scalar()}; }

double dot(const Quaternion& a, const Quaternion& b)
{
    return a.scalar() * b.scalar() + a.vec().dot(b.vec());
}

Quaternion cross(const Quaternion& a, const Quaternion& b)
{
    return {b.scalar() * a.vec() + a.scalar() * b.vec() + a.vec().cross(b.vec()), 0.0};
}

double norm2(const Quaternion& a) { return dot(a, a); }
double norm(const Quaternion& a) { return std::sqrt(norm2(a)); }

DualQuaternion::DualQuaternion(const Vec8& v)
    : r_(Vec4(v.head<4>())), d_(Vec4(v.tail<4>()))
{
}

Vec8 DualQuaternion::coeffs() const
{
    Vec8 out;
    out << r_.coeffs(), d_.coeffs();
    return out;
}

DualQuaternion operator+(const DualQuaternion& a, const DualQuaternion& b)
{
    return {a.real() + b.real(), a.dual() + b.dual()};
}

DualQuaternion operator-(const DualQuaternion& a, const DualQuaternion& b)
{
    return {a.real() - b.real(), a.dual() - b.dual()};
}

DualQuaternion operator*(double s, const DualQuaternion& a) { return {s * a.real(), s * a.dual()}; }

DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b)
{
    return {a.real() * b.real(), a.real() * b.dual() + a.dual() * b.real()};
}

DualQuaternion conj(const DualQuaternion& a) { return {conj(a.real()), conj(a.dual())}; }
DualQuaternion swap(const DualQuaternion& a) { return {a.dual(), a.real()}; }

DualQuaternion dot(const DualQuaternion& a, const DualQuaternion& b)
{
    return {Quaternion(Vec3::Zero(), dot(a.real(), b.real())),
            Quaternion(Vec3::Zero(), dot(a.dual(), b.real()) + dot(a.real(), b.dual()))};
}

DualQuaternion cross(const DualQuaternion& a, const DualQuaternion& b)
{
    return {cross(a.real(), b.real()), cross(a.dual(), b.real()) + cross(a.real(), b.dual())};
}

double circle(const DualQuaternion& a, const DualQuaternion& b)
{
    return dot(a.real(), b.real()) + dot(a.dual(), b.dual());
}

double norm2(const DualQuaternion& a) { return circle(a, a); }
double norm(const DualQuaternion& a) { return std::sqrt(norm2(a)); }

DualNumber dual_norm2(const DualQuaternion& a)
{
    return {dot(a.real(), a.real()), 2.0 * dot(a.real(), a.dual())};
}

BlockMatrix8 BlockMatrix8::identity()
{
    BlockMatrix8 m;
    m.m11 = Mat4::Identity();
    m.m22 = Mat4::Identity();
    return m;
}

BlockMatrix8 BlockMatrix8::from_dense(const Mat8& d)
{
    if (!d.allFinite()) throw std::invalid_argument("block matrix entry is not finite");
    BlockMatrix8 m;
    m.m11 = d.topLeftCorner<4, 4>();
    m.m12 = d.topRightCorner<4, 4>();
    m.m21 = d.bottomLeftCorner<4, 4>();
    m.m22 = d.bottomRightCorner<4, 4>();
    return m;
}

Mat8 BlockMatrix8::dense() const
{
    Mat8 d;
    d << m11, m12, m21, m22;
    return d;
}

DualQuaternion matrix_star(const BlockMatrix8& m, const DualQuaternion& q)
{
    const Vec4 r = q.real().coeffs();
    const Vec4 d = q.dual().coeffs();
    return {Quaternion(Vec4(m.m11 * r + m.m12 * d)), Quaternion(Vec4(m.m21 * r + m.m22 * d))};
}

bool dq_norm_bound_check(const DualQuaternion& a, const DualQuaternion& b)
{
    return norm(a * b) <= std::sqrt(1.5) * norm(a) * norm(b) + 1e-12;
}

}  // namespace dqk
