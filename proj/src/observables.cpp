#include "dqk/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace dqk {

double ObservableConfig::scale() const { return normalized ? std::max(omega0, v0) : 1.0; }

void ObservableConfig::validate() const
{
    if (order < 0) throw std::invalid_argument("observable order must be non-negative");
    if (normalized && !(omega0 > 0.0 && v0 > 0.0))
        throw std::invalid_argument("velocity bounds must be positive");
}

DualQuaternion omega_power(const DualQuaternion& omega_hat, int k)
{
    if (k < 0) throw std::invalid_argument("power must be non-negative");
    if (k == 0) return DualQuaternion::identity();
    DualQuaternion p = omega_hat;
    for (int i = 1; i < k; ++i) p = omega_hat * p;
    return p;
}

DualQuaternion closed_form_omega_power(const Vec3& omega, const Vec3& vel, int k)
{
    if (k < 1) throw std::invalid_argument("closed form requires k >= 1");
    const double w2 = omega.squaredNorm();
    const double wv = omega.dot(vel);
    const int j = k / 2;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const double w2j = std::pow(w2, j);

    if (k % 2 == 0) {
        // (0, (-1)^j |w|^k) + eps (0, (-1)^j k |w|^(k-2) (w.v))
        const double w2jm1 = std::pow(w2, j - 1);
        return {Quaternion(Vec3::Zero(), sign * w2j),
                Quaternion(Vec3::Zero(), sign * k * w2jm1 * wv)};
    }
    // k = 2j + 1: ((-1)^j |w|^(k-1) w, 0) + eps ((-1)^j (|w|^(k-1) v + (k-1) |w|^(k-3) (w.v) w), 0)
    Vec3 dual = w2j * vel;
    if (j > 0) dual += (k - 1) * std::pow(w2, j - 1) * wv * omega;
    return DualQuaternion::pure(sign * w2j * omega, sign * dual);
}

namespace {

DualQuaternion scaled_twist(const RigidBodyState& state, const ObservableConfig& cfg)
{
    if (cfg.normalized && cfg.order > 0) {
        if (state.omega.norm() >= cfg.omega0 || state.vel.norm() >= cfg.v0)
            throw std::domain_error("velocity exceeds normalization bound");
    }
    return (1.0 / cfg.scale()) * state.twist();
}

}  // namespace

Eigen::VectorXd lift(const RigidBodyState& state, const ObservableConfig& cfg)
{
    cfg.validate();
    Eigen::VectorXd z(cfg.dimension());
    const DualQuaternion w = scaled_twist(state, cfg);
    DualQuaternion block = state.pose;
    z.head<8>() = block.coeffs();
    for (int k = 1; k <= cfg.order; ++k) {
        block = block * w;
        z.segment<8>(8 * k) = block.coeffs();
    }
    if (cfg.include_twist) z.tail<6>() << state.omega, state.vel;
    return z;
}

std::vector<double> decay_profile(const RigidBodyState& state, const ObservableConfig& cfg)
{
    cfg.validate();
    const DualQuaternion w = scaled_twist(state, cfg);
    const double s = w.real().vec().squaredNorm() + w.dual().vec().squaredNorm();
    if (s >= 2.0 / 3.0) throw std::domain_error("normalized twist too large for the decay bound");

    std::vector<double> out;
    DualQuaternion block = state.pose;
    out.push_back(norm(block));
    for (int k = 1; k <= cfg.order; ++k) {
        block = block * w;
        out.push_back(norm(block));
    }
    return out;
}

bool strictly_decaying(const std::vector<double>& profile)
{
    for (std::size_t k = 2; k + 1 < profile.size(); ++k)
        if (!(profile[k + 1] < profile[k])) return false;
    return true;
}

DualQuaternion b_k_term(const DualQuaternion& omega_tilde, const ModifiedInput& u,
                        const BlockMatrix8& m_inv, int k)
{
    if (k < 1) throw std::invalid_argument("B_k requires k >= 1");
    const DualQuaternion a = swap(matrix_star(m_inv, DualQuaternion::pure(u.head<3>(), u.tail<3>())));
    std::vector<DualQuaternion> powers{DualQuaternion::identity()};
    for (int i = 1; i < k; ++i) powers.push_back(omega_tilde * powers.back());

    DualQuaternion sum = DualQuaternion::zero();
    for (int i = 1; i <= k; ++i) sum = sum + powers[i - 1] * a * powers[k - i];
    return sum;
}

void RbfDictionary::validate() const
{
    if (!(width > 0.0)) throw std::invalid_argument("rbf width must be positive");
    for (const auto& c : centers)
        if (!c.allFinite()) throw std::invalid_argument("rbf center is not finite");
}

Eigen::VectorXd rbf_lift(const RigidBodyState& state, const RbfDictionary& dict)
{
    const Vec14 x = state.flatten();
    Eigen::VectorXd z(dict.dimension());
    z.head<14>() = x;
    const double w2 = dict.width * dict.width;
    for (std::size_t i = 0; i < dict.centers.size(); ++i)
        z(14 + static_cast<Eigen::Index>(i)) = std::exp(-(x - dict.centers[i]).squaredNorm() / w2);
    return z;
}

}  // namespace dqk
