#pragma once

#include <vector>

#include "dqk/rigid_body.hpp"

namespace dqk {

/// Parameters of the derived observable family.
struct ObservableConfig {
    int order = 5;              ///< number of product blocks N
    double omega0 = 3.0;        ///< angular velocity bound
    double v0 = 3.0;            ///< linear velocity bound
    bool normalized = true;
    bool include_twist = false;  ///< append [omega; vel] after the product blocks

    /// max(omega0, v0) when normalized, otherwise 1.
    double scale() const;
    int dimension() const { return 8 * (order + 1) + (include_twist ? 6 : 0); }
    void validate() const;
};

/// Right-nested power w (w (... w)); k = 0 gives the identity.
DualQuaternion omega_power(const DualQuaternion& omega_hat, int k);

/// Closed-form power of the pure twist (omega, 0) + eps (vel, 0).
DualQuaternion closed_form_omega_power(const Vec3& omega, const Vec3& vel, int k);

/// z = [q; q w~; ...; q w~^N (; omega; vel)].
Eigen::VectorXd lift(const RigidBodyState& state, const ObservableConfig& cfg);

/// Block norms ||q w~^k|| for k = 0..N.
std::vector<double> decay_profile(const RigidBodyState& state, const ObservableConfig& cfg);

/// Whether block norms strictly decrease from k = 2 to k = N.
bool strictly_decaying(const std::vector<double>& profile);

/// Sum over i = 1..k of w~^(i-1) (M^-1 * u)^s w~^(k-i).
DualQuaternion b_k_term(const DualQuaternion& omega_tilde, const ModifiedInput& u,
                        const BlockMatrix8& m_inv, int k);

/// Gaussian radial basis dictionary over the flattened 14-dimensional state.
struct RbfDictionary {
    std::vector<Vec14> centers;
    double width = 1.0;

    int dimension() const { return 14 + static_cast<int>(centers.size()); }
    void validate() const;
};

/// z = [x; exp(-||x - c_i||^2 / width^2)].
Eigen::VectorXd rbf_lift(const RigidBodyState& state, const RbfDictionary& dict);

}  // namespace dqk
