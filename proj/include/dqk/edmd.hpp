#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dqk/observables.hpp"

namespace dqk {

/// Transition data: column j of Y is the RK4 image of column j of X under column j of U.
struct DataSet {
    Eigen::MatrixXd X;  ///< 14 x Nt
    Eigen::MatrixXd U;  ///< 6 x Nt
    Eigen::MatrixXd Y;  ///< 14 x Nt

    Eigen::Index size() const { return X.cols(); }
    /// Transitions [begin, begin + count).
    DataSet slice(Eigen::Index begin, Eigen::Index count) const;
};

/// Uniform random excitation from x0 with inputs in [-amplitude, amplitude]^6.
///
/// When `bounds` is given, every visited state must satisfy its velocity bounds;
/// otherwise a std::domain_error names the offending step.
DataSet generate_data(const RigidBodyState& x0, int n_steps, double amplitude, std::uint64_t seed,
                      double dt, const InertiaMatrices& mats,
                      const std::optional<ObservableConfig>& bounds = std::nullopt);

/// Either the derived observable family or the Gaussian RBF baseline.
class Dictionary {
public:
    enum class Kind { Derived, Rbf };

    static Dictionary derived(const ObservableConfig& cfg);
    static Dictionary rbf(const RbfDictionary& dict);

    Kind kind() const { return kind_; }
    const ObservableConfig& derived_config() const { return cfg_; }
    const RbfDictionary& rbf_dictionary() const { return rbf_; }

    int dimension() const;
    Eigen::VectorXd lift(const RigidBodyState& s) const;
    /// Lift of every column of a 14 x n state matrix.
    Eigen::MatrixXd lift_columns(const Eigen::MatrixXd& states) const;
    /// Rows shared by every member of a nested family: pose (and twist) for derived, the raw state for RBF.
    std::vector<Eigen::Index> base_rows() const;
    std::vector<std::string> coordinate_names() const;

private:
    Kind kind_ = Kind::Derived;
    ObservableConfig cfg_;
    RbfDictionary rbf_;
};

/// Identified lifted model z+ = A z + B u.
struct LiftedLinearModel {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Dictionary dictionary;
    double residual = 0.0;       ///< Frobenius fit error over all lifted rows
    double base_residual = 0.0;  ///< Frobenius fit error over Dictionary::base_rows()
    int rank = 0;                ///< numerical rank of the stacked regressor
};

/// Pseudoinverse with singular values below rtol * sigma_max discarded.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rtol, int* rank = nullptr);

/// Least-squares fit [A, B] = Y_lift pinv([X_lift; U]).
LiftedLinearModel fit(const DataSet& data, const Dictionary& dict, double rtol = 1e-10);

/// Fit on already-lifted snapshots.
LiftedLinearModel fit_lifted(const Eigen::MatrixXd& x_lift, const Eigen::MatrixXd& u,
                             const Eigen::MatrixXd& y_lift, const Dictionary& dict, double rtol = 1e-10);

Eigen::VectorXd predict(const LiftedLinearModel& model, const Eigen::VectorXd& z, const ModifiedInput& u);

struct RolloutStats {
    std::vector<double> mean;  ///< mean relative error per step ahead
    std::vector<double> max;   ///< max relative error per step ahead
};

/// Multi-step rollouts of the model against the lifted truth, from every admissible start.
RolloutStats rollout_error(const LiftedLinearModel& model, const DataSet& data, int horizon);

}  // namespace dqk
