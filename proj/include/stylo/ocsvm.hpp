#pragma once

#include "stylo/features.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace stylo {

/// Gaussian RBF kernel exp(-gamma * |x - y|^2).
struct KernelSpec
{
    double gamma = 1.0;
};

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar rbf_kernel(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                                     typename DerivedX::Scalar gamma)
{
    eigen_assert(x.size() == y.size());
    return std::exp(-gamma * (x - y).squaredNorm());
}

/// Checked variant: throws InputError on a dimension mismatch or gamma <= 0.
double rbf_kernel(const FeatureVector& x, const FeatureVector& y, double gamma);

/// Gram matrix of the rows of `X`.
Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& X, double gamma);

struct TrainConfig
{
    /// Upper bound on the training outlier fraction, in (0, 1].
    double nu = 0.5;
    /// KKT tolerance on decision values.
    double tol = 1e-6;
    /// Iteration cap, in units of the training set size.
    std::size_t max_passes = 1000;
    /// Fixes the index order used to break ties in working-set selection.
    std::uint64_t seed = 0;
};

/// A trained one-class SVM. Rows of `support_vectors` align with `alphas`.
struct OcsvmModel
{
    Eigen::MatrixXd support_vectors;
    Eigen::VectorXd alphas;
    double rho = 0.0;
    KernelSpec kernel;
    double nu = 0.5;
    std::size_t l = 0;
    std::string space_id;

    Eigen::Index dimension() const noexcept { return support_vectors.cols(); }
    Eigen::Index support_size() const noexcept { return alphas.size(); }
};

struct TrainReport
{
    OcsvmModel model;
    /// Multipliers for every training point, including zeros.
    Eigen::VectorXd alpha;
    /// Decision value of every training point under the unpruned solution.
    Eigen::VectorXd training_decision;
    /// 1/2 alpha' K alpha.
    double objective = 0.0;
    /// Largest KKT residual over the training set (see kkt_residual).
    double kkt_violation = 0.0;
    std::size_t iterations = 0;
    /// True when no multiplier was strictly inside the box and rho came
    /// from the bound/zero midpoint.
    bool rho_fallback = false;
};

/// Solves min 1/2 a'Ka s.t. 0 <= a_i <= 1/(nu l), sum a = 1 by pairwise
/// coordinate descent on the most violating pair (second-order selection),
/// starting from the uniform point a_i = 1/l.
///
/// rho is the mean of sum_j a_j k(x_j, x_i) over multipliers strictly inside
/// the box. When there are none it is the midpoint between the largest
/// value at the upper bound and the smallest at zero.
///
/// Throws InputError for an empty set or a config outside its domain, and
/// ConvergenceError when the KKT gap is above tol after the iteration cap.
TrainReport train_detailed(const Eigen::MatrixXd& X, const TrainConfig& cfg, const KernelSpec& kernel);

OcsvmModel train(const Eigen::MatrixXd& X, const TrainConfig& cfg, const KernelSpec& kernel);

/// Stacks vectors that share one feature space into the rows of a matrix.
Eigen::MatrixXd stack_rows(const std::vector<FeatureVector>& vectors);

OcsvmModel train(const std::vector<FeatureVector>& X, const TrainConfig& cfg, const KernelSpec& kernel);

/// Largest violation of: |g| <= 0 for free multipliers, g >= 0 at zero,
/// g <= 0 at the upper bound, where g are decision values.
double kkt_residual(const Eigen::VectorXd& alpha, const Eigen::VectorXd& decision, double upper_bound);

/// sum_i a_i k(sv_i, x) - rho: the signed distance from the hyperplane.
template <typename Derived>
double decision_value(const OcsvmModel& model, const Eigen::MatrixBase<Derived>& x)
{
    eigen_assert(x.size() == model.dimension());
    const Eigen::VectorXd sq = (model.support_vectors.rowwise() - x.derived().transpose()).rowwise().squaredNorm();
    return model.alphas.dot((-model.kernel.gamma * sq).array().exp().matrix()) - model.rho;
}

/// Checked variant: throws InputError on a dimension or feature-space mismatch.
double decision_value(const OcsvmModel& model, const FeatureVector& x);

/// Decision values for the rows of `X`.
Eigen::VectorXd decision_values(const OcsvmModel& model, const Eigen::MatrixXd& X);

enum class Label : int { Inlier = 1, Outlier = -1 };

std::string_view to_string(Label label);

/// Sign of the decision value; exactly zero is an inlier.
Label predict(const OcsvmModel& model, const FeatureVector& x);

inline Label label_of(double decision) { return decision >= 0.0 ? Label::Inlier : Label::Outlier; }

struct GridCell
{
    double nu = 0.0;
    double gamma = 0.0;
    double score = 0.0;
    bool ok = false;
    std::string error;
};

struct GridResult
{
    TrainConfig config;
    KernelSpec kernel;
    double score = 0.0;
    std::vector<GridCell> cells;
    /// Both holdout sets were empty and the score fell back to the training
    /// acceptance rate minus nu.
    bool weak = false;
};

/// Trains one model per (nu, gamma) pair. A cell scores the fraction of
/// `holdout_in` rows accepted plus the fraction of `holdout_out` rows
/// rejected. The best cell wins; ties go to smaller nu, then smaller gamma.
/// Cells whose training fails are recorded and skipped.
GridResult grid_search(const Eigen::MatrixXd& train_set, const Eigen::MatrixXd& holdout_in,
                       const Eigen::MatrixXd& holdout_out, std::vector<double> nu_grid,
                       std::vector<double> gamma_grid, const TrainConfig& base = {});

std::vector<double> default_nu_grid();
std::vector<double> default_gamma_grid(Eigen::Index dimension);

} // namespace stylo
