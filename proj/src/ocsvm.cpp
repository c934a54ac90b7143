#include "stylo/ocsvm.hpp"

#include "stylo/error.hpp"
#include "stylo/log.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace stylo {

namespace {

void check_kernel(const KernelSpec& kernel)
{
    if (!(kernel.gamma > 0.0) || !std::isfinite(kernel.gamma))
        throw InputError("RBF gamma must be a positive finite number");
}

void check_config(const TrainConfig& cfg)
{
    if (!(cfg.nu > 0.0))
        throw InputError("nu must be positive");
    if (cfg.nu > 1.0)
        throw ConvergenceError("nu > 1 leaves the dual with no feasible point", cfg.nu - 1.0);
    if (!(cfg.tol > 0.0))
        throw InputError("KKT tolerance must be positive");
    if (cfg.max_passes == 0)
        throw InputError("max_passes must be positive");
}

constexpr double kCurvatureFloor = 1e-12;

} // namespace

double rbf_kernel(const FeatureVector& x, const FeatureVector& y, double gamma)
{
    check_kernel(KernelSpec{gamma});
    if (x.size() != y.size())
        throw InputError("kernel arguments differ in dimension (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
    return rbf_kernel(x.values, y.values, gamma);
}

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& X, double gamma)
{
    const Eigen::Index l = X.rows();
    Eigen::MatrixXd K(l, l);
    for (Eigen::Index i = 0; i < l; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < l; ++j)
            K(i, j) = K(j, i) = rbf_kernel(X.row(i), X.row(j), gamma);
    }
    return K;
}

double kkt_residual(const Eigen::VectorXd& alpha, const Eigen::VectorXd& decision, double upper_bound)
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        const double g = decision[i];
        double v;
        if (alpha[i] <= 0.0)
            v = std::max(0.0, -g);
        else if (alpha[i] >= upper_bound)
            v = std::max(0.0, g);
        else
            v = std::abs(g);
        worst = std::max(worst, v);
    }
    return worst;
}

TrainReport train_detailed(const Eigen::MatrixXd& X, const TrainConfig& cfg, const KernelSpec& kernel)
{
    check_config(cfg);
    check_kernel(kernel);
    const Eigen::Index l = X.rows();
    if (l == 0)
        throw InputError("cannot train on an empty training set");
    if (!X.allFinite())
        throw InputError("training vectors must be finite");

    const double upper = 1.0 / (cfg.nu * static_cast<double>(l));
    if (upper * static_cast<double>(l) < 1.0 - 1e-12)
        throw ConvergenceError("box constraint 1/(nu l) admits no point with sum 1", 1.0);

    const Eigen::MatrixXd K = rbf_gram(X, kernel.gamma);
    Eigen::VectorXd alpha = Eigen::VectorXd::Constant(l, 1.0 / static_cast<double>(l));
    Eigen::VectorXd G = K * alpha;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(l));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (cfg.seed != 0) {
        std::mt19937_64 rng(cfg.seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    const std::size_t max_iter = cfg.max_passes * static_cast<std::size_t>(std::max<Eigen::Index>(l, 10));
    std::size_t iter = 0;
    double gap = 0.0;
    bool refreshed = false;

    for (;;) {
        // i: smallest gradient among multipliers that can grow.
        Eigen::Index i = -1;
        double g_min = std::numeric_limits<double>::infinity();
        double g_max = -std::numeric_limits<double>::infinity();
        for (Eigen::Index t : order) {
            if (alpha[t] < upper && G[t] < g_min) {
                g_min = G[t];
                i = t;
            }
            if (alpha[t] > 0.0)
                g_max = std::max(g_max, G[t]);
        }
        gap = (i < 0) ? 0.0 : g_max - g_min;

        if (gap <= cfg.tol) {
            // Recompute the gradient once from scratch before accepting, so
            // drift from incremental updates cannot fake convergence.
            if (refreshed)
                break;
            G.noalias() = K * alpha;
            refreshed = true;
            continue;
        }
        refreshed = false;

        if (iter >= max_iter) {
            std::ostringstream msg;
            msg << "one-class SVM did not converge after " << iter << " iterations (KKT gap " << gap << ")";
            throw ConvergenceError(msg.str(), gap);
        }

        // j: among shrinkable multipliers with a larger gradient, the one
        // promising the largest objective decrease.
        Eigen::Index j = -1;
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index t : order) {
            if (!(alpha[t] > 0.0) || !(G[t] > g_min))
                continue;
            const double diff = G[t] - g_min;
            const double curvature = std::max(K(i, i) + K(t, t) - 2.0 * K(i, t), kCurvatureFloor);
            const double gain = diff * diff / curvature;
            if (gain > best) {
                best = gain;
                j = t;
            }
        }
        if (j < 0)
            break;

        const double curvature = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), kCurvatureFloor);
        double step = (G[j] - G[i]) / curvature;
        const double room_i = upper - alpha[i];
        const double room_j = alpha[j];
        step = std::min({step, room_i, room_j});

        if (step == room_i)
            alpha[i] = upper;
        else
            alpha[i] += step;
        if (step == room_j)
            alpha[j] = 0.0;
        else
            alpha[j] -= step;

        G += step * (K.col(i) - K.col(j));
        ++iter;
    }

    TrainReport report;
    report.iterations = iter;
    report.alpha = alpha;
    report.objective = 0.5 * alpha.dot(G);

    OcsvmModel& model = report.model;
    model.kernel = kernel;
    model.nu = cfg.nu;
    model.l = static_cast<std::size_t>(l);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index t = 0; t < l; ++t)
        if (alpha[t] > cfg.tol)
            kept.push_back(t);
    model.support_vectors.resize(static_cast<Eigen::Index>(kept.size()), X.cols());
    model.alphas.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        model.support_vectors.row(row) = X.row(kept[k]);
        model.alphas[row] = alpha[kept[k]];
    }

    // Free SVs agree to within tol. Taking the smallest of the stored model's
    // own sums keeps every one of them at g >= 0 when re-scored.
    model.rho = 0.0;
    double free_min = std::numeric_limits<double>::infinity();
    double at_upper = -std::numeric_limits<double>::infinity();
    double at_zero = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < l; ++t) {
        if (alpha[t] > 0.0 && alpha[t] < upper)
            free_min = std::min(free_min, decision_value(model, X.row(t).transpose()));
        else if (alpha[t] >= upper)
            at_upper = std::max(at_upper, G[t]);
        else
            at_zero = std::min(at_zero, G[t]);
    }
    double rho;
    if (std::isfinite(free_min)) {
        rho = free_min;
    } else {
        report.rho_fallback = true;
        if (std::isfinite(at_upper) && std::isfinite(at_zero))
            rho = 0.5 * (at_upper + at_zero);
        else
            rho = std::isfinite(at_upper) ? at_upper : at_zero;
        warn("no free support vectors; offset taken from the bound/zero midpoint");
    }
    model.rho = rho;
    report.training_decision = G.array() - rho;
    report.kkt_violation = kkt_residual(alpha, report.training_decision, upper);
    return report;
}

OcsvmModel train(const Eigen::MatrixXd& X, const TrainConfig& cfg, const KernelSpec& kernel)
{
    return train_detailed(X, cfg, kernel).model;
}

Eigen::MatrixXd stack_rows(const std::vector<FeatureVector>& vectors)
{
    if (vectors.empty())
        return {};
    const Eigen::Index d = vectors.front().size();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(vectors.size()), d);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != d || vectors[i].space_id != vectors.front().space_id)
            throw InputError("feature vectors come from different feature spaces");
        X.row(static_cast<Eigen::Index>(i)) = vectors[i].values.transpose();
    }
    return X;
}

OcsvmModel train(const std::vector<FeatureVector>& X, const TrainConfig& cfg, const KernelSpec& kernel)
{
    OcsvmModel model = train(stack_rows(X), cfg, kernel);
    if (!X.empty())
        model.space_id = X.front().space_id;
    return model;
}

double decision_value(const OcsvmModel& model, const FeatureVector& x)
{
    if (x.size() != model.dimension())
        throw InputError("vector dimension " + std::to_string(x.size()) + " does not match model dimension " +
                         std::to_string(model.dimension()));
    if (!model.space_id.empty() && !x.space_id.empty() && x.space_id != model.space_id)
        throw InputError("vector space '" + x.space_id + "' does not match model space '" + model.space_id + "'");
    return decision_value(model, x.values);
}

Eigen::VectorXd decision_values(const OcsvmModel& model, const Eigen::MatrixXd& X)
{
    if (X.rows() > 0 && X.cols() != model.dimension())
        throw InputError("matrix has " + std::to_string(X.cols()) + " columns, model dimension is " +
                         std::to_string(model.dimension()));
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        out[r] = decision_value(model, X.row(r).transpose());
    return out;
}

std::string_view to_string(Label label)
{
    return label == Label::Inlier ? "inlier" : "outlier";
}

Label predict(const OcsvmModel& model, const FeatureVector& x)
{
    return label_of(decision_value(model, x));
}

std::vector<double> default_nu_grid()
{
    return {0.05, 0.1, 0.2, 0.3, 0.5};
}

std::vector<double> default_gamma_grid(Eigen::Index dimension)
{
    const double scale = 1.0 / static_cast<double>(std::max<Eigen::Index>(dimension, 1));
    return {0.01 * scale, 0.1 * scale, 1.0 * scale, 10.0 * scale};
}

GridResult grid_search(const Eigen::MatrixXd& train_set, const Eigen::MatrixXd& holdout_in,
                       const Eigen::MatrixXd& holdout_out, std::vector<double> nu_grid,
                       std::vector<double> gamma_grid, const TrainConfig& base)
{
    if (nu_grid.empty() || gamma_grid.empty())
        throw InputError("grid search needs at least one nu and one gamma");
    std::sort(nu_grid.begin(), nu_grid.end());
    std::sort(gamma_grid.begin(), gamma_grid.end());

    GridResult result;
    result.weak = holdout_in.rows() == 0 && holdout_out.rows() == 0;
    bool found = false;

    auto fraction = [](const Eigen::VectorXd& d, Label want) {
        if (d.size() == 0)
            return 0.0;
        const auto hits = std::count_if(d.data(), d.data() + d.size(),
                                        [&](double v) { return label_of(v) == want; });
        return static_cast<double>(hits) / static_cast<double>(d.size());
    };

    for (double nu : nu_grid) {
        for (double gamma : gamma_grid) {
            GridCell cell{nu, gamma, 0.0, false, {}};
            TrainConfig cfg = base;
            cfg.nu = nu;
            try {
                const OcsvmModel model = train(train_set, cfg, KernelSpec{gamma});
                if (result.weak) {
                    cell.score = fraction(decision_values(model, train_set), Label::Inlier) - nu;
                } else {
                    cell.score = fraction(decision_values(model, holdout_in), Label::Inlier) +
                                 fraction(decision_values(model, holdout_out), Label::Outlier);
                }
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            if (cell.ok && (!found || cell.score > result.score)) {
                found = true;
                result.score = cell.score;
                result.config = cfg;
                result.kernel = KernelSpec{gamma};
            }
            result.cells.push_back(std::move(cell));
        }
    }
    if (!found)
        throw ConvergenceError("every grid-search cell failed to train", std::numeric_limits<double>::infinity());
    return result;
}

} // namespace stylo
