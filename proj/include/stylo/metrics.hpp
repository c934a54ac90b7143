#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace stylo {

/// Probability masses over a sorted, duplicate-free support of string keys.
/// Construction validates nonnegativity and unit total (within 1e-9).
class DiscreteDistribution
{
public:
    DiscreteDistribution() = default;

    /// Keys may arrive unsorted; they are sorted together with their masses.
    DiscreteDistribution(std::vector<std::string> support, std::vector<double> mass);

    /// Normalizes nonnegative weights by their total.
    static DiscreteDistribution from_weights(std::vector<std::pair<std::string, double>> weights);

    const std::vector<std::string>& support() const noexcept { return support_; }
    const std::vector<double>& mass() const noexcept { return mass_; }
    std::size_t size() const noexcept { return support_.size(); }
    bool empty() const noexcept { return support_.empty(); }

    /// Mass of `key`, 0 when absent.
    double operator()(const std::string& key) const;

private:
    std::vector<std::string> support_;
    std::vector<double> mass_;
};

/// Sum over the union support of sqrt(p(x) q(x)), clamped to [0, 1].
/// Keys missing from one side contribute nothing.
double bhattacharyya_coefficient(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// -ln BC(p, q); +infinity when the supports are disjoint.
double bhattacharyya_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Dense variant over two mass vectors that share an index space.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar bhattacharyya_coefficient(const Eigen::MatrixBase<DerivedP>& p,
                                                    const Eigen::MatrixBase<DerivedQ>& q)
{
    using Scalar = typename DerivedP::Scalar;
    eigen_assert(p.size() == q.size());
    const Scalar bc = p.cwiseProduct(q).cwiseSqrt().sum();
    return std::clamp(bc, Scalar(0), Scalar(1));
}

template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar bhattacharyya_distance(const Eigen::MatrixBase<DerivedP>& p,
                                                 const Eigen::MatrixBase<DerivedQ>& q)
{
    using Scalar = typename DerivedP::Scalar;
    const Scalar bc = bhattacharyya_coefficient(p, q);
    if (bc <= Scalar(0))
        return std::numeric_limits<Scalar>::infinity();
    return std::max(Scalar(0), -std::log(bc));
}

} // namespace stylo
