#include "stylo/metrics.hpp"

#include "stylo/error.hpp"

#include <algorithm>
#include <numeric>

namespace stylo {

DiscreteDistribution::DiscreteDistribution(std::vector<std::string> support, std::vector<double> mass)
{
    if (support.size() != mass.size())
        throw InputError("distribution support and mass differ in length");

    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });

    support_.reserve(order.size());
    mass_.reserve(order.size());
    double total = 0.0;
    for (std::size_t i : order) {
        if (!support_.empty() && support_.back() == support[i])
            throw InputError("duplicate key '" + support[i] + "' in distribution support");
        if (!(mass[i] >= 0.0) || !std::isfinite(mass[i]))
            throw InputError("distribution mass must be finite and nonnegative");
        support_.push_back(std::move(support[i]));
        mass_.push_back(mass[i]);
        total += mass[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InputError("distribution masses sum to " + std::to_string(total) + ", not 1");
}

DiscreteDistribution DiscreteDistribution::from_weights(std::vector<std::pair<std::string, double>> weights)
{
    double total = 0.0;
    for (const auto& [key, w] : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InputError("weights must be finite and nonnegative");
        total += w;
    }
    if (total <= 0.0)
        throw InputError("cannot normalize weights with zero total");
    std::vector<std::string> support;
    std::vector<double> mass;
    support.reserve(weights.size());
    mass.reserve(weights.size());
    for (auto& [key, w] : weights) {
        support.push_back(std::move(key));
        mass.push_back(w / total);
    }
    return {std::move(support), std::move(mass)};
}

double DiscreteDistribution::operator()(const std::string& key) const
{
    const auto it = std::lower_bound(support_.begin(), support_.end(), key);
    if (it == support_.end() || *it != key)
        return 0.0;
    return mass_[static_cast<std::size_t>(it - support_.begin())];
}

double bhattacharyya_coefficient(const DiscreteDistribution& p, const DiscreteDistribution& q)
{
    // Merge over the sorted supports; only shared keys have nonzero terms.
    const auto& ks = p.support();
    const auto& ls = q.support();
    double bc = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ks.size() && j < ls.size()) {
        if (ks[i] < ls[j]) {
            ++i;
        } else if (ls[j] < ks[i]) {
            ++j;
        } else {
            bc += std::sqrt(p.mass()[i] * q.mass()[j]);
            ++i;
            ++j;
        }
    }
    return std::clamp(bc, 0.0, 1.0);
}

double bhattacharyya_distance(const DiscreteDistribution& p, const DiscreteDistribution& q)
{
    const double bc = bhattacharyya_coefficient(p, q);
    if (bc <= 0.0)
        return std::numeric_limits<double>::infinity();
    return std::max(0.0, -std::log(bc));
}

} // namespace stylo
