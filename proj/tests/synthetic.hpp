#pragma once

// Test-only generators and brute-force oracles. Nothing here calls into the
// library code paths it is used to check.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace synth {

inline std::string random_string(std::mt19937_64& rng, std::size_t length, std::string_view alphabet)
{
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string s(length, ' ');
    for (auto& c : s)
        c = alphabet[pick(rng)];
    return s;
}

/// Every length-n substring counted by an independent nested enumeration.
inline std::map<std::string, std::size_t> brute_gram_counts(const std::string& text, std::size_t n)
{
    std::map<std::string, std::size_t> counts;
    for (std::size_t start = 0; start < text.size(); ++start) {
        std::string gram;
        for (std::size_t k = start; k < text.size() && gram.size() < n; ++k)
            gram.push_back(text[k]);
        if (gram.size() == n)
            ++counts[gram];
    }
    return counts;
}

/// Prefix counts restricted to positions that have a following character.
inline std::map<std::string, std::size_t> brute_context_counts(const std::string& text, std::size_t n)
{
    std::map<std::string, std::size_t> counts;
    for (std::size_t start = 0; start + n <= text.size(); ++start) {
        std::string ctx;
        for (std::size_t k = 0; k + 1 < n; ++k)
            ctx.push_back(text[start + k]);
        ++counts[ctx];
    }
    return counts;
}

/// Character-level order-2 Markov source over `alphabet` with sparse random
/// transition rows (Dirichlet with small concentration).
class MarkovSource
{
public:
    MarkovSource(std::string alphabet, std::uint64_t seed, double concentration = 0.25)
        : alphabet_(std::move(alphabet)), rows_(alphabet_.size() * alphabet_.size())
    {
        std::mt19937_64 rng(seed);
        std::gamma_distribution<double> gamma(concentration, 1.0);
        for (auto& row : rows_) {
            row.resize(alphabet_.size());
            double total = 0.0;
            for (auto& w : row) {
                w = gamma(rng) + 1e-6;
                total += w;
            }
            for (auto& w : row)
                w /= total;
        }
    }

    const std::string& alphabet() const { return alphabet_; }

    /// Next character given the two preceding ones.
    char next(char a, char b, std::mt19937_64& rng) const
    {
        const auto& row = rows_[index(a) * alphabet_.size() + index(b)];
        std::discrete_distribution<std::size_t> pick(row.begin(), row.end());
        return alphabet_[pick(rng)];
    }

    std::string generate(std::size_t length, std::mt19937_64& rng) const
    {
        std::string s = random_string(rng, 2, alphabet_);
        while (s.size() < length)
            s.push_back(next(s[s.size() - 2], s[s.size() - 1], rng));
        s.resize(length);
        return s;
    }

private:
    std::size_t index(char c) const { return alphabet_.find(c); }

    std::string alphabet_;
    std::vector<std::vector<double>> rows_;
};

/// Latin-looking alphabet: letters plus space.
inline std::string latin_alphabet() { return "abcdefghijklmnopqrstuvwxyz "; }

/// Letters only: generated text is already normalized, so offsets survive
/// Document::from_normalized unchanged.
inline std::string letter_alphabet() { return "abcdefghijklmnopqrstuvwxyz"; }

/// Dual objective 1/2 a'Ka minimized over {0 <= a_i <= C, sum a = 1} by a
/// nested grid over the first l-1 coordinates, refined around the incumbent
/// until the step falls below `final_step`. The problem is convex, so the
/// zooming search converges to the global minimum value.
inline double grid_qp_minimum(const Eigen::MatrixXd& K, double C, double final_step = 1e-7)
{
    const int l = static_cast<int>(K.rows());
    auto objective = [&](const Eigen::VectorXd& a) { return 0.5 * a.dot(K * a); };
    if (l == 1)
        return objective(Eigen::VectorXd::Ones(1));

    const int free_dims = l - 1;
    Eigen::VectorXd center = Eigen::VectorXd::Constant(free_dims, 1.0 / l);
    double radius = C;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_point = center;
    const int per_side = 20;

    while (true) {
        const double step = radius / per_side;
        std::vector<int> idx(static_cast<std::size_t>(free_dims), -per_side);
        bool improved_any = false;
        for (;;) {
            Eigen::VectorXd a(l);
            double partial = 0.0;
            bool ok = true;
            for (int d = 0; d < free_dims; ++d) {
                const double v = std::clamp(center[d] + idx[static_cast<std::size_t>(d)] * step, 0.0, C);
                a[d] = v;
                partial += v;
            }
            a[l - 1] = 1.0 - partial;
            if (a[l - 1] < -1e-15 || a[l - 1] > C + 1e-15)
                ok = false;
            if (ok) {
                a[l - 1] = std::clamp(a[l - 1], 0.0, C);
                const double f = objective(a);
                if (f < best) {
                    best = f;
                    best_point = a.head(free_dims);
                    improved_any = true;
                }
            }
            int d = 0;
            while (d < free_dims && ++idx[static_cast<std::size_t>(d)] > per_side) {
                idx[static_cast<std::size_t>(d)] = -per_side;
                ++d;
            }
            if (d == free_dims)
                break;
        }
        (void)improved_any;
        if (step < final_step)
            break;
        center = best_point;
        radius = 2.0 * step;
    }
    return best;
}

/// Writes `content` to `dir/name` and returns the path.
inline std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                        const std::string& content)
{
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path, std::ios::binary) << content;
    return path;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag)
{
    const auto dir = std::filesystem::temp_directory_path() / ("stylo_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace synth
