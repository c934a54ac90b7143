#pragma once

#include "stylo/corpus.hpp"
#include "stylo/features.hpp"
#include "stylo/metrics.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stylo {

/// Hoeffding sample budget: ceil(ln(2/alpha) / (2 epsilon^2)), at least 1.
/// With epsilon = 0.1 this is ceil(50 ln(2/alpha)).
std::size_t sample_count(double alpha, double epsilon);

struct SamplingPlan
{
    double alpha = 0.05;
    double epsilon = 0.1;
    std::size_t b = 1;
    /// floor((n - m + 1) / b); zero when the plan degrades to a full scan.
    std::size_t stride = 0;
    std::size_t doc_length = 0;
    std::size_t query_length = 0;
    /// The document has fewer window positions than the budget.
    bool full_scan = false;
};

SamplingPlan make_plan(std::size_t doc_length, std::size_t query_length, double alpha, double epsilon);

/// Same spacing rule with an explicit sample count.
SamplingPlan make_plan_with_count(std::size_t doc_length, std::size_t query_length, std::size_t b,
                                  double alpha = 0.05, double epsilon = 0.1);

/// A passage to look for, with its gram distribution precomputed.
struct Query
{
    std::string passage;
    std::size_t n = 2;
    DiscreteDistribution distribution;

    std::size_t m() const noexcept { return passage.size(); }
};

/// Throws InputError when the passage is shorter than n.
Query make_query(std::string passage, std::size_t n = 2);
Query make_query(const Document& passage, std::size_t n = 2);

struct IntertextHit
{
    std::size_t offset = 0;
    double distance = 0.0;
    std::string excerpt;
};

/// Distance between a window's gram masses and the query's, both laid out
/// on one index space. Smaller is closer.
using WindowMetric = std::function<double(const Eigen::VectorXd& window, const Eigen::VectorXd& query)>;

WindowMetric bhattacharyya_metric();

struct ScanReport
{
    std::vector<IntertextHit> hits;
    std::size_t comparisons_made = 0;
    std::size_t query_length = 0;
    double threshold = 0.0;
    /// Smallest distance over every evaluated window, hit or not.
    double best_distance = 0.0;
    std::size_t best_offset = 0;

    /// Sampled scans only.
    std::optional<SamplingPlan> plan;
    std::size_t phase = 0;
    std::optional<double> sampled_proportion;
    std::optional<std::pair<double, double>> confidence_interval;
};

/// Collapses chains of overlapping candidate windows (starts closer than
/// `window` characters) to their minimum-distance member, earliest first on
/// ties. Output is sorted by offset.
std::vector<IntertextHit> dedup_hits(std::vector<IntertextHit> candidates, std::size_t window);

/// Compares every length-m window of `doc` against the query.
ScanReport scan_full(const Query& query, std::string_view doc, double threshold,
                     const WindowMetric& metric = bhattacharyya_metric());
ScanReport scan_full(const Query& query, const Document& doc, double threshold,
                     const WindowMetric& metric = bhattacharyya_metric());

/// Compares the windows at phase, phase + stride, ... (b of them, fewer at
/// the document end). `phase` must be below the stride. A full-scan plan
/// evaluates every window and reports the exact proportion.
ScanReport scan_sampled(const Query& query, std::string_view doc, const SamplingPlan& plan, double threshold,
                        std::size_t phase = 0, const WindowMetric& metric = bhattacharyya_metric());
ScanReport scan_sampled(const Query& query, const Document& doc, const SamplingPlan& plan, double threshold,
                        std::size_t phase = 0, const WindowMetric& metric = bhattacharyya_metric());

struct DocCompareOptions
{
    std::size_t n = 2;
    std::size_t n_per_len = 10;
    std::size_t min_len = 60;
    std::size_t max_len = 200;
    std::size_t step = 20;
    double alpha = 0.05;
    double epsilon = 0.1;
    double threshold = 0.05;
    std::uint64_t seed = 0;
};

struct QueryResult
{
    std::size_t length = 0;
    /// Offset of the query inside the first document.
    std::size_t source_offset = 0;
    std::string excerpt;
    ScanReport report;

    /// Smallest hit distance, +infinity without hits.
    double best_hit_distance() const;
};

struct DocCompareReport
{
    DocCompareOptions options;
    /// Sorted by best hit distance; queries without hits come last, then by
    /// length and source offset.
    std::vector<QueryResult> queries;
};

/// For each length min_len, min_len + step, ..., max_len draws n_per_len
/// query offsets uniformly from `a` and runs a sampled scan of `b` with a
/// fresh plan (and seeded random phase) per length.
DocCompareReport doc_compare(const Document& a, const Document& b, const DocCompareOptions& opts);

struct RankedHit
{
    std::size_t query_index = 0;
    IntertextHit hit;
};

/// The k closest hits across all queries, by distance then query order.
std::vector<RankedHit> top_hits(const DocCompareReport& report, std::size_t k);

} // namespace stylo
