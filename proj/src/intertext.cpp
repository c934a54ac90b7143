#include "stylo/intertext.hpp"

#include "stylo/error.hpp"
#include "stylo/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

namespace stylo {

namespace {

// Gram ids for every position of one document, so that many queries can be
// scanned against it without rehashing the text.
class WindowScanner
{
public:
    WindowScanner(std::string_view doc, std::size_t n) : doc_(doc), n_(n)
    {
        if (doc.size() >= n) {
            ids_.reserve(doc.size() - n + 1);
            for (std::size_t i = 0; i + n <= doc.size(); ++i) {
                const auto it =
                    vocab_.try_emplace(std::string(doc.substr(i, n)), static_cast<int>(vocab_.size())).first;
                ids_.push_back(it->second);
            }
        }
    }

    ScanReport full(const Query& query, double threshold, const WindowMetric& metric,
                    std::size_t* matched = nullptr) const
    {
        check(query);
        const std::size_t m = query.m();
        const Eigen::VectorXd q = query_masses(query);
        ScanReport report = start_report(query, threshold);
        std::vector<IntertextHit> candidates;
        for_each_window(query, q, metric,
                        [&](std::size_t o, double d) { record(report, candidates, o, d, m); });
        report.comparisons_made = doc_.size() - m + 1;
        if (matched)
            *matched = candidates.size();
        report.hits = dedup_hits(std::move(candidates), m);
        return report;
    }

    ScanReport sampled(const Query& query, const SamplingPlan& plan, double threshold, std::size_t phase,
                       const WindowMetric& metric) const
    {
        check(query);
        if (plan.doc_length != doc_.size() || plan.query_length != query.m())
            throw InputError("sampling plan was made for lengths (" + std::to_string(plan.doc_length) + ", " +
                             std::to_string(plan.query_length) + "), not (" + std::to_string(doc_.size()) + ", " +
                             std::to_string(query.m()) + ")");
        if (plan.full_scan) {
            std::size_t matched = 0;
            ScanReport report = full(query, threshold, metric, &matched);
            finish_sampled(report, plan, 0, matched);
            return report;
        }
        if (phase >= plan.stride)
            throw InputError("sampling phase must be below the stride");

        const std::size_t m = query.m();
        const std::size_t grams = m - n_ + 1;
        const double inv_total = 1.0 / static_cast<double>(grams);
        const Eigen::VectorXd q = query_masses(query);
        Eigen::VectorXd window(q.size());
        ScanReport report = start_report(query, threshold);
        std::vector<IntertextHit> candidates;
        std::size_t evaluated = 0;
        for (std::size_t o = phase; evaluated < plan.b && o + m <= doc_.size(); o += plan.stride) {
            window.setZero();
            for (std::size_t k = 0; k < grams; ++k)
                window[ids_[o + k]] += inv_total;
            record(report, candidates, o, metric(window, q), m);
            ++evaluated;
        }
        report.comparisons_made = evaluated;
        const std::size_t matched = candidates.size();
        report.hits = dedup_hits(std::move(candidates), m);
        finish_sampled(report, plan, phase, matched);
        return report;
    }

private:
    void check(const Query& query) const
    {
        if (query.n != n_)
            throw InputError("query n does not match the scanner's n");
        if (query.m() > doc_.size())
            throw InputError("document of length " + std::to_string(doc_.size()) +
                             " is shorter than the query of length " + std::to_string(query.m()));
    }

    // Query masses laid out on the document vocabulary, with query-only
    // grams appended past its end.
    Eigen::VectorXd query_masses(const Query& query) const
    {
        std::vector<std::pair<int, double>> entries;
        int extra = 0;
        for (std::size_t k = 0; k < query.distribution.size(); ++k) {
            const auto it = vocab_.find(query.distribution.support()[k]);
            const int idx = it != vocab_.end() ? it->second : static_cast<int>(vocab_.size()) + extra++;
            entries.emplace_back(idx, query.distribution.mass()[k]);
        }
        Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab_.size()) + extra);
        for (const auto& [idx, mass] : entries)
            q[idx] = mass;
        return q;
    }

    template <typename Visit>
    void for_each_window(const Query& query, const Eigen::VectorXd& q, const WindowMetric& metric, Visit visit) const
    {
        const std::size_t m = query.m();
        const std::size_t grams = m - n_ + 1;
        const double inv_total = 1.0 / static_cast<double>(grams);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(q.size());
        for (std::size_t k = 0; k < grams; ++k)
            counts[ids_[k]] += 1.0;
        Eigen::VectorXd window(q.size());
        for (std::size_t o = 0; o + m <= doc_.size(); ++o) {
            if (o > 0) {
                counts[ids_[o - 1]] -= 1.0;
                counts[ids_[o + grams - 1]] += 1.0;
            }
            window = counts * inv_total;
            visit(o, metric(window, q));
        }
    }

    static ScanReport start_report(const Query& query, double threshold)
    {
        ScanReport report;
        report.query_length = query.m();
        report.threshold = threshold;
        report.best_distance = std::numeric_limits<double>::infinity();
        return report;
    }

    void record(ScanReport& report, std::vector<IntertextHit>& candidates, std::size_t offset, double distance,
                std::size_t m) const
    {
        if (distance < report.best_distance) {
            report.best_distance = distance;
            report.best_offset = offset;
        }
        if (distance <= report.threshold)
            candidates.push_back({offset, distance, std::string(doc_.substr(offset, m))});
    }

    static void finish_sampled(ScanReport& report, const SamplingPlan& plan, std::size_t phase, std::size_t matched)
    {
        const double p = report.comparisons_made == 0
                             ? 0.0
                             : static_cast<double>(matched) / static_cast<double>(report.comparisons_made);
        report.plan = plan;
        report.phase = phase;
        report.sampled_proportion = p;
        report.confidence_interval = std::make_pair(p - plan.epsilon, p + plan.epsilon);
    }

    std::string_view doc_;
    std::size_t n_;
    std::unordered_map<std::string, int> vocab_;
    std::vector<int> ids_;
};

void check_threshold(double threshold)
{
    if (!std::isfinite(threshold) || threshold < 0.0)
        throw InputError("scan threshold must be finite and nonnegative");
}

} // namespace

std::size_t sample_count(double alpha, double epsilon)
{
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw InputError("alpha must lie in (0, 2]");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InputError("epsilon must be positive");
    const double exact = std::log(2.0 / alpha) / (2.0 * epsilon * epsilon);
    // Values within rounding noise of an integer (alpha = 2/e) stay on it.
    const double b = std::ceil(exact - 1e-9);
    if (b < 1.0) {
        warn("sample budget for alpha = " + std::to_string(alpha) + " is zero; using one sample");
        return 1;
    }
    return static_cast<std::size_t>(b);
}

SamplingPlan make_plan_with_count(std::size_t doc_length, std::size_t query_length, std::size_t b, double alpha,
                                  double epsilon)
{
    if (query_length == 0)
        throw InputError("query length must be positive");
    if (doc_length < query_length)
        throw InputError("document length " + std::to_string(doc_length) + " is below query length " +
                         std::to_string(query_length));
    if (b == 0)
        throw InputError("sample count must be positive");
    SamplingPlan plan;
    plan.alpha = alpha;
    plan.epsilon = epsilon;
    plan.b = b;
    plan.doc_length = doc_length;
    plan.query_length = query_length;
    plan.stride = (doc_length - query_length + 1) / b;
    plan.full_scan = plan.stride < 1;
    return plan;
}

SamplingPlan make_plan(std::size_t doc_length, std::size_t query_length, double alpha, double epsilon)
{
    return make_plan_with_count(doc_length, query_length, sample_count(alpha, epsilon), alpha, epsilon);
}

Query make_query(std::string passage, std::size_t n)
{
    Query q;
    q.distribution = gram_distribution(build_ngram_model(passage, n));
    q.passage = std::move(passage);
    q.n = n;
    return q;
}

Query make_query(const Document& passage, std::size_t n)
{
    return make_query(passage.normalized(), n);
}

WindowMetric bhattacharyya_metric()
{
    return [](const Eigen::VectorXd& w, const Eigen::VectorXd& q) { return bhattacharyya_distance(w, q); };
}

std::vector<IntertextHit> dedup_hits(std::vector<IntertextHit> candidates, std::size_t window)
{
    std::sort(candidates.begin(), candidates.end(),
              [](const IntertextHit& a, const IntertextHit& b) { return a.offset < b.offset; });
    std::vector<IntertextHit> kept;
    std::size_t previous = 0;
    for (auto& c : candidates) {
        // Chained overlap: each candidate is compared with the one before it.
        if (!kept.empty() && c.offset < previous + window) {
            if (c.distance < kept.back().distance)
                kept.back() = c;
        } else {
            kept.push_back(c);
        }
        previous = c.offset;
    }
    return kept;
}

ScanReport scan_full(const Query& query, std::string_view doc, double threshold, const WindowMetric& metric)
{
    check_threshold(threshold);
    return WindowScanner(doc, query.n).full(query, threshold, metric);
}

ScanReport scan_full(const Query& query, const Document& doc, double threshold, const WindowMetric& metric)
{
    return scan_full(query, std::string_view(doc.normalized()), threshold, metric);
}

ScanReport scan_sampled(const Query& query, std::string_view doc, const SamplingPlan& plan, double threshold,
                        std::size_t phase, const WindowMetric& metric)
{
    check_threshold(threshold);
    return WindowScanner(doc, query.n).sampled(query, plan, threshold, phase, metric);
}

ScanReport scan_sampled(const Query& query, const Document& doc, const SamplingPlan& plan, double threshold,
                        std::size_t phase, const WindowMetric& metric)
{
    return scan_sampled(query, std::string_view(doc.normalized()), plan, threshold, phase, metric);
}

double QueryResult::best_hit_distance() const
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& h : report.hits)
        best = std::min(best, h.distance);
    return best;
}

DocCompareReport doc_compare(const Document& a, const Document& b, const DocCompareOptions& opts)
{
    check_threshold(opts.threshold);
    if (opts.min_len > opts.max_len)
        throw InputError("min_len exceeds max_len");
    if (opts.step == 0 && opts.min_len != opts.max_len)
        throw InputError("length step must be positive");
    if (opts.min_len < opts.n)
        throw InputError("query lengths must be at least n");
    if (opts.max_len > a.size() || opts.max_len > b.size())
        throw InputError("max_len exceeds a document's length");

    const std::string_view text_a = a.normalized();
    const WindowScanner scanner(b.normalized(), opts.n);
    const WindowMetric metric = bhattacharyya_metric();
    std::mt19937_64 rng(opts.seed);

    DocCompareReport out;
    out.options = opts;
    for (std::size_t len = opts.min_len; len <= opts.max_len; len += std::max<std::size_t>(opts.step, 1)) {
        const SamplingPlan plan = make_plan(b.size(), len, opts.alpha, opts.epsilon);
        std::uniform_int_distribution<std::size_t> pick_offset(0, text_a.size() - len);
        for (std::size_t k = 0; k < opts.n_per_len; ++k) {
            const std::size_t offset = pick_offset(rng);
            std::size_t phase = 0;
            if (!plan.full_scan)
                phase = std::uniform_int_distribution<std::size_t>(0, plan.stride - 1)(rng);
            QueryResult r;
            r.length = len;
            r.source_offset = offset;
            r.excerpt = std::string(text_a.substr(offset, len));
            r.report = scanner.sampled(make_query(r.excerpt, opts.n), plan, opts.threshold, phase, metric);
            out.queries.push_back(std::move(r));
        }
        if (opts.step == 0)
            break;
    }

    std::stable_sort(out.queries.begin(), out.queries.end(), [](const QueryResult& x, const QueryResult& y) {
        const double dx = x.best_hit_distance();
        const double dy = y.best_hit_distance();
        if (dx != dy)
            return dx < dy;
        if (x.length != y.length)
            return x.length < y.length;
        return x.source_offset < y.source_offset;
    });
    return out;
}

std::vector<RankedHit> top_hits(const DocCompareReport& report, std::size_t k)
{
    std::vector<RankedHit> all;
    for (std::size_t q = 0; q < report.queries.size(); ++q)
        for (const auto& h : report.queries[q].report.hits)
            all.push_back({q, h});
    std::stable_sort(all.begin(), all.end(),
                     [](const RankedHit& x, const RankedHit& y) { return x.hit.distance < y.hit.distance; });
    if (all.size() > k)
        all.resize(k);
    return all;
}

} // namespace stylo
