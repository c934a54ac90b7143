#include "stylo/serialize.hpp"

#include "stylo/error.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace stylo {

std::string format_double(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

json json_number(double value)
{
    if (std::isfinite(value))
        return value;
    return format_double(value);
}

double number_from_json(const json& j)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
    }
    throw InputError("expected a number, got " + j.dump());
}

json to_json(const FeatureSpace& space)
{
    return {{"n", space.n()}, {"grams", space.grams()}, {"id", space.id()}};
}

FeatureSpace feature_space_from_json(const json& j)
{
    try {
        FeatureSpace space(j.at("n").get<std::size_t>(), j.at("grams").get<std::vector<std::string>>());
        if (j.contains("id") && j.at("id").get<std::string>() != space.id())
            throw InputError("feature space id does not match its gram list");
        return space;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed feature space: ") + e.what());
    }
}

json to_json(const FeatureVector& v)
{
    return {{"space_id", v.space_id},
            {"kind", v.kind == VectorKind::TfIdf ? "tfidf" : "probability"},
            {"values", std::vector<double>(v.values.data(), v.values.data() + v.values.size())}};
}

FeatureVector feature_vector_from_json(const json& j)
{
    try {
        FeatureVector v;
        v.space_id = j.at("space_id").get<std::string>();
        v.kind = j.value("kind", std::string("probability")) == "tfidf" ? VectorKind::TfIdf : VectorKind::Probability;
        const auto values = j.at("values").get<std::vector<double>>();
        v.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
        return v;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed feature vector: ") + e.what());
    }
}

json to_json(const OcsvmModel& model)
{
    json svs = json::array();
    for (Eigen::Index r = 0; r < model.support_vectors.rows(); ++r) {
        const Eigen::VectorXd row = model.support_vectors.row(r).transpose();
        svs.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    return {{"nu", model.nu},
            {"gamma", model.kernel.gamma},
            {"rho", model.rho},
            {"l", model.l},
            {"dimension", model.dimension()},
            {"support_vectors", std::move(svs)},
            {"alphas", std::vector<double>(model.alphas.data(), model.alphas.data() + model.alphas.size())},
            {"space_id", model.space_id}};
}

OcsvmModel ocsvm_from_json(const json& j)
{
    try {
        OcsvmModel m;
        m.nu = j.at("nu").get<double>();
        m.kernel.gamma = j.at("gamma").get<double>();
        m.rho = j.at("rho").get<double>();
        m.l = j.at("l").get<std::size_t>();
        m.space_id = j.value("space_id", std::string());
        const auto alphas = j.at("alphas").get<std::vector<double>>();
        const auto svs = j.at("support_vectors").get<std::vector<std::vector<double>>>();
        if (alphas.size() != svs.size())
            throw InputError("model has " + std::to_string(svs.size()) + " support vectors but " +
                             std::to_string(alphas.size()) + " multipliers");
        Eigen::Index dim = svs.empty() ? j.value("dimension", Eigen::Index{0})
                                       : static_cast<Eigen::Index>(svs.front().size());
        m.support_vectors.resize(static_cast<Eigen::Index>(svs.size()), dim);
        for (std::size_t r = 0; r < svs.size(); ++r) {
            if (static_cast<Eigen::Index>(svs[r].size()) != dim)
                throw InputError("support vectors have inconsistent dimensions");
            for (Eigen::Index c = 0; c < dim; ++c)
                m.support_vectors(static_cast<Eigen::Index>(r), c) = svs[r][static_cast<std::size_t>(c)];
        }
        m.alphas = Eigen::Map<const Eigen::VectorXd>(alphas.data(), static_cast<Eigen::Index>(alphas.size()));
        if (!(m.kernel.gamma > 0.0))
            throw InputError("model gamma must be positive");
        return m;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed model: ") + e.what());
    }
}

json to_json(const SamplingPlan& plan)
{
    return {{"alpha", plan.alpha},       {"epsilon", plan.epsilon},
            {"b", plan.b},               {"stride", plan.stride},
            {"doc_length", plan.doc_length}, {"query_length", plan.query_length},
            {"full_scan", plan.full_scan}};
}

json to_json(const ScanReport& report)
{
    json hits = json::array();
    for (const auto& h : report.hits)
        hits.push_back({{"offset", h.offset}, {"distance", json_number(h.distance)}, {"excerpt", h.excerpt}});
    json j = {{"hits", std::move(hits)},
              {"comparisons_made", report.comparisons_made},
              {"query_length", report.query_length},
              {"threshold", report.threshold},
              {"best_distance", json_number(report.best_distance)},
              {"best_offset", report.best_offset}};
    if (report.plan) {
        j["plan"] = to_json(*report.plan);
        j["phase"] = report.phase;
    }
    if (report.sampled_proportion)
        j["sampled_proportion"] = *report.sampled_proportion;
    if (report.confidence_interval)
        j["confidence_interval"] = {report.confidence_interval->first, report.confidence_interval->second};
    return j;
}

json to_json(const DocCompareReport& report)
{
    const auto& o = report.options;
    json queries = json::array();
    for (const auto& q : report.queries) {
        queries.push_back({{"length", q.length},
                           {"source_offset", q.source_offset},
                           {"excerpt", q.excerpt},
                           {"best_hit_distance", json_number(q.best_hit_distance())},
                           {"report", to_json(q.report)}});
    }
    return {{"options",
             {{"n", o.n},
              {"n_per_len", o.n_per_len},
              {"min_len", o.min_len},
              {"max_len", o.max_len},
              {"step", o.step},
              {"alpha", o.alpha},
              {"epsilon", o.epsilon},
              {"threshold", o.threshold},
              {"seed", o.seed}}},
            {"queries", std::move(queries)}};
}

std::string csv_field(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string scan_report_csv(const ScanReport& report)
{
    std::ostringstream out;
    out << "offset,distance,excerpt\n";
    for (const auto& h : report.hits)
        out << h.offset << ',' << format_double(h.distance) << ',' << csv_field(h.excerpt) << '\n';
    return out.str();
}

std::string doc_compare_csv(const DocCompareReport& report)
{
    std::ostringstream out;
    out << "query_length,source_offset,query_excerpt,offset,distance,excerpt\n";
    for (const auto& q : report.queries) {
        const std::string prefix =
            std::to_string(q.length) + ',' + std::to_string(q.source_offset) + ',' + csv_field(q.excerpt) + ',';
        if (q.report.hits.empty()) {
            out << prefix << ",,\n";
            continue;
        }
        for (const auto& h : q.report.hits)
            out << prefix << h.offset << ',' << format_double(h.distance) << ',' << csv_field(h.excerpt) << '\n';
    }
    return out.str();
}

} // namespace stylo
