#include "stylo/cli.hpp"

#include "stylo/digest.hpp"
#include "stylo/error.hpp"
#include "stylo/features.hpp"
#include "stylo/intertext.hpp"
#include "stylo/log.hpp"
#include "stylo/metrics.hpp"
#include "stylo/ocsvm.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace stylo::cli {

namespace {

constexpr const char* kVersion = "stylo 0.1.0";

json normalization_json(const NormalizationOptions& o)
{
    return {{"lowercase", o.lowercase}, {"strip_punctuation", o.strip_punctuation}, {"strip_digits", o.strip_digits}};
}

json input_digest(const std::filesystem::path& path)
{
    return {{"path", path.generic_string()}, {"fnv1a64", fnv1a64_hex(read_file(path))}};
}

json run_stanza(const std::string& command, json parameters, std::uint64_t seed, json inputs)
{
    return {{"tool", kVersion},
            {"command", command},
            {"parameters", std::move(parameters)},
            {"seed", seed},
            {"inputs", std::move(inputs)}};
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw InputError("cannot write '" + path.string() + "'");
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Writes `text` to `out_path` when given, otherwise to the stream.
void emit(const std::string& out_path, const std::string& text, std::ostream& out)
{
    if (out_path.empty())
        out << text;
    else
        write_text(out_path, text);
}

Document load_document(const std::filesystem::path& path, Script script, const NormalizationOptions& opts)
{
    Document doc = Document::from_raw(path.stem().string(), read_file(path), script, opts);
    if (doc.empty())
        throw InputError("'" + path.string() + "' is empty after normalization");
    return doc;
}

// Feature extraction frozen at training time and replayed for test documents.
struct Featurizer
{
    bool tfidf = false;
    FeatureSpace space;
    NGramMode mode = NGramMode::Joint;
    GramOptions gram;
    TfIdfModel tfidf_model;
    std::vector<std::string> vocabulary;

    std::size_t n() const { return space.n(); }

    FeatureVector operator()(const Document& doc) const
    {
        if (tfidf)
            return tfidf_vectorize(tfidf_model, doc, vocabulary);
        return vectorize_ngram(build_ngram_model(doc, space.n(), gram), space, mode);
    }

    std::string space_id() const { return tfidf ? vocabulary_id(vocabulary) : space.id(); }

    json to_json() const
    {
        if (tfidf) {
            return {{"kind", "tfidf"},
                    {"vocabulary", vocabulary},
                    {"corpus_size", tfidf_model.corpus_size()},
                    {"doc_frequency", tfidf_model.doc_frequencies()},
                    {"space_id", space_id()}};
        }
        return {{"kind", "ngram"},
                {"mode", std::string(stylo::to_string(mode))},
                {"include_spaces", gram.include_spaces},
                {"space", stylo::to_json(space)}};
    }

    static Featurizer from_json(const json& j)
    {
        Featurizer f;
        try {
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "tfidf") {
                f.tfidf = true;
                f.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
                f.tfidf_model = TfIdfModel::from_counts(
                    j.at("corpus_size").get<std::size_t>(),
                    j.at("doc_frequency").get<std::map<std::string, std::size_t>>());
            } else if (kind == "ngram") {
                f.space = feature_space_from_json(j.at("space"));
                f.mode = ngram_mode_from_string(j.at("mode").get<std::string>());
                f.gram.include_spaces = j.value("include_spaces", true);
            } else {
                throw InputError("unknown feature kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw InputError(std::string("malformed feature section: ") + e.what());
        }
        return f;
    }
};

Eigen::MatrixXd featurize(const Featurizer& f, const Corpus& corpus)
{
    std::vector<FeatureVector> rows;
    rows.reserve(corpus.size());
    for (const auto& d : corpus)
        rows.push_back(f(d));
    Eigen::MatrixXd X = stack_rows(rows);
    if (rows.empty())
        X.resize(0, static_cast<Eigen::Index>(f.tfidf ? f.vocabulary.size() : f.space.dimension()));
    return X;
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("bad grid value '" + item + "'");
        }
    }
    if (values.empty())
        throw InputError("empty grid '" + text + "'");
    return values;
}

void add_normalization_flags(CLI::App* cmd, NormalizationOptions& o)
{
    cmd->add_flag("!--keep-case", o.lowercase, "Do not lowercase");
    cmd->add_flag("!--keep-punctuation", o.strip_punctuation, "Keep ASCII punctuation");
    cmd->add_flag("!--keep-digits", o.strip_digits, "Keep digits");
}

} // namespace

IngestResult ingest(const std::filesystem::path& manifest, const NormalizationOptions& opts)
{
    IngestResult result;
    json docs = json::array();
    json errors = json::array();
    std::optional<Script> script;

    for (const auto& entry : read_manifest(manifest)) {
        auto fail = [&](const std::string& reason) {
            errors.push_back({{"id", entry.id}, {"path", entry.path.generic_string()}, {"reason", reason}});
            warn("skipping '" + entry.id + "': " + reason);
        };
        std::string raw;
        try {
            raw = read_file(entry.path);
        } catch (const InputError& e) {
            fail(e.what());
            continue;
        }
        if (script && *script != entry.script) {
            fail("script differs from the rest of the corpus");
            continue;
        }
        Document doc = Document::from_raw(entry.id, raw, entry.script, opts);
        if (doc.empty()) {
            fail("empty after normalization");
            continue;
        }
        try {
            result.corpus.add(doc);
        } catch (const InputError& e) {
            fail(e.what());
            continue;
        }
        script = entry.script;
        docs.push_back({{"id", doc.id()},
                        {"script", std::string(to_string(doc.script()))},
                        {"source", entry.path.generic_string()},
                        {"raw_bytes", raw.size()},
                        {"dropped_bytes", doc.dropped_bytes()},
                        {"normalized", doc.normalized()}});
    }

    result.archive = {{"format", "stylo-corpus"},
                      {"version", 1},
                      {"normalization", normalization_json(opts)},
                      {"documents", std::move(docs)},
                      {"errors", std::move(errors)}};
    return result;
}

Corpus load_corpus(const std::filesystem::path& path, const NormalizationOptions& opts)
{
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (!(j.is_object() && j.value("format", std::string()) == "stylo-corpus"))
        return ingest(path, opts).corpus;

    Corpus corpus;
    try {
        for (const auto& d : j.at("documents"))
            corpus.add(Document::from_normalized(d.at("id").get<std::string>(), d.at("normalized").get<std::string>(),
                                                 script_from_string(d.at("script").get<std::string>())));
    } catch (const json::exception& e) {
        throw InputError("malformed corpus archive '" + path.string() + "': " + e.what());
    }
    return corpus;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Character n-gram stylometry: attribution with a one-class SVM and intertext search", "stylo"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    std::string out_path;
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--out", out_path, "Output path (prefix for commands that write JSON and CSV)");
    app.set_config("--config", "", "TOML/INI file of option values; flags override it");
    app.set_version_flag("--version", kVersion);

    std::function<int()> action;

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Normalize a manifest of text files into a corpus archive");
    std::string manifest;
    NormalizationOptions ingest_norm;
    ingest_cmd->add_option("manifest", manifest, "JSON manifest of {id, path, script} records")->required();
    add_normalization_flags(ingest_cmd, ingest_norm);
    ingest_cmd->callback([&] {
        action = [&] {
            IngestResult r = ingest(manifest, ingest_norm);
            r.archive["run"] = run_stanza("ingest", {{"normalization", normalization_json(ingest_norm)}}, seed,
                                          json::array({input_digest(manifest)}));
            emit(out_path, dump(r.archive), out);
            return r.archive["errors"].empty() ? kSuccess : kInputError;
        };
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a one-class SVM on a corpus of one author's texts");
    std::string train_corpus;
    std::size_t n = 2;
    std::string mode = "joint";
    std::optional<std::size_t> top_k;
    bool no_spaces = false;
    bool use_tfidf = false;
    double nu = 0.5;
    std::optional<double> gamma;
    bool grid = false;
    std::string nu_grid_text;
    std::string gamma_grid_text;
    std::string holdout_in;
    std::string holdout_out;
    double tol = 1e-6;
    std::size_t max_passes = 1000;
    NormalizationOptions train_norm;
    train_cmd->add_option("corpus", train_corpus, "Corpus archive or manifest")->required();
    train_cmd->add_option("--n", n, "n-gram order")->capture_default_str()->check(CLI::Range(2, 16));
    train_cmd->add_option("--mode", mode, "joint or conditional")
        ->capture_default_str()
        ->check(CLI::IsMember({"joint", "conditional"}));
    train_cmd->add_option("--top-k", top_k, "Keep the most frequent grams only")->check(CLI::PositiveNumber);
    train_cmd->add_flag("--no-spaces", no_spaces, "Exclude spaces from n-grams");
    train_cmd->add_flag("--tfidf", use_tfidf, "Use tf-idf word features instead of n-grams");
    train_cmd->add_option("--nu", nu, "Outlier fraction bound in (0, 1]")->capture_default_str();
    train_cmd->add_option("--gamma", gamma, "RBF width (default 1/dimension)");
    train_cmd->add_flag("--grid", grid, "Grid-search nu and gamma");
    train_cmd->add_option("--nu-grid", nu_grid_text, "Comma-separated nu values");
    train_cmd->add_option("--gamma-grid", gamma_grid_text, "Comma-separated gamma values");
    train_cmd->add_option("--holdout-in", holdout_in, "Held-out texts by the same author");
    train_cmd->add_option("--holdout-out", holdout_out, "Held-out texts by other authors");
    train_cmd->add_option("--tol", tol, "KKT tolerance")->capture_default_str();
    train_cmd->add_option("--max-passes", max_passes, "Iteration cap in units of l")->capture_default_str();
    add_normalization_flags(train_cmd, train_norm);
    train_cmd->callback([&] {
        action = [&] {
            const Corpus corpus = load_corpus(train_corpus, train_norm);
            if (corpus.empty())
                throw InputError("training corpus has no documents");
            if (corpus.size() == 1)
                warn("training on a single document gives the degenerate l = 1 model");

            Featurizer f;
            if (use_tfidf) {
                f.tfidf = true;
                f.tfidf_model = tfidf_fit(corpus);
                f.vocabulary = tfidf_vocabulary(corpus);
            } else {
                f.gram.include_spaces = !no_spaces;
                f.mode = ngram_mode_from_string(mode);
                f.space = build_feature_space(corpus, n, top_k, f.gram);
            }
            const Eigen::MatrixXd X = featurize(f, corpus);

            TrainConfig cfg;
            cfg.nu = nu;
            cfg.tol = tol;
            cfg.max_passes = max_passes;
            cfg.seed = seed;
            KernelSpec kernel{gamma.value_or(1.0 / static_cast<double>(std::max<Eigen::Index>(X.cols(), 1)))};

            json grid_json;
            json inputs = json::array({input_digest(train_corpus)});
            if (grid) {
                const auto nus = nu_grid_text.empty() ? default_nu_grid() : parse_grid(nu_grid_text);
                const auto gammas = gamma_grid_text.empty() ? default_gamma_grid(X.cols()) : parse_grid(gamma_grid_text);
                Eigen::MatrixXd Xin(0, X.cols());
                Eigen::MatrixXd Xout(0, X.cols());
                if (!holdout_in.empty()) {
                    Xin = featurize(f, load_corpus(holdout_in, train_norm));
                    inputs.push_back(input_digest(holdout_in));
                }
                if (!holdout_out.empty()) {
                    Xout = featurize(f, load_corpus(holdout_out, train_norm));
                    inputs.push_back(input_digest(holdout_out));
                }
                const GridResult g = grid_search(X, Xin, Xout, nus, gammas, cfg);
                if (g.weak)
                    warn("no holdout sets: grid search scored on training acceptance only");
                cfg = g.config;
                kernel = g.kernel;
                json cells = json::array();
                for (const auto& c : g.cells) {
                    json cell = {{"nu", c.nu}, {"gamma", c.gamma}, {"ok", c.ok}};
                    if (c.ok)
                        cell["score"] = c.score;
                    else
                        cell["error"] = c.error;
                    cells.push_back(std::move(cell));
                }
                grid_json = {{"best_nu", cfg.nu}, {"best_gamma", kernel.gamma}, {"best_score", g.score},
                             {"weak", g.weak}, {"cells", std::move(cells)}};
            }

            TrainReport report = train_detailed(X, cfg, kernel);
            report.model.space_id = f.space_id();

            json params = {{"n", n},          {"mode", mode},     {"no_spaces", no_spaces}, {"tfidf", use_tfidf},
                           {"nu", cfg.nu},    {"gamma", kernel.gamma}, {"grid", grid},     {"tol", tol},
                           {"max_passes", max_passes}, {"normalization", normalization_json(train_norm)}};
            if (top_k)
                params["top_k"] = *top_k;

            json model_file = {{"format", "stylo-model"},
                               {"version", 1},
                               {"features", f.to_json()},
                               {"model", to_json(report.model)},
                               {"training",
                                {{"objective", report.objective},
                                 {"kkt_violation", report.kkt_violation},
                                 {"iterations", report.iterations},
                                 {"rho_fallback", report.rho_fallback},
                                 {"alpha_sum", report.model.alphas.sum()},
                                 {"documents", corpus.size()}}},
                               {"run", run_stanza("train", std::move(params), seed, std::move(inputs))}};
            if (grid)
                model_file["grid"] = std::move(grid_json);
            emit(out_path, dump(model_file), out);
            return kSuccess;
        };
    });

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Signed hyperplane distance and label for test texts");
    std::string model_path;
    std::string test_path;
    std::optional<std::size_t> classify_n;
    NormalizationOptions classify_norm;
    classify_cmd->add_option("model", model_path, "Model file written by train")->required();
    classify_cmd->add_option("tests", test_path, "Corpus archive or manifest of test texts")->required();
    classify_cmd->add_option("--n", classify_n, "Expected n-gram order (must match the model)");
    add_normalization_flags(classify_cmd, classify_norm);
    classify_cmd->callback([&] {
        action = [&] {
            json mj;
            try {
                mj = json::parse(read_file(model_path));
            } catch (const json::parse_error& e) {
                throw InputError("model file is not valid JSON: " + std::string(e.what()));
            }
            const Featurizer f = Featurizer::from_json(mj.at("features"));
            OcsvmModel model = ocsvm_from_json(mj.contains("model") ? mj.at("model") : mj);
            if (classify_n && !f.tfidf && *classify_n != f.n())
                throw InputError("requested n = " + std::to_string(*classify_n) + " but the model was trained with n = " +
                                 std::to_string(f.n()));

            const Corpus tests = test_path.empty() ? Corpus{} : load_corpus(test_path, classify_norm);
            std::ostringstream csv;
            csv << "id,decision_value,label\n";
            json rows = json::array();
            for (const auto& doc : tests) {
                const double d = decision_value(model, f(doc));
                const auto label = std::string(to_string(label_of(d)));
                csv << csv_field(doc.id()) << ',' << format_double(d) << ',' << label << '\n';
                rows.push_back({{"id", doc.id()}, {"decision_value", d}, {"label", label}});
            }
            emit(out_path, csv.str(), out);
            if (!out_path.empty()) {
                json sidecar = {{"rows", std::move(rows)},
                                {"run", run_stanza("classify", {{"normalization", normalization_json(classify_norm)}},
                                                   seed, json::array({input_digest(model_path), input_digest(test_path)}))}};
                write_text(out_path + ".run.json", dump(sidecar));
            }
            return kSuccess;
        };
    });

    // distance
    auto* distance_cmd = app.add_subcommand("distance", "Bhattacharyya distance between two texts' gram distributions");
    std::string doc_a;
    std::string doc_b;
    std::size_t distance_n = 2;
    std::string script_name = "latin";
    bool distance_no_spaces = false;
    NormalizationOptions distance_norm;
    distance_cmd->add_option("a", doc_a, "First text file")->required()->check(CLI::ExistingFile);
    distance_cmd->add_option("b", doc_b, "Second text file")->required()->check(CLI::ExistingFile);
    distance_cmd->add_option("--n", distance_n, "n-gram order")->capture_default_str()->check(CLI::Range(2, 16));
    distance_cmd->add_option("--script", script_name, "latin or greek")->capture_default_str();
    distance_cmd->add_flag("--no-spaces", distance_no_spaces, "Exclude spaces from n-grams");
    add_normalization_flags(distance_cmd, distance_norm);
    distance_cmd->callback([&] {
        action = [&] {
            const Script script = script_from_string(script_name);
            const GramOptions gram{!distance_no_spaces};
            const auto p = gram_distribution(build_ngram_model(load_document(doc_a, script, distance_norm), distance_n, gram));
            const auto q = gram_distribution(build_ngram_model(load_document(doc_b, script, distance_norm), distance_n, gram));
            const double d = bhattacharyya_distance(p, q);
            out << format_double(d) << '\n';
            if (!out_path.empty()) {
                json report = {{"distance", json_number(d)},
                               {"coefficient", bhattacharyya_coefficient(p, q)},
                               {"run", run_stanza("distance",
                                                  {{"n", distance_n}, {"script", script_name},
                                                   {"no_spaces", distance_no_spaces},
                                                   {"normalization", normalization_json(distance_norm)}},
                                                  seed, json::array({input_digest(doc_a), input_digest(doc_b)}))}};
                write_text(out_path, dump(report));
            }
            return kSuccess;
        };
    });

    // intertext
    auto* intertext_cmd = app.add_subcommand("intertext", "Search a document for windows close to a query passage");
    std::string query_path;
    std::string target_path;
    bool full = false;
    double alpha = 0.05;
    double epsilon = 0.1;
    double threshold = 0.05;
    std::size_t scan_n = 2;
    std::size_t phase = 0;
    std::string scan_script = "latin";
    NormalizationOptions scan_norm;
    intertext_cmd->add_option("query", query_path, "Query passage file")->required()->check(CLI::ExistingFile);
    intertext_cmd->add_option("document", target_path, "Document file to search")->required()->check(CLI::ExistingFile);
    intertext_cmd->add_flag("--full", full, "Compare every window instead of sampling");
    intertext_cmd->add_option("--alpha", alpha, "Miss probability bound")->capture_default_str();
    intertext_cmd->add_option("--epsilon", epsilon, "Deviation tolerance")->capture_default_str();
    intertext_cmd->add_option("--threshold", threshold, "Largest distance counted as a match")->capture_default_str();
    intertext_cmd->add_option("--n", scan_n, "n-gram order")->capture_default_str()->check(CLI::Range(2, 16));
    intertext_cmd->add_option("--phase", phase, "Offset of the first sampled window")->capture_default_str();
    intertext_cmd->add_option("--script", scan_script, "latin or greek")->capture_default_str();
    add_normalization_flags(intertext_cmd, scan_norm);
    intertext_cmd->callback([&] {
        action = [&] {
            const Script script = script_from_string(scan_script);
            const Document query_doc = load_document(query_path, script, scan_norm);
            const Document target = load_document(target_path, script, scan_norm);
            if (query_doc.size() >= target.size())
                throw InputError("the query must be shorter than the document");
            const Query query = make_query(query_doc, scan_n);
            ScanReport report;
            if (full)
                report = scan_full(query, target, threshold);
            else
                report = scan_sampled(query, target, make_plan(target.size(), query.m(), alpha, epsilon), threshold, phase);

            json j = to_json(report);
            j["run"] = run_stanza("intertext",
                                  {{"full", full}, {"alpha", alpha}, {"epsilon", epsilon}, {"threshold", threshold},
                                   {"n", scan_n}, {"phase", phase}, {"script", scan_script},
                                   {"normalization", normalization_json(scan_norm)}},
                                  seed, json::array({input_digest(query_path), input_digest(target_path)}));
            if (out_path.empty()) {
                out << dump(j);
            } else {
                write_text(out_path + ".json", dump(j));
                write_text(out_path + ".csv", scan_report_csv(report));
            }
            return kSuccess;
        };
    });

    // doc-compare
    auto* compare_cmd = app.add_subcommand("doc-compare", "Sample passages of one document and search the other");
    std::string compare_a;
    std::string compare_b;
    DocCompareOptions copt;
    std::string compare_script = "latin";
    NormalizationOptions compare_norm;
    compare_cmd->add_option("a", compare_a, "Document to draw queries from")->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("b", compare_b, "Document to search")->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("--n-per-len", copt.n_per_len, "Queries per length")->capture_default_str();
    compare_cmd->add_option("--min-len", copt.min_len, "Shortest query")->capture_default_str();
    compare_cmd->add_option("--max-len", copt.max_len, "Longest query")->capture_default_str();
    compare_cmd->add_option("--step", copt.step, "Length step")->capture_default_str();
    compare_cmd->add_option("--alpha", copt.alpha, "Miss probability bound")->capture_default_str();
    compare_cmd->add_option("--epsilon", copt.epsilon, "Deviation tolerance")->capture_default_str();
    compare_cmd->add_option("--threshold", copt.threshold, "Largest distance counted as a match")->capture_default_str();
    compare_cmd->add_option("--n", copt.n, "n-gram order")->capture_default_str()->check(CLI::Range(2, 16));
    compare_cmd->add_option("--script", compare_script, "latin or greek")->capture_default_str();
    add_normalization_flags(compare_cmd, compare_norm);
    compare_cmd->callback([&] {
        action = [&] {
            const Script script = script_from_string(compare_script);
            copt.seed = seed;
            const DocCompareReport report = doc_compare(load_document(compare_a, script, compare_norm),
                                                        load_document(compare_b, script, compare_norm), copt);
            json j = to_json(report);
            j["run"] = run_stanza("doc-compare", j["options"], seed,
                                  json::array({input_digest(compare_a), input_digest(compare_b)}));
            if (out_path.empty()) {
                out << dump(j);
            } else {
                write_text(out_path + ".json", dump(j));
                write_text(out_path + ".csv", doc_compare_csv(report));
            }
            return kSuccess;
        };
    });

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        return action ? action() : kInputError;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kConvergenceError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

} // namespace stylo::cli
