#include "stylo/features.hpp"

#include "stylo/digest.hpp"
#include "stylo/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace stylo {

NGramModel build_ngram_model(std::string_view text, std::size_t n)
{
    if (n < 2)
        throw InputError("n-gram order must be at least 2");
    if (text.size() < n)
        throw InputError("text of length " + std::to_string(text.size()) + " is shorter than n = " +
                         std::to_string(n));

    NGramModel model;
    model.n = n;
    model.source_length = text.size();
    for (std::size_t i = 0; i + n <= text.size(); ++i) {
        ++model.gram_counts[std::string(text.substr(i, n))];
        ++model.context_counts[std::string(text.substr(i, n - 1))];
    }
    return model;
}

NGramModel build_ngram_model(const Document& doc, std::size_t n, const GramOptions& opts)
{
    if (opts.include_spaces)
        return build_ngram_model(doc.normalized(), n);
    std::string letters;
    letters.reserve(doc.normalized().size());
    std::copy_if(doc.normalized().begin(), doc.normalized().end(), std::back_inserter(letters),
                 [](char c) { return c != ' '; });
    return build_ngram_model(letters, n);
}

double conditional_probability(const NGramModel& model, std::string_view context, char next)
{
    if (context.size() + 1 != model.n)
        throw InputError("context length must be n - 1 = " + std::to_string(model.n - 1));
    std::string key(context);
    const auto ctx = model.context_counts.find(key);
    if (ctx == model.context_counts.end() || ctx->second == 0)
        throw UndefinedContextError("context '" + key + "' is never followed by a character");
    key.push_back(next);
    const auto gram = model.gram_counts.find(key);
    if (gram == model.gram_counts.end())
        return 0.0;
    return static_cast<double>(gram->second) / static_cast<double>(ctx->second);
}

DiscreteDistribution gram_distribution(const NGramModel& model)
{
    if (model.gram_counts.empty())
        throw InputError("n-gram model has no grams");
    std::vector<std::pair<std::string, double>> weights;
    weights.reserve(model.gram_counts.size());
    for (const auto& [gram, count] : model.gram_counts)
        weights.emplace_back(gram, static_cast<double>(count));
    return DiscreteDistribution::from_weights(std::move(weights));
}

FeatureSpace::FeatureSpace(std::size_t n, std::vector<std::string> grams)
    : n_(n), grams_(std::move(grams))
{
    for (std::size_t i = 0; i < grams_.size(); ++i) {
        if (grams_[i].size() != n_)
            throw InputError("feature space gram '" + grams_[i] + "' does not have length " + std::to_string(n_));
        if (i > 0 && !(grams_[i - 1] < grams_[i]))
            throw InputError("feature space grams must be sorted and unique");
    }
    Fnv1a64 h;
    h.update("ngram:").update(std::to_string(n_)).update("\n");
    for (const auto& g : grams_)
        h.update(g).update("\n");
    id_ = "ngram-" + h.hex();
}

std::optional<std::size_t> FeatureSpace::index_of(std::string_view gram) const
{
    const auto it = std::lower_bound(grams_.begin(), grams_.end(), gram);
    if (it == grams_.end() || *it != gram)
        return std::nullopt;
    return static_cast<std::size_t>(it - grams_.begin());
}

FeatureSpace build_feature_space(const Corpus& corpus, std::size_t n, std::optional<std::size_t> top_k,
                                 const GramOptions& opts)
{
    if (corpus.empty())
        throw InputError("cannot build a feature space over an empty corpus");

    std::map<std::string, std::size_t> totals;
    for (const auto& doc : corpus)
        for (const auto& [gram, count] : build_ngram_model(doc, n, opts).gram_counts)
            totals[gram] += count;

    std::vector<std::pair<std::string, std::size_t>> ranked(totals.begin(), totals.end());
    if (top_k && *top_k < ranked.size()) {
        // `ranked` is already in lexicographic order, so a stable sort by
        // count keeps the smaller gram first among ties.
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        ranked.resize(*top_k);
        std::sort(ranked.begin(), ranked.end());
    }
    std::vector<std::string> grams;
    grams.reserve(ranked.size());
    for (auto& [gram, count] : ranked)
        grams.push_back(std::move(gram));
    return {n, std::move(grams)};
}

std::string_view to_string(NGramMode mode)
{
    return mode == NGramMode::Conditional ? "conditional" : "joint";
}

NGramMode ngram_mode_from_string(std::string_view name)
{
    if (name == "joint")
        return NGramMode::Joint;
    if (name == "conditional")
        return NGramMode::Conditional;
    throw InputError("unknown n-gram mode '" + std::string(name) + "' (expected joint or conditional)");
}

FeatureVector vectorize_ngram(const NGramModel& model, const FeatureSpace& space, NGramMode mode)
{
    if (model.n != space.n())
        throw InputError("model n = " + std::to_string(model.n) + " does not match feature space n = " +
                         std::to_string(space.n()));

    FeatureVector v;
    v.space_id = space.id();
    v.kind = VectorKind::Probability;
    v.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dimension()));

    const double total = static_cast<double>(model.total_grams());
    for (const auto& [gram, count] : model.gram_counts) {
        const auto idx = space.index_of(gram);
        if (!idx)
            continue;
        const auto i = static_cast<Eigen::Index>(*idx);
        if (mode == NGramMode::Joint) {
            v.values[i] = static_cast<double>(count) / total;
        } else {
            const auto ctx = model.context_counts.at(gram.substr(0, model.n - 1));
            v.values[i] = static_cast<double>(count) / static_cast<double>(ctx);
        }
    }
    return v;
}

void TfIdfModel::add(const Document& doc)
{
    ++corpus_size_;
    std::vector<std::string> terms = doc.tokens();
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& t : terms)
        ++doc_frequency_[std::move(t)];
}

std::size_t TfIdfModel::doc_frequency(const std::string& term) const
{
    const auto it = doc_frequency_.find(term);
    return it == doc_frequency_.end() ? 0 : it->second;
}

TfIdfModel TfIdfModel::from_counts(std::size_t corpus_size, std::map<std::string, std::size_t> doc_frequency)
{
    for (const auto& [term, df] : doc_frequency)
        if (df > corpus_size)
            throw InputError("document frequency of '" + term + "' exceeds the corpus size");
    TfIdfModel m;
    m.corpus_size_ = corpus_size;
    m.doc_frequency_ = std::move(doc_frequency);
    return m;
}

TfIdfModel tfidf_fit(const Corpus& corpus)
{
    if (corpus.empty())
        throw InputError("cannot fit tf-idf on an empty corpus");
    TfIdfModel model;
    for (const auto& doc : corpus)
        model.add(doc);
    return model;
}

double tfidf_score(const TfIdfModel& model, const std::string& term, const Document& doc)
{
    const auto tf = std::count(doc.tokens().begin(), doc.tokens().end(), term);
    if (tf == 0)
        return 0.0;
    const double idf = std::log(static_cast<double>(model.corpus_size()) /
                                (1.0 + static_cast<double>(model.doc_frequency(term))));
    return static_cast<double>(tf) * idf;
}

std::vector<std::string> tfidf_vocabulary(const Corpus& corpus)
{
    std::vector<std::string> vocab;
    for (const auto& doc : corpus)
        vocab.insert(vocab.end(), doc.tokens().begin(), doc.tokens().end());
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    return vocab;
}

std::string vocabulary_id(const std::vector<std::string>& vocab)
{
    Fnv1a64 h;
    h.update("tfidf\n");
    for (const auto& t : vocab)
        h.update(t).update("\n");
    return "tfidf-" + h.hex();
}

FeatureVector tfidf_vectorize(const TfIdfModel& model, const Document& doc, const std::vector<std::string>& vocab)
{
    for (std::size_t i = 1; i < vocab.size(); ++i)
        if (!(vocab[i - 1] < vocab[i]))
            throw InputError("tf-idf vocabulary must be sorted and unique");

    std::unordered_map<std::string_view, std::size_t> counts;
    for (const auto& t : doc.tokens())
        ++counts[t];

    FeatureVector v;
    v.space_id = vocabulary_id(vocab);
    v.kind = VectorKind::TfIdf;
    v.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab.size()));
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        const auto it = counts.find(vocab[i]);
        if (it == counts.end())
            continue;
        const double idf = std::log(static_cast<double>(model.corpus_size()) /
                                    (1.0 + static_cast<double>(model.doc_frequency(vocab[i]))));
        v.values[static_cast<Eigen::Index>(i)] = static_cast<double>(it->second) * idf;
    }
    return v;
}

} // namespace stylo
