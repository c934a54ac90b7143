#pragma once

#include "stylo/corpus.hpp"
#include "stylo/metrics.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

struct GramOptions
{
    /// When false, spaces are removed before counting so grams never span
    /// or contain a word boundary.
    bool include_spaces = true;
};

/// Character n-gram counts of one text. `context_counts` holds each
/// (n-1)-prefix counted only where a following character exists, so for
/// every context c the grams c+x sum to context_counts[c].
struct NGramModel
{
    std::size_t n = 2;
    std::map<std::string, std::size_t> gram_counts;
    std::map<std::string, std::size_t> context_counts;
    std::size_t source_length = 0;

    std::size_t total_grams() const noexcept { return source_length >= n ? source_length - n + 1 : 0; }
};

/// One left-to-right pass over `text`. Throws InputError when n < 2 or the
/// text is shorter than n.
NGramModel build_ngram_model(std::string_view text, std::size_t n);
NGramModel build_ngram_model(const Document& doc, std::size_t n, const GramOptions& opts = {});

/// count(context + next) / count(context). Zero for an unseen gram after a
/// seen context; UndefinedContextError when the context was never followed.
double conditional_probability(const NGramModel& model, std::string_view context, char next);

/// Gram counts normalized by their total.
DiscreteDistribution gram_distribution(const NGramModel& model);

/// Sorted, unique grams of a single length; the coordinate system shared
/// by every vector built over a corpus.
class FeatureSpace
{
public:
    FeatureSpace() = default;
    FeatureSpace(std::size_t n, std::vector<std::string> grams);

    std::size_t n() const noexcept { return n_; }
    const std::vector<std::string>& grams() const noexcept { return grams_; }
    std::size_t dimension() const noexcept { return grams_.size(); }

    /// Content hash of n and the gram list.
    const std::string& id() const noexcept { return id_; }

    /// Index of `gram`, or nullopt when it is not a coordinate.
    std::optional<std::size_t> index_of(std::string_view gram) const;

private:
    std::size_t n_ = 0;
    std::vector<std::string> grams_;
    std::string id_;
};

/// Union of corpus grams in lexicographic order. With `top_k`, only the
/// top_k grams by total corpus count survive (ties go to the
/// lexicographically smaller gram).
FeatureSpace build_feature_space(const Corpus& corpus, std::size_t n,
                                 std::optional<std::size_t> top_k = std::nullopt,
                                 const GramOptions& opts = {});

enum class VectorKind { Probability, TfIdf };
enum class NGramMode { Joint, Conditional };

std::string_view to_string(NGramMode mode);
NGramMode ngram_mode_from_string(std::string_view name);

struct FeatureVector
{
    Eigen::VectorXd values;
    std::string space_id;
    VectorKind kind = VectorKind::Probability;

    Eigen::Index size() const noexcept { return values.size(); }
};

/// Projects a model onto `space`. Grams outside the space are dropped
/// without renormalizing. In conditional mode an unseen context yields 0.
FeatureVector vectorize_ngram(const NGramModel& model, const FeatureSpace& space,
                              NGramMode mode = NGramMode::Joint);

/// Document frequencies over a growing corpus.
class TfIdfModel
{
public:
    TfIdfModel() = default;

    /// Folds one more document into the counts. Not safe to call while
    /// other threads read the model.
    void add(const Document& doc);

    std::size_t corpus_size() const noexcept { return corpus_size_; }
    std::size_t doc_frequency(const std::string& term) const;
    const std::map<std::string, std::size_t>& doc_frequencies() const noexcept { return doc_frequency_; }

    /// Rebuilds a model from stored counts.
    static TfIdfModel from_counts(std::size_t corpus_size, std::map<std::string, std::size_t> doc_frequency);

private:
    std::size_t corpus_size_ = 0;
    std::map<std::string, std::size_t> doc_frequency_;
};

TfIdfModel tfidf_fit(const Corpus& corpus);

/// count(term, doc) * ln(|D| / (1 + df(term))). Terms present in every
/// document get a negative weight.
double tfidf_score(const TfIdfModel& model, const std::string& term, const Document& doc);

/// Sorted, unique tokens of every corpus document.
std::vector<std::string> tfidf_vocabulary(const Corpus& corpus);

/// Hash id of a vocabulary, used as the space id of tf-idf vectors.
std::string vocabulary_id(const std::vector<std::string>& vocab);

/// Entry i is tfidf_score(vocab[i]); may be negative. Throws InputError when
/// the vocabulary is not sorted and unique.
FeatureVector tfidf_vectorize(const TfIdfModel& model, const Document& doc, const std::vector<std::string>& vocab);

} // namespace stylo
