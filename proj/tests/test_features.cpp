#include <doctest.h>

#include "stylo/error.hpp"
#include "stylo/features.hpp"
#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace stylo;

namespace {

Document doc(const std::string& id, const std::string& text)
{
    return Document::from_raw(id, text, Script::Latin);
}

} // namespace

TEST_CASE("ngram counts by hand")
{
    const auto aab = build_ngram_model("aab", 2);
    CHECK(aab.gram_counts == std::map<std::string, std::size_t>{{"aa", 1}, {"ab", 1}});
    CHECK(aab.context_counts == std::map<std::string, std::size_t>{{"a", 2}});

    const auto banana = build_ngram_model("banana", 2);
    CHECK(banana.gram_counts == std::map<std::string, std::size_t>{{"ba", 1}, {"an", 2}, {"na", 2}});
    CHECK(banana.total_grams() == 5);

    CHECK(conditional_probability(build_ngram_model("aaaa", 2), "a", 'a') == 1.0);
}

TEST_CASE("ngram model rejects short text and n < 2")
{
    CHECK_THROWS_AS(build_ngram_model("a", 2), InputError);
    CHECK_THROWS_AS(build_ngram_model("abc", 1), InputError);
    CHECK_NOTHROW(build_ngram_model("ab", 2));
}

TEST_CASE("space handling in ngram models")
{
    const auto d = doc("d", "ab ab");
    CHECK(build_ngram_model(d, 2).gram_counts.count("b ") == 1);
    const auto no_space = build_ngram_model(d, 2, GramOptions{false});
    CHECK(no_space.gram_counts == std::map<std::string, std::size_t>{{"ab", 2}, {"ba", 1}});
    CHECK(no_space.source_length == 4);
}

TEST_CASE("conditional probability")
{
    const auto m = build_ngram_model("aab", 2);
    CHECK(conditional_probability(m, "a", 'b') == doctest::Approx(0.5));
    CHECK(conditional_probability(m, "a", 'a') == doctest::Approx(0.5));
    CHECK(conditional_probability(m, "a", 'z') == 0.0);
    CHECK_THROWS_AS(conditional_probability(m, "b", 'a'), UndefinedContextError);
    CHECK_THROWS_AS(conditional_probability(m, "ab", 'a'), InputError);
}

TEST_CASE("gram distribution")
{
    const auto aab = gram_distribution(build_ngram_model("aab", 2));
    CHECK(aab("aa") == doctest::Approx(0.5));
    CHECK(aab("ab") == doctest::Approx(0.5));
    const auto aaaa = gram_distribution(build_ngram_model("aaaa", 2));
    CHECK(aaaa.size() == 1);
    CHECK(aaaa("aa") == 1.0);
    const auto banana = gram_distribution(build_ngram_model("banana", 2));
    CHECK(banana("ba") == doctest::Approx(0.2));
    CHECK(banana("an") == doctest::Approx(0.4));
    CHECK(banana("na") == doctest::Approx(0.4));
    CHECK_THROWS_AS(gram_distribution(NGramModel{}), InputError);
}

TEST_CASE("ngram counts match brute-force enumeration")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 3;
        const auto text = synth::random_string(rng, n + rng() % 49, "abc");
        const auto m = build_ngram_model(text, n);
        CHECK(m.gram_counts == synth::brute_gram_counts(text, n));
        CHECK(m.context_counts == synth::brute_context_counts(text, n));

        std::size_t total = 0;
        for (const auto& [g, c] : m.gram_counts) {
            CHECK(g.size() == n);
            total += c;
        }
        CHECK(total == text.size() - n + 1);

        for (const auto& [ctx, count] : m.context_counts) {
            double sum = 0.0;
            for (char x : std::string("abc"))
                sum += conditional_probability(m, ctx, x);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
        double mass = 0.0;
        const auto dist = gram_distribution(m);
        for (double p : dist.mass())
            mass += p;
        CHECK(std::abs(mass - 1.0) <= 1e-9);
    }
}

TEST_CASE("gram distribution under self-concatenation")
{
    // Single-symbol text: the distribution is unchanged exactly.
    const auto one = gram_distribution(build_ngram_model("aaaaa", 3));
    const auto twice = gram_distribution(build_ngram_model("aaaaaaaaaa", 3));
    CHECK(one.support() == twice.support());
    CHECK(one.mass() == twice.mass());

    // General text: total variation bounded by (n-1)/(L-n+1).
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 2;
        const auto text = synth::random_string(rng, 10 + rng() % 60, "abcd");
        const auto p = gram_distribution(build_ngram_model(text, n));
        const auto q = gram_distribution(build_ngram_model(text + text, n));
        std::set<std::string> keys(p.support().begin(), p.support().end());
        keys.insert(q.support().begin(), q.support().end());
        double tv = 0.0;
        for (const auto& k : keys)
            tv += std::abs(p(k) - q(k));
        tv *= 0.5;
        CHECK(tv <= static_cast<double>(n - 1) / static_cast<double>(text.size() - n + 1) + 1e-12);
    }
}

TEST_CASE("feature space construction")
{
    const Corpus c({doc("x", "aab"), doc("y", "abb")});
    CHECK(build_feature_space(c, 2).grams() == std::vector<std::string>{"aa", "ab", "bb"});
    CHECK(build_feature_space(Corpus({doc("z", "aaaa")}), 2).grams() == std::vector<std::string>{"aa"});
    CHECK(build_feature_space(c, 2, 1).grams() == std::vector<std::string>{"ab"});
    // ties at count 1 between aa and bb go to aa
    CHECK(build_feature_space(c, 2, 2).grams() == std::vector<std::string>{"aa", "ab"});
    CHECK_THROWS_AS(build_feature_space(Corpus{}, 2), InputError);
    CHECK_THROWS_AS(FeatureSpace(2, {"ab", "aa"}), InputError);
    CHECK_THROWS_AS(FeatureSpace(2, {"abc"}), InputError);
    CHECK(FeatureSpace(2, {"aa"}).id() != FeatureSpace(2, {"ab"}).id());
}

TEST_CASE("ngram vectorization")
{
    const FeatureSpace space(2, {"aa", "ab", "bb"});
    const auto aab = build_ngram_model("aab", 2);

    const auto joint = vectorize_ngram(aab, space);
    CHECK(joint.values.size() == 3);
    CHECK(joint.values[0] == doctest::Approx(0.5));
    CHECK(joint.values[1] == doctest::Approx(0.5));
    CHECK(joint.values[2] == 0.0);
    CHECK(joint.space_id == space.id());

    const auto cond = vectorize_ngram(aab, space, NGramMode::Conditional);
    CHECK(cond.values[0] == doctest::Approx(0.5));
    CHECK(cond.values[1] == doctest::Approx(0.5));
    CHECK(cond.values[2] == 0.0);

    const auto single = vectorize_ngram(build_ngram_model("aaaa", 2), FeatureSpace(2, {"aa"}));
    CHECK(single.values[0] == 1.0);

    CHECK_THROWS_AS(vectorize_ngram(build_ngram_model("aaaa", 3), space), InputError);
}

TEST_CASE("joint vectors sum to at most one")
{
    std::mt19937_64 rng(9);
    const Corpus c({doc("a", synth::random_string(rng, 80, "abcd")), doc("b", synth::random_string(rng, 80, "abcd"))});
    const auto full = build_feature_space(c, 2);
    const auto truncated = build_feature_space(c, 2, 4);
    for (const auto& d : c) {
        const auto m = build_ngram_model(d, 2);
        CHECK(vectorize_ngram(m, full).values.sum() == doctest::Approx(1.0).epsilon(1e-12));
        const double partial = vectorize_ngram(m, truncated).values.sum();
        CHECK(partial <= 1.0);
        CHECK((vectorize_ngram(m, truncated).values.array() >= 0.0).all());
    }
}

TEST_CASE("tf-idf fit and scores")
{
    const Corpus c({doc("a", "roma roma et urbs"), doc("b", "et arma"), doc("c", "et virum")});
    const auto model = tfidf_fit(c);
    CHECK(model.corpus_size() == 3);
    CHECK(model.doc_frequency("roma") == 1);
    CHECK(model.doc_frequency("et") == 3);
    CHECK(model.doc_frequency("troia") == 0);

    CHECK(tfidf_score(model, "roma", c[0]) == doctest::Approx(2.0 * std::log(3.0 / 2.0)));
    CHECK(tfidf_score(model, "roma", c[0]) == doctest::Approx(0.8109).epsilon(1e-4));
    CHECK(tfidf_score(model, "roma", c[1]) == 0.0);
    CHECK(tfidf_score(model, "et", c[1]) == doctest::Approx(std::log(3.0 / 4.0)));
    CHECK(tfidf_score(model, "et", c[1]) == doctest::Approx(-0.2877).epsilon(1e-4));

    CHECK_THROWS_AS(tfidf_fit(Corpus{}), InputError);
}

TEST_CASE("tf-idf score vanishes for absent terms")
{
    std::mt19937_64 rng(1);
    std::vector<Document> docs;
    for (int i = 0; i < 6; ++i)
        docs.push_back(doc("d" + std::to_string(i), synth::random_string(rng, 60, "abc  ")));
    const Corpus c(docs);
    const auto model = tfidf_fit(c);
    for (const auto& d : c)
        for (const auto& term : tfidf_vocabulary(c))
            if (std::find(d.tokens().begin(), d.tokens().end(), term) == d.tokens().end())
                CHECK(tfidf_score(model, term, d) == 0.0);
}

TEST_CASE("tf-idf vectorization")
{
    const Corpus c({doc("a", "roma roma et urbs"), doc("b", "et arma"), doc("c", "et virum")});
    const auto model = tfidf_fit(c);

    const auto roma = tfidf_vectorize(model, c[0], {"roma"});
    CHECK(roma.values[0] == doctest::Approx(0.8109).epsilon(1e-4));
    CHECK(roma.kind == VectorKind::TfIdf);

    const auto et = tfidf_vectorize(model, c[1], {"et"});
    CHECK(et.values[0] == doctest::Approx(-0.2877).epsilon(1e-4));

    const auto none = tfidf_vectorize(model, c[2], {"arma", "roma", "urbs"});
    CHECK(none.values.isZero());

    CHECK_THROWS_AS(tfidf_vectorize(model, c[0], {"roma", "et"}), InputError);
    CHECK(tfidf_vocabulary(c) == std::vector<std::string>{"arma", "et", "roma", "urbs", "virum"});
}

TEST_CASE("incremental tf-idf matches a batch fit")
{
    const Corpus c({doc("a", "roma et"), doc("b", "et arma")});
    TfIdfModel inc;
    inc.add(c[0]);
    CHECK(inc.corpus_size() == 1);
    inc.add(c[1]);
    CHECK(inc.doc_frequencies() == tfidf_fit(c).doc_frequencies());
    CHECK_THROWS_AS(TfIdfModel::from_counts(1, {{"et", 2}}), InputError);
}
