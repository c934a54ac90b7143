#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

enum class Script { Latin, Greek };

std::string_view to_string(Script script);
Script script_from_string(std::string_view name);

struct NormalizationOptions
{
    bool lowercase = true;
    bool strip_punctuation = true;
    bool strip_digits = true;
};

/// Output of a normalization pass together with the number of input bytes
/// that were discarded because they fall outside the configured alphabet.
/// Whitespace that is collapsed is not counted as dropped.
struct Normalized
{
    std::string text;
    std::size_t dropped_bytes = 0;
};

Normalized normalize_latin_counted(std::string_view raw, const NormalizationOptions& opts = {});
Normalized normalize_greek_counted(std::string_view raw, const NormalizationOptions& opts = {});
Normalized normalize_counted(std::string_view raw, Script script, const NormalizationOptions& opts = {});

/// Latin-script cleaning. The alphabet is the 26 ASCII letters plus space,
/// widened by uppercase letters, digits or ASCII punctuation when the
/// corresponding option is switched off. Non-ASCII bytes are always dropped.
/// Returns an empty string when nothing survives.
std::string normalize_latin(std::string_view raw, const NormalizationOptions& opts = {});

/// Beta Code transliterated Greek. Diacritic markers `) ( / \ = | +`, the
/// capital marker `*`, digits and punctuation are removed and letters are
/// case folded. Output letters are restricted to the 24 Beta Code letters.
std::string normalize_greek(std::string_view raw, const NormalizationOptions& opts = {});

/// Splits on single spaces, skipping empty pieces.
std::vector<std::string> tokenize(std::string_view normalized);

/// A normalized text and its word sequence. Immutable once built.
class Document
{
public:
    /// Normalizes `raw` according to `script` and tokenizes the result.
    static Document from_raw(std::string id, std::string_view raw, Script script,
                             const NormalizationOptions& opts = {});

    /// Wraps text that is already normalized. Throws InputError when the
    /// text is empty or is not a fixed point of normalization.
    static Document from_normalized(std::string id, std::string normalized, Script script);

    const std::string& id() const noexcept { return id_; }
    const std::string& raw() const noexcept { return raw_; }
    const std::string& normalized() const noexcept { return normalized_; }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    Script script() const noexcept { return script_; }
    std::size_t dropped_bytes() const noexcept { return dropped_bytes_; }
    std::size_t size() const noexcept { return normalized_.size(); }
    bool empty() const noexcept { return normalized_.empty(); }

private:
    friend std::vector<Document> chunk(const Document&, std::size_t, std::size_t, bool);

    Document() = default;

    std::string id_;
    std::string raw_;
    std::string normalized_;
    std::vector<std::string> tokens_;
    Script script_ = Script::Latin;
    std::size_t dropped_bytes_ = 0;
};

/// Fixed-width character windows at offsets 0, stride, 2*stride, ...
/// Chunk ids are "{id}#{offset}". The trailing partial window is kept only
/// when `keep_partial` is set. A window may start or end on a space; its
/// tokens are the non-empty words inside it.
std::vector<Document> chunk(const Document& doc, std::size_t window, std::size_t stride,
                            bool keep_partial = false);

/// Ordered documents with unique ids and a common script.
class Corpus
{
public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> documents);

    void add(Document doc);

    const std::vector<Document>& documents() const noexcept { return documents_; }
    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }
    const Document& operator[](std::size_t i) const { return documents_[i]; }

    auto begin() const noexcept { return documents_.begin(); }
    auto end() const noexcept { return documents_.end(); }

private:
    std::vector<Document> documents_;
};

struct ManifestEntry
{
    std::string id;
    std::filesystem::path path;
    Script script = Script::Latin;
};

/// Reads a manifest: either a JSON array of {id, path, script} records or
/// an object with a "documents" array of them. Relative paths resolve
/// against the manifest's directory; a missing id defaults to the file stem
/// and a missing script to Latin.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

std::string read_file(const std::filesystem::path& path);

} // namespace stylo
