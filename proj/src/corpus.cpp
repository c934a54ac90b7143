#include "stylo/corpus.hpp"

#include "stylo/error.hpp"

#include <json.hpp>

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace stylo {

namespace {

bool is_space(unsigned char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_punct(unsigned char c)
{
    return c >= 0x21 && c <= 0x7e && !is_lower(c) && !is_upper(c) && !is_digit(c);
}

unsigned char fold(unsigned char c) { return is_upper(c) ? static_cast<unsigned char>(c - 'A' + 'a') : c; }

// Beta Code letters: the Latin letters minus j and v.
bool is_beta_letter(unsigned char c) { return is_lower(c) && c != 'j' && c != 'v'; }

// Shared driver: `map` returns the byte to emit, 0 to drop it silently
// (no dropped-byte count) or -1 to drop and count it.
template <typename Map>
Normalized collapse(std::string_view raw, Map map)
{
    Normalized out;
    out.text.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (is_space(c)) {
            pending_space = !out.text.empty();
            continue;
        }
        const int mapped = map(c);
        if (mapped < 0) {
            ++out.dropped_bytes;
            continue;
        }
        if (mapped == 0)
            continue;
        if (pending_space) {
            out.text.push_back(' ');
            pending_space = false;
        }
        out.text.push_back(static_cast<char>(mapped));
    }
    return out;
}

} // namespace

std::string_view to_string(Script script)
{
    return script == Script::Greek ? "greek" : "latin";
}

Script script_from_string(std::string_view name)
{
    std::string lowered(name);
    for (auto& c : lowered)
        c = static_cast<char>(fold(static_cast<unsigned char>(c)));
    if (lowered == "latin")
        return Script::Latin;
    if (lowered == "greek")
        return Script::Greek;
    throw InputError("unknown script '" + std::string(name) + "' (expected latin or greek)");
}

Normalized normalize_latin_counted(std::string_view raw, const NormalizationOptions& opts)
{
    return collapse(raw, [&](unsigned char c) -> int {
        if (is_lower(c))
            return c;
        if (is_upper(c))
            return opts.lowercase ? fold(c) : c;
        if (is_digit(c))
            return opts.strip_digits ? -1 : c;
        if (is_punct(c))
            return opts.strip_punctuation ? -1 : c;
        return -1;
    });
}

Normalized normalize_greek_counted(std::string_view raw, const NormalizationOptions& opts)
{
    return collapse(raw, [&](unsigned char c) -> int {
        switch (c) {
        case ')': case '(': case '/': case '\\': case '=': case '|': case '+': case '*':
            return 0;
        default:
            break;
        }
        const unsigned char f = fold(c);
        if (is_beta_letter(f))
            return f;
        if (is_digit(c))
            return opts.strip_digits ? -1 : c;
        if (is_punct(c))
            return opts.strip_punctuation ? -1 : c;
        return -1;
    });
}

Normalized normalize_counted(std::string_view raw, Script script, const NormalizationOptions& opts)
{
    return script == Script::Greek ? normalize_greek_counted(raw, opts) : normalize_latin_counted(raw, opts);
}

std::string normalize_latin(std::string_view raw, const NormalizationOptions& opts)
{
    return normalize_latin_counted(raw, opts).text;
}

std::string normalize_greek(std::string_view raw, const NormalizationOptions& opts)
{
    return normalize_greek_counted(raw, opts).text;
}

std::vector<std::string> tokenize(std::string_view normalized)
{
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start <= normalized.size()) {
        std::size_t end = normalized.find(' ', start);
        if (end == std::string_view::npos)
            end = normalized.size();
        if (end > start)
            tokens.emplace_back(normalized.substr(start, end - start));
        start = end + 1;
    }
    return tokens;
}

Document Document::from_raw(std::string id, std::string_view raw, Script script,
                            const NormalizationOptions& opts)
{
    Normalized n = normalize_counted(raw, script, opts);
    Document doc;
    doc.id_ = std::move(id);
    doc.raw_ = std::string(raw);
    doc.normalized_ = std::move(n.text);
    doc.tokens_ = tokenize(doc.normalized_);
    doc.script_ = script;
    doc.dropped_bytes_ = n.dropped_bytes;
    return doc;
}

Document Document::from_normalized(std::string id, std::string normalized, Script script)
{
    if (normalized.empty())
        throw InputError("document '" + id + "' is empty");
    // The widest option set: only whitespace layout and out-of-alphabet
    // bytes can change, so a mismatch means the text was never normalized.
    const NormalizationOptions keep_all{false, false, false};
    if (normalize_counted(normalized, script, keep_all).text != normalized)
        throw InputError("document '" + id + "' is not normalized text");
    Document doc;
    doc.id_ = std::move(id);
    doc.raw_ = normalized;
    doc.normalized_ = std::move(normalized);
    doc.tokens_ = tokenize(doc.normalized_);
    doc.script_ = script;
    return doc;
}

std::vector<Document> chunk(const Document& doc, std::size_t window, std::size_t stride, bool keep_partial)
{
    if (window == 0 || stride == 0)
        throw InputError("chunk window and stride must be positive");
    const std::size_t len = doc.normalized().size();
    if (window > len)
        throw InputError("chunk window " + std::to_string(window) + " exceeds document length " +
                         std::to_string(len));

    std::vector<Document> chunks;
    for (std::size_t offset = 0; offset < len; offset += stride) {
        const std::size_t take = std::min(window, len - offset);
        if (take < window && !keep_partial)
            break;
        Document c;
        c.id_ = doc.id() + "#" + std::to_string(offset);
        c.normalized_ = doc.normalized().substr(offset, take);
        c.raw_ = c.normalized_;
        c.tokens_ = tokenize(c.normalized_);
        c.script_ = doc.script();
        chunks.push_back(std::move(c));
        if (offset + take == len)
            break;
    }
    return chunks;
}

Corpus::Corpus(std::vector<Document> documents)
{
    documents_.reserve(documents.size());
    for (auto& d : documents)
        add(std::move(d));
}

void Corpus::add(Document doc)
{
    if (!documents_.empty() && documents_.front().script() != doc.script())
        throw InputError("document '" + doc.id() + "' has a different script from the corpus");
    for (const auto& d : documents_)
        if (d.id() == doc.id())
            throw InputError("duplicate document id '" + doc.id() + "'");
    documents_.push_back(std::move(doc));
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(manifest));
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("manifest '" + manifest.string() + "' is not valid JSON: " + e.what());
    }
    const nlohmann::json* records = &j;
    if (j.is_object()) {
        if (!j.contains("documents"))
            throw InputError("manifest '" + manifest.string() + "' has no \"documents\" array");
        records = &j.at("documents");
    }
    if (!records->is_array())
        throw InputError("manifest '" + manifest.string() + "' must list document records");

    const auto base = manifest.parent_path();
    std::vector<ManifestEntry> entries;
    for (const auto& r : *records) {
        if (!r.is_object() || !r.contains("path") || !r.at("path").is_string())
            throw InputError("manifest record without a \"path\" string: " + r.dump());
        ManifestEntry e;
        e.path = r.at("path").get<std::string>();
        if (e.path.is_relative())
            e.path = base / e.path;
        e.id = r.contains("id") ? r.at("id").get<std::string>() : e.path.stem().string();
        if (r.contains("script"))
            e.script = script_from_string(r.at("script").get<std::string>());
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace stylo
