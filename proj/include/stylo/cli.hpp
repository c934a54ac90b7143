#pragma once

#include "stylo/corpus.hpp"
#include "stylo/serialize.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace stylo::cli {

enum ExitCode : int { kSuccess = 0, kInputError = 1, kConvergenceError = 2 };

/// Runs the command line `args` (args[0] is the program name). Normal
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct IngestResult
{
    Corpus corpus;
    json archive;
};

/// Normalizes every manifest entry. Unreadable, empty-after-normalization
/// and wrong-script documents are listed under "errors" and skipped.
IngestResult ingest(const std::filesystem::path& manifest, const NormalizationOptions& opts);

/// Loads a corpus archive written by `ingest`, or ingests a manifest.
Corpus load_corpus(const std::filesystem::path& path, const NormalizationOptions& opts = {});

} // namespace stylo::cli
