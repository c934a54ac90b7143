#pragma once

#include <functional>
#include <string_view>

namespace stylo {

using LogSink = std::function<void(std::string_view)>;

/// Replaces the warning sink (stderr by default) and returns the previous
/// one. An empty sink silences warnings.
LogSink set_warning_sink(LogSink sink);

void warn(std::string_view message);

} // namespace stylo
