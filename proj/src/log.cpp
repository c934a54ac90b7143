#include "stylo/log.hpp"

#include <iostream>
#include <mutex>
#include <string>
#include <utility>

namespace stylo {

namespace {

std::mutex& sink_mutex()
{
    static std::mutex m;
    return m;
}

LogSink& sink()
{
    static LogSink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return s;
}

} // namespace

LogSink set_warning_sink(LogSink next)
{
    std::lock_guard lock(sink_mutex());
    return std::exchange(sink(), std::move(next));
}

void warn(std::string_view message)
{
    std::lock_guard lock(sink_mutex());
    if (sink())
        sink()(message);
}

} // namespace stylo
