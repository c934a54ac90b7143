#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace stylo {

/// 64-bit FNV-1a. Stable across platforms; used for content ids, not security.
class Fnv1a64
{
public:
    Fnv1a64& update(std::string_view bytes) noexcept
    {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    std::uint64_t value() const noexcept { return state_; }

    std::string hex() const
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string fnv1a64_hex(std::string_view bytes)
{
    return Fnv1a64{}.update(bytes).hex();
}

} // namespace stylo
