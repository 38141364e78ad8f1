#pragma once

#include <cstdint>

namespace tacf {

/// Dense index into Dataset::user_ids.
using UserIndex = std::uint32_t;
/// Dense index into Dataset::item_ids.
using ItemIndex = std::uint32_t;
/// Wall-clock time or age, in whole seconds.
using Seconds = std::int64_t;

}  // namespace tacf
