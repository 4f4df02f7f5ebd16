#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rsir {

using ItemIndex = std::uint32_t;
using UserIndex = std::uint32_t;
using ItemList = std::vector<ItemIndex>;

}  // namespace rsir
