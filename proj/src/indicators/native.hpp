#pragma once

#include "tafs/indicators.hpp"

#include <vector>

namespace tafs::indicators {

struct NativeDefinition {
    std::string name;
    Params defaults;
    IndicatorFactory make;
};

std::vector<NativeDefinition> native_definitions();

}  // namespace tafs::indicators
