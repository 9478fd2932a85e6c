#pragma once

#if __has_include("json.hpp")
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

namespace ltsens {

/// JSON tree with insertion-ordered objects.
using Json = nlohmann::ordered_json;

}  // namespace ltsens
