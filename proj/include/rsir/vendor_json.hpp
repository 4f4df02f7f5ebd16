#pragma once

// nlohmann/json lives in vendor/ (single header) or on the system include path.
#if __has_include(<json.hpp>)
#include <json.hpp>
#else
#include <nlohmann/json.hpp>
#endif
