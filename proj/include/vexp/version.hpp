#pragma once

namespace vexp {

inline constexpr const char* version_string = "0.1.0";
inline constexpr const char* csv_schema_version = "1";

} // namespace vexp
