#pragma once

namespace qrt {

inline constexpr char kToolName[] = "qrt";
inline constexpr char kToolVersion[] = "0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace qrt
