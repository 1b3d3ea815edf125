#pragma once

namespace skyres {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kSnapshotFormatVersion = 1;

} // namespace skyres
