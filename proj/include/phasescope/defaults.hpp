#pragma once

// Versioned defaults shared by the CLI and echoed into every manifest.

#include <cstddef>

namespace phasescope::defaults {

inline constexpr const char* kVersion = "phasescope-defaults/1";

// signal grids
inline constexpr double kHalfWidth1 = 12.0;
inline constexpr std::size_t kSamples1 = 256;
inline constexpr double kHalfWidth2 = 12.0;
inline constexpr std::size_t kSamples2 = 64;

// kernels on R^{2d}, d = 1
inline constexpr double kKernelHalfWidth = 8.0;
inline constexpr std::size_t kKernelSamples = 32;

// symbol classification
inline constexpr double kSlopeTol = 0.25;
inline constexpr double kCeiling = 1e3;
inline constexpr double kShellRMin = 2.0;
inline constexpr std::size_t kShells = 8;
inline constexpr double kFloorRel = 1e-11;

// conormal membership
inline constexpr int kConormalOrder = 2;
inline constexpr int kConormalN = 4;

// wave-front estimation
inline constexpr double kApertureDeg1 = 10.0;
inline constexpr double kApertureDeg2 = 60.0;
inline constexpr double kThreshold = 4.0;
inline constexpr double kWfRMin = 3.0;
inline constexpr double kWfRMaxFrac = 0.8;
inline constexpr std::size_t kDirections1 = 64;
inline constexpr std::size_t kDirections2 = 512;

// Q^s
inline constexpr double kMaxAbsS = 10.0;

inline constexpr unsigned long long kSeed = 0;

}  // namespace phasescope::defaults
