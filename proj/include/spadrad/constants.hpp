#pragma once

namespace spadrad {

inline constexpr double kSecondsPerDay  = 86400.0;
inline constexpr double kSecondsPerYear = 365.25 * kSecondsPerDay;

/// Aluminum bulk density, g cm^-3.
inline constexpr double kAluminumDensity = 2.699;
inline constexpr int    kAluminumZ       = 13;

/// Detector defaults (silicon SPAD near breakdown bias).
inline constexpr double kDefaultAlphaPerC       = 0.09757; // magnitude of the exponential temperature coefficient
inline constexpr double kNielPerDarkCount       = 36.26;   // MeV cm^2 g^-1 of damage per 1 count/s at -10 C
inline constexpr double kReferenceTemperatureC  = -10.0;
inline constexpr double kScalingValidityFloorC  = -100.0;  // coldest temperature the scaling law was measured at

/// Prompt-fluence coefficients, particles cm^-2 per (MT / km^2).
inline constexpr double kPromptNeutronCoeff = 1.6e15;
inline constexpr double kPromptGammaCoeff   = 9.9e14;

/// Worst-case beta trapping fraction for artificial belts.
inline constexpr double kDefaultTrappingEfficiency = 0.10;

} // namespace spadrad
