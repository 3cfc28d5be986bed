#pragma once

// Generated by tests/oracles/gen_oracles.py (mpmath, 30 digits).

namespace oracle {

inline constexpr double kQ_1_0_1 = 0.2419707245191433498;
inline constexpr double kNonCross_1_1 = 0.86466471676338730811;
inline constexpr double kMeanderLaplace1 = 4.4770518117036944669;
inline constexpr double kMeanderLaplaceNeg2 = 0.15726154142389105355;
inline constexpr double kRayleighMean = 1.2533141373155002512;
inline constexpr double kLinearSurvival_1_1 = 0.90958222643351444685;
inline constexpr double kLinearSurvival_1_m1 = 0.33189799877682939357;
inline constexpr double kLinearSurvival_0p5_0p3_h2 = 0.39037187867774796447;
inline constexpr double kGateauxSetA = 0.37865249949960148769;
inline constexpr double kGateauxSetB = 0.4415677257144203542;
inline constexpr double kDanielsG1 = 0.79245751819388816713;
inline constexpr double kDanielsDensity1 = 0.19382600527129537849;
inline constexpr double kDanielsDensity0p3 = 0.58541310616733298008;
inline constexpr double kDanielsF1 = 1.3301420890964035975;

}  // namespace oracle
