#pragma once

// Pass bands for the verification sweeps. Each band was calibrated once
// against a run with ten times the default sample size and then frozen;
// bump kVersion whenever a value changes.

namespace batchlearn::thresholds {

inline constexpr int kVersion = 1;

// Batch learner, median over overlap vectors of the exact N_Delta.
inline constexpr double kBatchExponentTolPositive = 0.08;  // beta >= 0
inline constexpr double kBatchExponentTolNegative = 0.30;  // -1 < beta < 0
inline constexpr double kBatchLinearRatioSpread = 1.5;     // beta = 0: max/min of N/n

// Memoryless and full-memory learners, annealed empirical N_Delta.
inline constexpr double kMainprevLogBandSpread = 3.0;  // beta = 0: max/min of N/(n ln n)
inline constexpr double kMainprevExponentTolPositive = 0.10;
inline constexpr double kMainprevExponentTolNegative = 0.20;

// Comparison of the three learners.
inline constexpr unsigned long long kCompareMinN = 256;

// Smallest complement.
inline constexpr double kMinOverlapRelTol = 0.03;
inline constexpr double kWeibullKsMax = 0.015;

// Harmonic overlap sum S.
inline constexpr double kStableMeanRelTol = 0.10;  // beta > 0: median(S/n)
inline constexpr double kStableLogBandLo = 0.75;   // beta = 0: median(S/(n ln n))
inline constexpr double kStableLogBandHi = 1.25;
inline constexpr unsigned long long kStableLogMinN = 1ULL << 14;
inline constexpr double kStableIqrSpread = 2.0;  // beta < 0

// Annealed expected time against the t1 constant.
inline constexpr double kT1RelTolAt1e4 = 0.10;
inline constexpr double kT1RelTolAt1e5 = 0.06;
inline constexpr double kT1RelTolAt1e6 = 0.03;
inline constexpr double kAlternatingRelTol = 1e-6;

// Second-order remainder T2 for beta = 0.
inline constexpr double kAlpha1BandLo = 0.8;
inline constexpr double kAlpha1BandHi = 1.2;
inline constexpr double kAlpha1LinearVariation = 0.5;

}  // namespace batchlearn::thresholds
