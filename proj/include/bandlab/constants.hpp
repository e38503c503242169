#pragma once

// Every tolerance and fixed parameter used by both the library and the
// acceptance suite lives here, so the two can never drift apart.

namespace bandlab::constants {

// Chebyshev engine ----------------------------------------------------------

// Truncation rule for the coefficient sums: K = ceil(t + 12 t^{1/3} + 30).
// The coefficients decay super-exponentially past the turning point k ~ t,
// so this leaves a tail far below double precision.
inline constexpr double kTruncLinear = 1.0;
inline constexpr double kTruncCubeRoot = 12.0;
inline constexpr double kTruncConstant = 30.0;

// Safety factor applied to H/2 inside the Chebyshev vector recursion.  The
// spectrum of a finite sample can poke slightly outside [-1,1]; shrinking
// the argument (and stretching time to compensate) keeps the scalar series
// in its fast-convergence regime.
inline constexpr double kSpectralSafety = 0.05;

// Recursion vectors growing past this norm indicate spectrum far outside
// the admissible window.  Legitimate runs reach exp(K arccosh(edge)) --
// about 1e20 at desk scale when the sample edge pokes a few percent past
// the nominal spectrum -- while a genuine runaway crosses this threshold
// long before the truncation index.
inline constexpr double kRecursionBlowup = 1e30;

// Dense-oracle feasibility cap on the total number of sites.
inline constexpr int kDenseCap = 4096;

// Default series tolerance for propagator evolutions.
inline constexpr double kEvolveTol = 1e-10;

// Acceptance tolerances ------------------------------------------------------

// 1. propagator cross-method agreement
inline constexpr double kTolChebVsDense = 1e-8;
inline constexpr double kTolNbVsDense = 1e-7;

// 2. nonbacktracking recursion vs exhaustive path enumeration
inline constexpr double kTolNbExact = 1e-12;

// 3. coefficient laws
inline constexpr double kTolAlphaOrthonormality = 1e-10;
inline constexpr double kACoeffBoundConstant = 3.0;       // |a_n| <= 3 t^n/n!
inline constexpr double kACoeffMassSlackFactor = 5.0;     // sum |a_n|^2 <= 1 + 5/M

// 4. limit law of the coefficient distribution
inline constexpr double kTolLimitCdf = 0.02;              // sup gap at t = 2000
inline constexpr double kCdfHalvingSlack = 1.5;           // err(2t) <= 1.5 err(t)
inline constexpr double kTolClosedFormCdf = 1e-12;

// 5. macroscopic diffusion reproduction.  The comparison tolerance was
// frozen after the calibration run at (d=1, W=24, kappa=0.3, T=1, 2000
// samples): the systematic finite-W gap against the limiting profile is
// 0.055 for the gaussian test function (eta = W^{0.3} ~ 2.6 is still far
// from the asymptotic coefficient distribution) and shrinks monotonically
// with W (0.0549 / 0.0446 / 0.0385 at W = 24 / 48 / 96).
inline constexpr double kTolTheorem1 = 0.08;              // |lhs - rhs| <= tol + 3 stderr
inline constexpr double kTolLadderTV = 0.05;              // TV(Monte Carlo, ladder)

// 7./8. combinatorics and delocalization
inline constexpr double kBoundAuditConstant = 10.0;       // C in the R_x audit
inline constexpr double kDelocFractionCap = 0.5;          // = 2 sqrt(eps) + 0.1 at eps = 0.04
inline constexpr double kDelocEpsilon = 0.04;
inline constexpr double kDelocSlack = 0.1;

// 9. conservation checks
inline constexpr double kTolQuadrature = 1e-8;
inline constexpr double kTolMass = 1e-8;

// Subexponential-set inclusion parameters (gamma, K, delta < 2^-gamma).
inline constexpr double kSubexpGamma = 1.0;
inline constexpr double kSubexpK = 2.0;
inline constexpr double kSubexpDelta = 0.4;

}  // namespace bandlab::constants
