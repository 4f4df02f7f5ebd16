#pragma once

#include <vector>

namespace rsir::theory {

/// Symbols of the recursive error bound:
///   E_{k+1} = (1 - lambda) E0 + lambda [ (1 - p) rho E_k + p E_max ]
/// with p the fidelity leakage rate. The bound is iterated with equality.
struct ErrorDynamicsParams {
  double lambda = 0.5;   ///< share of generated data in the mixture
  double rho = 0.5;      ///< contraction rate on valid generated data
  double p_tilde = 0.0;  ///< leakage of invalid sequences through the filter
  double e0 = 0.1;       ///< error from the original data alone
  double e_max = 1.0;    ///< loss bound on invalid sequences
};

/// Throws rsir::Error(Domain) when a parameter is outside its range.
void validate(const ErrorDynamicsParams& params);

double step(const ErrorDynamicsParams& params, double e_k);

enum class Trend { Decreasing, Increasing, Plateau, Mixed };

const char* trend_name(Trend trend);

struct Simulation {
  std::vector<double> series;  ///< e_start followed by `steps` iterates
  Trend trend = Trend::Plateau;
};

Simulation simulate(const ErrorDynamicsParams& params, double e_start, int steps);

/// Zero-leakage limit (1 - lambda) E0 / (1 - lambda rho). Requires
/// p_tilde == 0.
double fixed_point(const ErrorDynamicsParams& params);

/// Limit of the recursion for any leakage:
///   [(1 - lambda) E0 + lambda p E_max] / (1 - lambda (1 - p) rho)
double limit(const ErrorDynamicsParams& params);

/// Largest leakage that still lets the error shrink from state e_k:
///   [e_k (1 - lambda rho) - (1 - lambda) E0] / [lambda (E_max - rho e_k)]
/// May be negative. Throws rsir::Error(Domain) for lambda == 0 or a
/// non-positive denominator.
double breakdown_threshold(const ErrorDynamicsParams& params, double e_k);

}  // namespace rsir::theory
