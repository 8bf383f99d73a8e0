#pragma once

// Exact, cache-free evaluation of the spike-and-slab quasi-posterior and the
// contraction diagnostics. Everything here recomputes from (y, X, W) directly
// and serves as the reference the incremental sampler is checked against.

#include "ivsel/types.hpp"

#include <cstdint>
#include <vector>

namespace ivsel {

using InstrumentMask = std::vector<std::uint8_t>;

/// Scales every instrument column to unit Euclidean norm and records the
/// original norms. Columns already within 1e-14 of unit norm are left
/// bit-for-bit unchanged with scale 1. Throws ZeroColumn.
DesignData normalize_instruments(DesignData data);

/// T(delta): instruments switched on by the active regressors (union of groups).
InstrumentMask instrument_set(const SparsityPattern& delta, const InstrumentMap& map, Index q);

/// Column indices of the set bits of `mask`.
std::vector<Index> mask_indices(const InstrumentMask& mask);

/// log N(x; 0, variance), including the normalizing constant.
double log_normal_density(double x, double variance);

/// -(1/2 lambda) * sum over l in T(delta) of <w_l, y - X theta_delta>^2,
/// where theta_delta zeroes the inactive coordinates.
double log_quasi_likelihood(const DesignData& data, const SparsityPattern& delta,
                            const Vector& theta, const HyperParams& hyper,
                            const InstrumentMap& map);

/// count log q + (p - count) log(1 - q), or -inf when count > s_bar.
double log_sparsity_weight(Index count, Index p, const HyperParams& hyper);

/// Unnormalized log prior weight of the pattern; -inf when |delta| > s_bar.
double log_prior_sparsity(const SparsityPattern& delta, const HyperParams& hyper);

/// Sum of log N(theta_j; 0, 1/rho_sq) over active j and log N(theta_j; 0, gamma)
/// over inactive j.
double log_prior_coefficients(const Vector& theta, const SparsityPattern& delta,
                              const HyperParams& hyper);

double log_posterior_unnormalized(const DesignData& data, const SparsityPattern& delta,
                                  const Vector& theta, const HyperParams& hyper,
                                  const InstrumentMap& map);

/// log of the pattern weight times the closed-form integral of the
/// quasi-likelihood against the slab over theta_delta (inactive coordinates
/// integrate to one). -inf for excluded patterns.
double log_marginal_delta(const DesignData& data, const SparsityPattern& delta,
                          const HyperParams& hyper, const InstrumentMap& map);

/// Every pattern with at most `s_bar` active bits, in mask order. p <= 20.
std::vector<SparsityPattern> enumerate_patterns(Index p, Index s_bar);

struct PatternProbability {
    SparsityPattern delta;
    double log_marginal = 0.0;
    double probability = 0.0;
};

/// Exact delta-posterior by enumeration of every admissible pattern.
std::vector<PatternProbability> exact_delta_posterior(const DesignData& data,
                                                      const HyperParams& hyper,
                                                      const InstrumentMap& map);

struct RestrictedEigen {
    double v_low = 0.0;
    double v_high = 0.0;
};

/// Extreme eigenvalues of (M' M / n) restricted to the support of delta, with
/// M = W_{T(delta)}' X. Throws EmptyPattern.
RestrictedEigen restricted_eigen_diagnostics(const DesignData& data, const SparsityPattern& delta,
                                             const InstrumentMap& map);

/// 2 sqrt(2) sigma0 (kappa1 / kappa_low) sqrt((s_bar + s_star) t_bar log(p q) / n).
double contraction_epsilon(double sigma0, double kappa1, double kappa_low, Index s_bar,
                           Index s_star, Index t_bar, Index p, Index q, Index n);

struct DiagnosticOptions {
    double sigma0 = 1.0;
    std::size_t samples = 200;
    std::uint64_t seed = 20180517;
    bool exhaustive = false;  ///< enumerate every admissible pattern; p <= 12
};

/// t_bar, kappa1, kappa_low and the contraction radius epsilon.
///
/// t_bar is the sum of the s_bar largest group sizes, exact when the groups are
/// disjoint and an upper bound otherwise. kappa1 is computed exactly for
/// disjoint groups (per regressor, the s_bar groups carrying the most energy);
/// with overlapping groups it is maximized over the examined patterns.
/// kappa_low is the minimum restricted eigenvalue over the examined patterns,
/// which are either a seeded random sample or the full enumeration.
/// Throws DegenerateDesign when kappa_low <= machine epsilon.
EigenDiagnostics contraction_radius(const DesignData& data, const HyperParams& hyper,
                                    const InstrumentMap& map, Index s_star,
                                    const DiagnosticOptions& options = {});

}  // namespace ivsel
