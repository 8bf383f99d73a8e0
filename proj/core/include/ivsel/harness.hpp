#pragma once

#include "ivsel/sampler.hpp"
#include "ivsel/scad.hpp"
#include "ivsel/simgen.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ivsel {

struct Metrics {
    Index tp = 0;
    Index fp = 0;
    double mse_s = 0.0;  ///< sum of squared errors over the true support
    double mse_n = 0.0;  ///< sum of squared estimates off the support
};

/// Median-probability model: j selected iff inclusion_prob_j > threshold.
SparsityPattern select_model(const ChainResult& chain, double threshold = 0.5);

/// Posterior mean of the masked coefficient delta_j * theta_j.
Vector point_estimate(const ChainResult& chain);

Metrics compute_metrics(const Vector& theta_hat, const SparsityPattern& delta_hat,
                        const GroundTruth& truth);

/// Nearest-rank quantile of sorted values: the ceil(prob * N)-th smallest,
/// clamped to [1, N].
double nearest_rank_quantile(const std::vector<double>& sorted, double prob);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Equal-tailed interval of the masked draws of coordinate j.
Interval credible_interval(const ChainResult& chain, Index j, double level);

/// Fraction of recorded draws with ||theta_delta - theta_star||_2 <= radius.
double ball_fraction(const ChainResult& chain, const Vector& theta_star, double radius);

/// Fraction of draws that also satisfy ||theta - theta_delta||_2 <= spike_radius;
/// needs full_theta_draws.
double joint_ball_fraction(const ChainResult& chain, const Vector& theta_star, double radius,
                           double spike_radius);

/// Tuning rule used in the simulation studies, with optional overrides:
/// 1/rho^2 = log(p q)/sqrt(n), gamma = 10/p, lambda = n (Setup 1) or n^(1/3)
/// (Setup 2), u = 1, s_bar = min(p, floor(n / log p)).
///
/// The nominal lambda refers to the instruments on their original scale. With
/// `raw_scale_lambda` set, the lambda handed to the sampler (which works on
/// unit-norm instruments) is nominal / mean_l(scale_l^2), and
/// sum_l <W_l, r>^2 / lambda matches its value on the original instruments.
struct HyperPolicy {
    std::optional<double> lambda;
    std::optional<double> rho_sq;
    std::optional<double> gamma;
    std::optional<double> u;
    std::optional<Index> s_bar;
    bool raw_scale_lambda = true;

    double nominal_lambda(Setup setup, Index n) const;
    /// Hyperparameters with the nominal lambda.
    HyperParams nominal(Setup setup, Index n, Index p, Index q) const;
    /// Hyperparameters for a normalized design, lambda rescaled as above.
    HyperParams resolve(Setup setup, const DesignData& data) const;
};

/// mean_l(instrument_scales_l^2); 1 when the design carries no scales.
double mean_squared_instrument_scale(const DesignData& data);

/// SCAD initialization followed by one chain.
ChainResult fit_chain(const DesignData& data, const HyperParams& hyper, const InstrumentMap& map,
                      const ChainConfig& config, const ScadOptions& scad = {});

struct ReplicationConfig {
    SimScenario scenario;  ///< scenario.seed is the base seed
    int replicates = 1;
    ChainConfig chain;
    HyperPolicy hyper_policy;
    ScadOptions scad;
    double threshold = 0.5;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

struct ReplicateRecord {
    int index = 0;
    std::uint64_t data_seed = 0;
    std::uint64_t chain_seed = 0;
    bool ok = false;
    std::string error;
    Metrics metrics;
    double lambda = 0.0;  ///< lambda used by this replicate's sampler
    double accept_rate_single = 0.0;
    double accept_rate_double = 0.0;
    double seconds = 0.0;
};

struct Summary {
    double mean = 0.0;
    double sd = 0.0;
};

/// Mean and sample standard deviation (n - 1 divisor; 0 for a single value),
/// accumulated with compensated summation.
Summary summarize(const std::vector<double>& values);

struct AggregateReport {
    SimScenario scenario;
    HyperParams hyper;          ///< nominal values
    bool raw_scale_lambda = true;
    Summary lambda_used;        ///< across successful replicates
    int requested = 0;
    int succeeded = 0;
    int failed = 0;
    Summary tp, fp, mse_s, mse_n;
    Summary mse_s_per_coord, mse_n_per_coord;
    std::vector<ReplicateRecord> replicates;  ///< ordered by index
    double wall_seconds = 0.0;
    double mean_replicate_seconds = 0.0;
};

/// One chain per replicate; replicates run concurrently on independent
/// streams and are aggregated in index order.
AggregateReport run_replications(const ReplicationConfig& config);

/// Aggregate already-computed replicate records (successful ones only).
void aggregate(AggregateReport& report, Index p);

}  // namespace ivsel
