#pragma once

// Metropolis-Hastings-within-Gibbs sampler for the spike-and-slab
// quasi-posterior. Inclusion bits move by single flips (toggle one bit) or
// double flips (swap one active with one inactive bit) at fixed theta; the
// active block of theta is then drawn from its Gaussian full conditional and
// the inactive block from the spike.
//
// Flip ratios are evaluated from cached instrument scores
// s_l = <w_l, y - X theta_delta>, so a proposal costs O(|T(delta)| + |G_j|)
// and an accepted move O(n + q).

#include "ivsel/rng.hpp"
#include "ivsel/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ivsel {

enum class MoveType : std::uint8_t { None, SingleFlip, DoubleFlip };

std::string_view to_string(MoveType move) noexcept;

struct ChainConfig {
    long n_sweeps = 10000;
    long burn_in = 5000;
    long thin = 5;
    std::uint64_t seed = 1;
    long refresh_every = 1000;
    double flip_mix = 0.5;  ///< probability of proposing a single flip
    bool record_theta = true;
    bool record_full_theta = false;  ///< also keep theta with the spike coordinates
    bool record_trace = false;
    double drift_tolerance = 1e-6;

    void validate() const;
};

struct SamplerState {
    SparsityPattern delta;
    Vector theta;     ///< full theta; inactive coordinates hold spike draws
    Vector residual;  ///< y - X theta_delta
    Vector scores;    ///< W' residual, all q instruments
    double log_sparsity = 0.0;
    double log_lik = 0.0;
    double log_coef = 0.0;
    double log_post = 0.0;
    long sweep_index = 0;

    // instrument_count[l] = number of active regressors whose group holds l;
    // active_instruments lists the l with a positive count, and
    // instrument_slot[l] is l's position in that list or -1.
    std::vector<int> instrument_count;
    std::vector<Index> active_instruments;
    std::vector<Index> instrument_slot;

    std::size_t proposed_single = 0;
    std::size_t accepted_single = 0;
    std::size_t proposed_double = 0;
    std::size_t accepted_double = 0;
};

/// A proposed flip together with the log-density components it would produce.
/// For a double flip coords[0] is deactivated and coords[1] activated.
/// log_ratio is the log posterior difference; log_hastings is the log ratio of
/// reverse to forward proposal probabilities, added at the accept step.
struct Proposal {
    MoveType type = MoveType::None;
    std::array<Index, 2> coords{-1, -1};
    int size = 0;
    double log_ratio = 0.0;
    double log_hastings = 0.0;
    double log_sparsity = 0.0;
    double log_lik = 0.0;
    double log_coef = 0.0;
};

struct RefreshReport {
    double residual_drift = 0.0;
    double score_drift = 0.0;
    double log_post_drift = 0.0;
    bool warning = false;

    double max_drift() const;
};

struct TraceRecord {
    long sweep = 0;
    Index active_count = 0;
    double log_post = 0.0;
    MoveType move = MoveType::None;
    bool accepted = false;
};

struct SweepOutcome {
    MoveType move = MoveType::None;
    bool accepted = false;
    bool refreshed = false;
    RefreshReport refresh;
};

struct SeedRecord {
    std::uint64_t chain_seed = 0;
    std::string algorithm;
};

struct ChainResult {
    std::vector<SparsityPattern> delta_draws;
    std::vector<Vector> theta_draws;  ///< masked theta_delta, when recorded
    std::vector<Vector> full_theta_draws;  ///< unmasked theta, when record_full_theta
    Vector inclusion_prob;
    double accept_rate_single = 0.0;
    double accept_rate_double = 0.0;
    std::size_t proposed_single = 0;
    std::size_t proposed_double = 0;
    std::size_t accepted_single = 0;
    std::size_t accepted_double = 0;
    std::vector<double> log_post_trace;  ///< one entry per sweep
    std::vector<TraceRecord> trace;      ///< per sweep, when record_trace
    SeedRecord seeds_used;
    std::size_t refresh_count = 0;
    std::size_t refresh_warnings = 0;
    double max_refresh_drift = 0.0;
    std::vector<std::string> warnings;
    Vector final_theta;
    SparsityPattern final_delta;
};

class Sampler {
public:
    /// `data` must carry normalized instruments. The references must outlive
    /// the sampler.
    Sampler(const DesignData& data, const HyperParams& hyper, const InstrumentMap& map);

    /// delta from the nonzero pattern of theta0, keeping the s_bar largest
    /// magnitudes when there are more; caches built from scratch.
    SamplerState init_state(const Vector& theta0) const;

    Proposal propose_single_flip(const SamplerState& state, Rng& rng) const;
    Proposal single_flip(const SamplerState& state, Index j) const;

    /// Requires at least one active and one inactive coordinate.
    Proposal propose_double_flip(const SamplerState& state, Rng& rng) const;
    Proposal double_flip(const SamplerState& state, Index deactivate, Index activate) const;

    /// Accepts with probability min(1, exp(log_ratio + log_hastings)) and
    /// applies the move.
    bool accept_reject(SamplerState& state, const Proposal& proposal, Rng& rng) const;
    void apply(SamplerState& state, const Proposal& proposal) const;

    void draw_active_coefficients(SamplerState& state, Rng& rng) const;
    void draw_inactive_coefficients(SamplerState& state, Rng& rng) const;

    /// A double flip is undefined on the empty and the full pattern, where the
    /// sweep proposes a single flip instead. Single flips into or out of those
    /// patterns then carry the Hastings factor for the changed move weights.
    SweepOutcome sweep(SamplerState& state, Rng& rng, const ChainConfig& config) const;

    /// Recomputes residual, scores and log-density from scratch, replacing the
    /// cached values and reporting how far they had drifted.
    RefreshReport refresh_caches(SamplerState& state, double tolerance = 1e-6) const;

    /// W' X, q x p.
    const Matrix& moments() const { return moments_; }

private:
    Proposal evaluate(const SamplerState& state, MoveType type, std::array<Index, 2> coords,
                      std::array<bool, 2> activate, int size) const;
    void rebuild(SamplerState& state) const;
    void add_instrument(SamplerState& state, Index l) const;
    void remove_instrument(SamplerState& state, Index l) const;
    double slab_gain(double theta) const;

    const DesignData& data_;
    const HyperParams& hyper_;
    const InstrumentMap& map_;
    Matrix moments_;
    Vector instrument_y_;  // W' y
    std::vector<std::vector<Index>> groups_;  // sorted, deduplicated
    double log_odds_ = 0.0;
    double slab_var_ = 1.0;
};

ChainResult run_chain(const DesignData& data, const HyperParams& hyper, const InstrumentMap& map,
                      const ChainConfig& config, const Vector& theta0);

}  // namespace ivsel
