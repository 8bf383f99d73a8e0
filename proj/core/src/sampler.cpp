#include "ivsel/sampler.hpp"

#include "ivsel/error.hpp"
#include "ivsel/model.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ivsel {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vector masked(const Vector& theta, const SparsityPattern& delta) {
    Vector out = Vector::Zero(theta.size());
    for (Index j = 0; j < theta.size(); ++j)
        if (delta[j]) out[j] = theta[j];
    return out;
}

double abs_diff(double a, double b) {
    if (a == b) return 0.0;  // also covers equal infinities
    return std::abs(a - b);
}

}  // namespace

std::string_view to_string(MoveType move) noexcept {
    switch (move) {
        case MoveType::None: return "none";
        case MoveType::SingleFlip: return "single";
        case MoveType::DoubleFlip: return "double";
    }
    return "none";
}

void ChainConfig::validate() const {
    require(n_sweeps >= 1, ErrorKind::InvalidArgument, "n_sweeps must be >= 1");
    require(burn_in >= 0 && burn_in < n_sweeps, ErrorKind::InvalidArgument,
            "burn_in must satisfy 0 <= burn_in < n_sweeps");
    require(thin >= 1, ErrorKind::InvalidArgument, "thin must be >= 1");
    require(refresh_every >= 0, ErrorKind::InvalidArgument, "refresh_every must be >= 0");
    require(flip_mix >= 0.0 && flip_mix <= 1.0, ErrorKind::InvalidArgument, "flip_mix must lie in [0, 1]");
}

double RefreshReport::max_drift() const {
    return std::max({residual_drift, score_drift, log_post_drift});
}

Sampler::Sampler(const DesignData& data, const HyperParams& hyper, const InstrumentMap& map)
    : data_(data), hyper_(hyper), map_(map) {
    data_.validate();
    require(data_.normalized, ErrorKind::InvalidArgument, "sampler requires normalized instruments");
    hyper_.validate(data_.p());
    require(map_.p() == data_.p(), ErrorKind::DimensionMismatch, "instrument map length differs from p");
    map_.validate(data_.q());

    moments_ = data_.W.transpose() * data_.X;
    instrument_y_ = data_.W.transpose() * data_.y;
    groups_.resize(map_.groups.size());
    for (std::size_t j = 0; j < map_.groups.size(); ++j) {
        auto& g = groups_[j];
        g.assign(map_.groups[j].begin(), map_.groups[j].end());
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
    }
    const double qp = hyper_.q_prior(data_.p());
    log_odds_ = std::log(qp) - std::log1p(-qp);
    slab_var_ = 1.0 / hyper_.rho_sq;
}

double Sampler::slab_gain(double theta) const {
    return log_normal_density(theta, slab_var_) - log_normal_density(theta, hyper_.gamma);
}

void Sampler::add_instrument(SamplerState& state, Index l) const {
    state.instrument_slot[static_cast<std::size_t>(l)] = static_cast<Index>(state.active_instruments.size());
    state.active_instruments.push_back(l);
}

void Sampler::remove_instrument(SamplerState& state, Index l) const {
    const auto slot = state.instrument_slot[static_cast<std::size_t>(l)];
    const Index last = state.active_instruments.back();
    state.active_instruments[static_cast<std::size_t>(slot)] = last;
    state.instrument_slot[static_cast<std::size_t>(last)] = slot;
    state.active_instruments.pop_back();
    state.instrument_slot[static_cast<std::size_t>(l)] = -1;
}

void Sampler::rebuild(SamplerState& state) const {
    state.residual = data_.y - data_.X * masked(state.theta, state.delta);
    state.scores = data_.W.transpose() * state.residual;
    state.log_sparsity = log_prior_sparsity(state.delta, hyper_);
    state.log_lik = log_quasi_likelihood(data_, state.delta, state.theta, hyper_, map_);
    state.log_coef = log_prior_coefficients(state.theta, state.delta, hyper_);
    state.log_post = state.log_sparsity + state.log_lik + state.log_coef;
}

SamplerState Sampler::init_state(const Vector& theta0) const {
    const Index p = data_.p();
    require(theta0.size() == p, ErrorKind::DimensionMismatch, "theta0 length differs from p");

    std::vector<Index> nonzero;
    for (Index j = 0; j < p; ++j)
        if (std::abs(theta0[j]) > 0.0) nonzero.push_back(j);
    if (static_cast<Index>(nonzero.size()) > hyper_.s_bar) {
        std::stable_sort(nonzero.begin(), nonzero.end(),
                         [&](Index a, Index b) { return std::abs(theta0[a]) > std::abs(theta0[b]); });
        nonzero.resize(static_cast<std::size_t>(hyper_.s_bar));
    }

    SamplerState state;
    state.delta = SparsityPattern(p);
    for (Index j : nonzero) state.delta.set(j, true);
    state.theta = theta0;
    state.instrument_count.assign(static_cast<std::size_t>(data_.q()), 0);
    state.instrument_slot.assign(static_cast<std::size_t>(data_.q()), -1);
    for (Index j : state.delta.active()) {
        for (Index l : groups_[static_cast<std::size_t>(j)]) {
            if (state.instrument_count[static_cast<std::size_t>(l)]++ == 0) add_instrument(state, l);
        }
    }
    rebuild(state);
    return state;
}

Proposal Sampler::evaluate(const SamplerState& state, MoveType type, std::array<Index, 2> coords,
                           std::array<bool, 2> activate, int size) const {
    Proposal prop;
    prop.type = type;
    prop.coords = coords;
    prop.size = size;

    Index new_count = state.delta.count();
    for (int i = 0; i < size; ++i) new_count += activate[static_cast<std::size_t>(i)] ? 1 : -1;
    if (new_count > hyper_.s_bar) {
        prop.log_ratio = kNegInf;
        prop.log_sparsity = kNegInf;
        return prop;
    }
    prop.log_sparsity = log_sparsity_weight(new_count, data_.p(), hyper_);

    // Signed change of theta_delta per moved coordinate, and its effect on the
    // count of each instrument.
    std::array<double, 2> step{};
    prop.log_coef = state.log_coef;
    for (int i = 0; i < size; ++i) {
        const Index c = coords[static_cast<std::size_t>(i)];
        const double t = state.theta[c];
        const bool on = activate[static_cast<std::size_t>(i)];
        step[static_cast<std::size_t>(i)] = on ? t : -t;
        prop.log_coef += on ? slab_gain(t) : -slab_gain(t);
    }
    auto count_delta = [&](Index l) {
        int d = 0;
        for (int i = 0; i < size; ++i) {
            const auto& g = groups_[static_cast<std::size_t>(coords[static_cast<std::size_t>(i)])];
            if (std::binary_search(g.begin(), g.end(), l)) d += activate[static_cast<std::size_t>(i)] ? 1 : -1;
        }
        return d;
    };
    auto shifted_score = [&](Index l) {
        double s = state.scores[l];
        for (int i = 0; i < size; ++i)
            s -= step[static_cast<std::size_t>(i)] * moments_(l, coords[static_cast<std::size_t>(i)]);
        return s;
    };

    double sum = 0.0;
    for (Index l : state.active_instruments) {
        if (state.instrument_count[static_cast<std::size_t>(l)] + count_delta(l) <= 0) continue;
        const double s = shifted_score(l);
        sum += s * s;
    }
    for (int i = 0; i < size; ++i) {
        if (!activate[static_cast<std::size_t>(i)]) continue;
        for (Index l : groups_[static_cast<std::size_t>(coords[static_cast<std::size_t>(i)])]) {
            if (state.instrument_count[static_cast<std::size_t>(l)] != 0) continue;
            const double s = shifted_score(l);
            sum += s * s;
        }
    }
    prop.log_lik = -0.5 * sum / hyper_.lambda;
    prop.log_ratio = (prop.log_sparsity + prop.log_lik + prop.log_coef) - state.log_post;
    return prop;
}

Proposal Sampler::single_flip(const SamplerState& state, Index j) const {
    require(j >= 0 && j < data_.p(), ErrorKind::InvalidArgument, "flip index out of range");
    return evaluate(state, MoveType::SingleFlip, {j, -1}, {!state.delta[j], false}, 1);
}

Proposal Sampler::propose_single_flip(const SamplerState& state, Rng& rng) const {
    const auto j = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(data_.p())));
    return single_flip(state, j);
}

Proposal Sampler::double_flip(const SamplerState& state, Index deactivate, Index activate) const {
    require(state.delta[deactivate] && !state.delta[activate], ErrorKind::InvalidArgument,
            "double flip needs an active and an inactive coordinate");
    return evaluate(state, MoveType::DoubleFlip, {deactivate, activate}, {false, true}, 2);
}

Proposal Sampler::propose_double_flip(const SamplerState& state, Rng& rng) const {
    const auto on = state.delta.active();
    const auto off = state.delta.inactive();
    require(!on.empty() && !off.empty(), ErrorKind::InvalidArgument,
            "double flip undefined with an empty or full pattern");
    const Index j1 = on[static_cast<std::size_t>(rng.uniform_index(on.size()))];
    const Index j2 = off[static_cast<std::size_t>(rng.uniform_index(off.size()))];
    return double_flip(state, j1, j2);
}

void Sampler::apply(SamplerState& state, const Proposal& prop) const {
    for (int i = 0; i < prop.size; ++i) {
        const Index c = prop.coords[static_cast<std::size_t>(i)];
        const bool on = !state.delta[c];
        const double step = on ? state.theta[c] : -state.theta[c];
        state.delta.set(c, on);
        for (Index l : groups_[static_cast<std::size_t>(c)]) {
            auto& count = state.instrument_count[static_cast<std::size_t>(l)];
            if (on) {
                if (count++ == 0) add_instrument(state, l);
            } else {
                if (--count == 0) remove_instrument(state, l);
            }
        }
        if (step != 0.0) {
            state.residual.noalias() -= step * data_.X.col(c);
            state.scores.noalias() -= step * moments_.col(c);
        }
    }
    state.log_sparsity = prop.log_sparsity;
    state.log_lik = prop.log_lik;
    state.log_coef = prop.log_coef;
    state.log_post = state.log_sparsity + state.log_lik + state.log_coef;
}

bool Sampler::accept_reject(SamplerState& state, const Proposal& prop, Rng& rng) const {
    const bool single = prop.type == MoveType::SingleFlip;
    (single ? state.proposed_single : state.proposed_double) += 1;
    const double log_alpha = prop.log_ratio + prop.log_hastings;
    bool accept;
    if (log_alpha >= 0.0) {
        accept = true;
    } else if (log_alpha == kNegInf || std::isnan(log_alpha)) {
        accept = false;
    } else {
        accept = rng.uniform() < std::exp(log_alpha);
    }
    if (accept) {
        apply(state, prop);
        (single ? state.accepted_single : state.accepted_double) += 1;
    }
    return accept;
}

void Sampler::draw_active_coefficients(SamplerState& state, Rng& rng) const {
    const auto active = state.delta.active();
    if (active.empty()) return;
    const auto k = static_cast<Index>(active.size());
    const auto& instruments = state.active_instruments;
    const auto t = static_cast<Index>(instruments.size());

    Matrix block(t, k);
    Vector wy(t);
    for (Index r = 0; r < t; ++r) {
        const Index l = instruments[static_cast<std::size_t>(r)];
        wy[r] = instrument_y_[l];
        for (Index c = 0; c < k; ++c) block(r, c) = moments_(l, active[static_cast<std::size_t>(c)]);
    }
    Matrix precision = Matrix::Zero(k, k);
    precision.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose(), 1.0 / hyper_.lambda);
    precision.diagonal().array() += hyper_.rho_sq;
    const Vector b = block.transpose() * wy / hyper_.lambda;

    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::SingularSystem, "active-block precision is not positive definite");
    Vector draw = llt.solve(b);
    Vector z(k);
    for (Index c = 0; c < k; ++c) z[c] = rng.normal();
    draw += llt.matrixU().solve(z);

    for (Index c = 0; c < k; ++c) {
        const Index j = active[static_cast<std::size_t>(c)];
        const double old = state.theta[j];
        const double step = draw[c] - old;
        state.log_coef += log_normal_density(draw[c], slab_var_) - log_normal_density(old, slab_var_);
        state.theta[j] = draw[c];
        if (step != 0.0) {
            state.residual.noalias() -= step * data_.X.col(j);
            state.scores.noalias() -= step * moments_.col(j);
        }
    }
    double sum = 0.0;
    for (Index l : instruments) sum += state.scores[l] * state.scores[l];
    state.log_lik = -0.5 * sum / hyper_.lambda;
    state.log_post = state.log_sparsity + state.log_lik + state.log_coef;
}

void Sampler::draw_inactive_coefficients(SamplerState& state, Rng& rng) const {
    const double sd = std::sqrt(hyper_.gamma);
    for (Index j = 0; j < data_.p(); ++j) {
        if (state.delta[j]) continue;
        const double old = state.theta[j];
        const double fresh = sd * rng.normal();
        state.log_coef += log_normal_density(fresh, hyper_.gamma) - log_normal_density(old, hyper_.gamma);
        state.theta[j] = fresh;
    }
    state.log_post = state.log_sparsity + state.log_lik + state.log_coef;
}

SweepOutcome Sampler::sweep(SamplerState& state, Rng& rng, const ChainConfig& config) const {
    SweepOutcome out;
    const Index p = data_.p();
    // Probability that a sweep at a pattern with k active coordinates proposes
    // a single flip.
    auto single_weight = [&](Index k) { return (k == 0 || k == p) ? 1.0 : config.flip_mix; };
    const Index k = state.delta.count();
    const bool single = rng.uniform() < single_weight(k);

    Proposal prop = single ? propose_single_flip(state, rng) : propose_double_flip(state, rng);
    if (single) {
        const Index k_new = state.delta[prop.coords[0]] ? k - 1 : k + 1;
        const double forward = single_weight(k), reverse = single_weight(k_new);
        if (forward != reverse) prop.log_hastings = std::log(reverse) - std::log(forward);
    }
    out.move = prop.type;
    out.accepted = accept_reject(state, prop, rng);
    draw_active_coefficients(state, rng);
    draw_inactive_coefficients(state, rng);
    ++state.sweep_index;

    if (config.refresh_every > 0 && state.sweep_index % config.refresh_every == 0) {
        out.refresh = refresh_caches(state, config.drift_tolerance);
        out.refreshed = true;
    }
    return out;
}

RefreshReport Sampler::refresh_caches(SamplerState& state, double tolerance) const {
    const Vector old_residual = state.residual;
    const Vector old_scores = state.scores;
    const double old_log_post = state.log_post;
    rebuild(state);

    RefreshReport report;
    report.residual_drift = (state.residual - old_residual).cwiseAbs().maxCoeff();
    report.score_drift = (state.scores - old_scores).cwiseAbs().maxCoeff();
    report.log_post_drift = abs_diff(state.log_post, old_log_post);
    report.warning = !(report.max_drift() <= tolerance);
    return report;
}

ChainResult run_chain(const DesignData& data, const HyperParams& hyper, const InstrumentMap& map,
                      const ChainConfig& config, const Vector& theta0) {
    config.validate();
    const Sampler sampler(data, hyper, map);
    SamplerState state = sampler.init_state(theta0);
    Rng rng(config.seed);

    ChainResult result;
    result.seeds_used = {config.seed, std::string(Rng::algorithm)};
    const Index p = data.p();
    const auto expected = static_cast<std::size_t>((config.n_sweeps - config.burn_in + config.thin - 1) / config.thin);
    result.delta_draws.reserve(expected);
    if (config.record_theta) result.theta_draws.reserve(expected);
    if (config.record_full_theta) result.full_theta_draws.reserve(expected);
    result.log_post_trace.reserve(static_cast<std::size_t>(config.n_sweeps));
    if (config.record_trace) result.trace.reserve(static_cast<std::size_t>(config.n_sweeps));

    auto note_refresh = [&](const RefreshReport& r) {
        ++result.refresh_count;
        result.max_refresh_drift = std::max(result.max_refresh_drift, r.max_drift());
        if (r.warning) {
            ++result.refresh_warnings;
            result.warnings.push_back("cache drift " + std::to_string(r.max_drift()) + " at sweep " +
                                      std::to_string(state.sweep_index));
        }
    };

    Vector inclusion = Vector::Zero(p);
    for (long i = 0; i < config.n_sweeps; ++i) {
        const SweepOutcome outcome = sampler.sweep(state, rng, config);
        if (outcome.refreshed) note_refresh(outcome.refresh);
        result.log_post_trace.push_back(state.log_post);
        if (config.record_trace) {
            result.trace.push_back({state.sweep_index, state.delta.count(), state.log_post, outcome.move,
                                    outcome.accepted});
        }
        if (i >= config.burn_in && (i - config.burn_in) % config.thin == 0) {
            result.delta_draws.push_back(state.delta);
            for (Index j : state.delta.active()) inclusion[j] += 1.0;
            if (config.record_theta) result.theta_draws.push_back(masked(state.theta, state.delta));
            if (config.record_full_theta) result.full_theta_draws.push_back(state.theta);
        }
    }
    if (config.refresh_every == 0 || state.sweep_index % config.refresh_every != 0)
        note_refresh(sampler.refresh_caches(state, config.drift_tolerance));

    result.inclusion_prob = inclusion / static_cast<double>(result.delta_draws.size());
    result.proposed_single = state.proposed_single;
    result.proposed_double = state.proposed_double;
    result.accepted_single = state.accepted_single;
    result.accepted_double = state.accepted_double;
    result.accept_rate_single =
        state.proposed_single ? double(state.accepted_single) / double(state.proposed_single) : 0.0;
    result.accept_rate_double =
        state.proposed_double ? double(state.accepted_double) / double(state.proposed_double) : 0.0;
    result.final_theta = state.theta;
    result.final_delta = state.delta;
    return result;
}

}  // namespace ivsel
