#include "ivsel/harness.hpp"

#include "ivsel/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace ivsel {
namespace {

class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void require_theta_draws(const ChainResult& chain) {
    if (chain.theta_draws.empty())
        fail(ErrorKind::MissingThetaDraws, "chain was run without recording theta draws");
}

}  // namespace

SparsityPattern select_model(const ChainResult& chain, double threshold) {
    if (chain.delta_draws.empty()) fail(ErrorKind::EmptyChain, "chain has no recorded draws");
    require(threshold > 0.0 && threshold < 1.0, ErrorKind::InvalidArgument, "threshold must lie in (0, 1)");
    SparsityPattern out(chain.inclusion_prob.size());
    for (Index j = 0; j < chain.inclusion_prob.size(); ++j) out.set(j, chain.inclusion_prob[j] > threshold);
    return out;
}

Vector point_estimate(const ChainResult& chain) {
    require_theta_draws(chain);
    Vector sum = Vector::Zero(chain.theta_draws.front().size());
    for (const auto& draw : chain.theta_draws) sum += draw;
    return sum / static_cast<double>(chain.theta_draws.size());
}

Metrics compute_metrics(const Vector& theta_hat, const SparsityPattern& delta_hat,
                        const GroundTruth& truth) {
    const Index p = truth.theta_star.size();
    require(theta_hat.size() == p && delta_hat.size() == p, ErrorKind::DimensionMismatch,
            "estimate length differs from the truth");
    std::vector<bool> in_support(static_cast<std::size_t>(p), false);
    for (Index j : truth.support) in_support[static_cast<std::size_t>(j)] = true;

    Metrics m;
    for (Index j = 0; j < p; ++j) {
        const double err = theta_hat[j] - truth.theta_star[j];
        if (in_support[static_cast<std::size_t>(j)]) {
            m.tp += delta_hat[j] ? 1 : 0;
            m.mse_s += err * err;
        } else {
            m.fp += delta_hat[j] ? 1 : 0;
            m.mse_n += theta_hat[j] * theta_hat[j];
        }
    }
    return m;
}

double nearest_rank_quantile(const std::vector<double>& sorted, double prob) {
    require(!sorted.empty(), ErrorKind::EmptyChain, "no values");
    const auto n = static_cast<double>(sorted.size());
    // The small offset keeps prob * n that lands on an integer from rounding up
    // through representation error (0.025 * 1000 = 25.000000000000004).
    auto rank = static_cast<long>(std::ceil(prob * n - 1e-9));
    rank = std::clamp<long>(rank, 1, static_cast<long>(sorted.size()));
    return sorted[static_cast<std::size_t>(rank - 1)];
}

Interval credible_interval(const ChainResult& chain, Index j, double level) {
    require_theta_draws(chain);
    require(level > 0.0 && level < 1.0, ErrorKind::InvalidArgument, "level must lie in (0, 1)");
    require(j >= 0 && j < chain.theta_draws.front().size(), ErrorKind::InvalidArgument,
            "coordinate out of range");
    std::vector<double> values;
    values.reserve(chain.theta_draws.size());
    for (const auto& draw : chain.theta_draws) values.push_back(draw[j]);
    std::sort(values.begin(), values.end());
    return {nearest_rank_quantile(values, (1.0 - level) / 2.0),
            nearest_rank_quantile(values, (1.0 + level) / 2.0)};
}

double ball_fraction(const ChainResult& chain, const Vector& theta_star, double radius) {
    require_theta_draws(chain);
    std::size_t inside = 0;
    for (const auto& draw : chain.theta_draws)
        if ((draw - theta_star).norm() <= radius) ++inside;
    return static_cast<double>(inside) / static_cast<double>(chain.theta_draws.size());
}

double joint_ball_fraction(const ChainResult& chain, const Vector& theta_star, double radius,
                           double spike_radius) {
    require_theta_draws(chain);
    require(chain.full_theta_draws.size() == chain.theta_draws.size(), ErrorKind::MissingThetaDraws,
            "chain was run without recording full theta draws");
    std::size_t inside = 0;
    for (std::size_t i = 0; i < chain.theta_draws.size(); ++i) {
        const Vector& masked = chain.theta_draws[i];
        if ((masked - theta_star).norm() <= radius && (chain.full_theta_draws[i] - masked).norm() <= spike_radius)
            ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(chain.theta_draws.size());
}

double HyperPolicy::nominal_lambda(Setup setup, Index n) const {
    const double dn = static_cast<double>(n);
    return lambda.value_or(setup == Setup::Setup1 ? dn : std::cbrt(dn));
}

HyperParams HyperPolicy::nominal(Setup setup, Index n, Index p, Index q) const {
    const double dn = static_cast<double>(n);
    const double log_pq = std::log(static_cast<double>(p) * static_cast<double>(q));
    HyperParams h;
    h.rho_sq = rho_sq.value_or(std::sqrt(dn) / log_pq);
    h.gamma = gamma.value_or(10.0 / static_cast<double>(p));
    h.lambda = nominal_lambda(setup, n);
    h.u = u.value_or(1.0);
    h.s_bar = s_bar.value_or(HyperParams::default_s_bar(n, p));
    return h;
}

double mean_squared_instrument_scale(const DesignData& data) {
    if (!data.normalized || data.instrument_scales.size() == 0) return 1.0;
    return data.instrument_scales.squaredNorm() / static_cast<double>(data.instrument_scales.size());
}

HyperParams HyperPolicy::resolve(Setup setup, const DesignData& data) const {
    HyperParams h = nominal(setup, data.n(), data.p(), data.q());
    if (raw_scale_lambda) h.lambda /= mean_squared_instrument_scale(data);
    return h;
}

ChainResult fit_chain(const DesignData& data, const HyperParams& hyper, const InstrumentMap& map,
                      const ChainConfig& config, const ScadOptions& scad) {
    const ScadResult init = scad_initializer(data, scad);
    ChainResult chain = run_chain(data, hyper, map, config, init.theta);
    if (!init.converged)
        chain.warnings.push_back("SCAD initializer stopped after " + std::to_string(init.passes) + " passes");
    return chain;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) return s;
    CompensatedSum total;
    for (double v : values) total.add(v);
    const auto count = static_cast<double>(values.size());
    s.mean = total.value() / count;
    if (values.size() > 1) {
        CompensatedSum squares;
        for (double v : values) squares.add((v - s.mean) * (v - s.mean));
        s.sd = std::sqrt(squares.value() / (count - 1.0));
    }
    return s;
}

void aggregate(AggregateReport& report, Index p) {
    std::vector<double> tp, fp, ms, mn, ms_c, mn_c, lambdas;
    report.succeeded = 0;
    report.failed = 0;
    double seconds = 0.0;
    for (const auto& rec : report.replicates) {
        seconds += rec.seconds;
        if (!rec.ok) {
            ++report.failed;
            continue;
        }
        ++report.succeeded;
        tp.push_back(static_cast<double>(rec.metrics.tp));
        fp.push_back(static_cast<double>(rec.metrics.fp));
        ms.push_back(rec.metrics.mse_s);
        mn.push_back(rec.metrics.mse_n);
        ms_c.push_back(rec.metrics.mse_s / 5.0);
        mn_c.push_back(p > 5 ? rec.metrics.mse_n / static_cast<double>(p - 5) : 0.0);
        lambdas.push_back(rec.lambda);
    }
    report.lambda_used = summarize(lambdas);
    report.tp = summarize(tp);
    report.fp = summarize(fp);
    report.mse_s = summarize(ms);
    report.mse_n = summarize(mn);
    report.mse_s_per_coord = summarize(ms_c);
    report.mse_n_per_coord = summarize(mn_c);
    report.mean_replicate_seconds =
        report.replicates.empty() ? 0.0 : seconds / static_cast<double>(report.replicates.size());
}

AggregateReport run_replications(const ReplicationConfig& config) {
    require(config.replicates >= 1, ErrorKind::InvalidArgument, "replicate count must be >= 1");
    config.scenario.validate();
    config.chain.validate();

    const SimScenario& sc = config.scenario;
    const Index q = sc.setup == Setup::Setup1 ? 2 * sc.p : sc.T * sc.p;

    AggregateReport report;
    report.scenario = sc;
    report.hyper = config.hyper_policy.nominal(sc.setup, sc.n, sc.p, q);
    report.hyper.validate(sc.p);
    report.raw_scale_lambda = config.hyper_policy.raw_scale_lambda;
    report.requested = config.replicates;
    report.replicates.resize(static_cast<std::size_t>(config.replicates));

    const auto started = std::chrono::steady_clock::now();
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < config.replicates; r = next++) {
            ReplicateRecord& rec = report.replicates[static_cast<std::size_t>(r)];
            rec.index = r;
            rec.data_seed = replicate_seed(sc.seed, static_cast<std::uint64_t>(r));
            rec.chain_seed = Rng(rec.data_seed).split(1).seed();
            const auto t0 = std::chrono::steady_clock::now();
            try {
                SimScenario scenario = sc;
                scenario.seed = rec.data_seed;
                const SimulatedData sim = generate(scenario);
                ChainConfig chain_config = config.chain;
                chain_config.seed = rec.chain_seed;
                const HyperParams hyper = config.hyper_policy.resolve(sc.setup, sim.data);
                rec.lambda = hyper.lambda;
                const ChainResult chain = fit_chain(sim.data, hyper, sim.map, chain_config, config.scad);
                rec.metrics = compute_metrics(point_estimate(chain), select_model(chain, config.threshold), sim.truth);
                rec.accept_rate_single = chain.accept_rate_single;
                rec.accept_rate_double = chain.accept_rate_double;
                rec.ok = true;
            } catch (const std::exception& e) {
                rec.ok = false;
                rec.error = e.what();
            }
            rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(config.replicates));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    aggregate(report, sc.p);
    return report;
}

}  // namespace ivsel
