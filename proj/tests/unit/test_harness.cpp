#include "doctest.h"
#include "fixtures.hpp"

#include "ivsel/error.hpp"
#include "ivsel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ivsel;
using namespace ivsel::testing;

namespace {

ChainResult chain_from(const std::vector<Vector>& draws) {
    ChainResult c;
    const Index p = draws.front().size();
    c.inclusion_prob = Vector::Zero(p);
    for (const auto& d : draws) {
        SparsityPattern s(p);
        for (Index j = 0; j < p; ++j) s.set(j, d[j] != 0.0);
        c.delta_draws.push_back(s);
        c.theta_draws.push_back(d);
        for (Index j = 0; j < p; ++j) c.inclusion_prob[j] += s[j] ? 1.0 : 0.0;
    }
    c.inclusion_prob /= static_cast<double>(draws.size());
    return c;
}

ReplicationConfig small_config(int replicates) {
    ReplicationConfig c;
    c.scenario.n = 60;
    c.scenario.p = 20;
    c.scenario.m = 5;
    c.scenario.seed = 2024;
    c.replicates = replicates;
    c.chain.n_sweeps = 600;
    c.chain.burn_in = 200;
    c.chain.thin = 2;
    return c;
}

}  // namespace

TEST_CASE("select_model") {
    ChainResult c;
    c.delta_draws.push_back(SparsityPattern(4));
    c.inclusion_prob = Vector(4);
    c.inclusion_prob << 1.0, 1.0, 0.0, 0.3;
    CHECK(select_model(c) == pattern({1, 1, 0, 0}));
    c.inclusion_prob << 0.5, 0.51, 0.49, 0.5;
    CHECK(select_model(c) == pattern({0, 1, 0, 0}));
    CHECK(select_model(c, 0.4) == pattern({1, 1, 1, 1}));
    CHECK_THROWS_AS(select_model(c, 1.0), Error);
    ChainResult empty;
    try {
        select_model(empty);
        FAIL("expected EmptyChain");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyChain);
    }
}

TEST_CASE("select_model recovers the exact posterior mode") {
    const Instance inst = paired_instance(30, 6, 41, 0.1);
    const HyperParams h = hyper(20.0, 1.0, 0.5, 3, 0.05);
    const auto exact = exact_delta_posterior(inst.data, h, inst.map);
    const auto best = std::max_element(exact.begin(), exact.end(),
                                       [](const auto& a, const auto& b) { return a.probability < b.probability; });
    Vector exact_incl = Vector::Zero(6);
    for (const auto& pp : exact)
        for (Index j : pp.delta.active()) exact_incl[j] += pp.probability;
    REQUIRE((exact_incl.array() - 0.5).abs().minCoeff() > 0.1);
    ChainConfig c;
    c.n_sweeps = 30000;
    c.burn_in = 2000;
    c.thin = 1;
    c.seed = 3;
    const ChainResult r = run_chain(inst.data, h, inst.map, c, Vector::Zero(6));
    CHECK(select_model(r) == best->delta);
}

TEST_CASE("point_estimate") {
    Vector d(3);
    d << 1.0, 0.0, -2.0;
    CHECK(point_estimate(chain_from({d, d, d})) == d);

    Rng rng(5);
    std::vector<Vector> draws;
    for (int i = 0; i < 500; ++i) {
        Vector v = gaussian_vector(4, rng);
        v[2] = 0.0;
        if (i % 3 == 0) v[1] = 0.0;
        draws.push_back(v);
    }
    const Vector est = point_estimate(chain_from(draws));
    CHECK(est[2] == 0.0);
    for (Index j = 0; j < 4; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < draws.size(); ++i) mean += (draws[i][j] - mean) / static_cast<double>(i + 1);
        CHECK(std::abs(est[j] - mean) <= 1e-12);
    }

    ChainResult no_theta;
    no_theta.delta_draws.push_back(SparsityPattern(2));
    try {
        point_estimate(no_theta);
        FAIL("expected MissingThetaDraws");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingThetaDraws);
    }
}

TEST_CASE("compute_metrics") {
    const GroundTruth truth = make_theta_star(100, 1.0);
    SparsityPattern star(100);
    for (Index j = 0; j < 5; ++j) star.set(j, true);
    const Metrics exact = compute_metrics(truth.theta_star, star, truth);
    CHECK(exact.tp == 5);
    CHECK(exact.fp == 0);
    CHECK(exact.mse_s == 0.0);
    CHECK(exact.mse_n == 0.0);

    SparsityPattern all(100);
    for (Index j = 0; j < 100; ++j) all.set(j, true);
    CHECK(compute_metrics(truth.theta_star, all, truth).fp == 95);

    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector est = gaussian_vector(100, rng);
        SparsityPattern sel(100);
        for (Index j = 0; j < 100; ++j) sel.set(j, rng.uniform() < 0.2);
        const Metrics m = compute_metrics(est, sel, truth);
        const Vector diff = est - truth.theta_star;
        CHECK(std::abs(m.mse_s - diff.head(5).squaredNorm()) <= 1e-12);
        CHECK(std::abs(m.mse_n - est.tail(95).squaredNorm()) <= 1e-12 * (1.0 + m.mse_n));
        Index tp = 0, fn = 0, fp = 0, tn = 0;
        for (Index j = 0; j < 100; ++j) {
            if (j < 5) (sel[j] ? tp : fn) += 1;
            else (sel[j] ? fp : tn) += 1;
        }
        CHECK(m.tp == tp);
        CHECK(m.fp == fp);
        CHECK(m.tp + fn == 5);
        CHECK(m.fp + tn == 95);
    }
    CHECK_THROWS_AS(compute_metrics(Vector::Zero(3), SparsityPattern(100), truth), Error);
}

TEST_CASE("credible_interval") {
    Vector c(2);
    c << 0.7, 0.0;
    const Interval flat = credible_interval(chain_from({c, c, c, c}), 0, 0.95);
    CHECK(flat.lower == 0.7);
    CHECK(flat.upper == 0.7);

    std::vector<Vector> draws;
    for (int i = 1000; i >= 1; --i) draws.push_back((Vector(1) << static_cast<double>(i)).finished());
    const Interval ranks = credible_interval(chain_from(draws), 0, 0.95);
    CHECK(ranks.lower == 25.0);
    CHECK(ranks.upper == 975.0);

    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_index(60));
        std::vector<Vector> d;
        std::vector<double> values;
        for (int i = 0; i < n; ++i) {
            const double v = rng.normal();
            d.push_back((Vector(1) << v).finished());
            values.push_back(v);
        }
        std::sort(values.begin(), values.end());
        const double median = nearest_rank_quantile(values, 0.5);
        const double level = 0.5 + 0.49 * rng.uniform();
        const Interval ci = credible_interval(chain_from(d), 0, level);
        CHECK(ci.lower <= median);
        CHECK(ci.upper >= median);
    }
}

TEST_CASE("summaries") {
    CHECK(summarize({3.0}).sd == 0.0);
    CHECK(summarize({3.0}).mean == 3.0);
    const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.sd == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("hyper policy") {
    const HyperPolicy policy;
    const HyperParams h = policy.nominal(Setup::Setup1, 100, 100, 200);
    CHECK(1.0 / h.rho_sq == doctest::Approx(std::log(20000.0) / 10.0).epsilon(1e-14));
    CHECK(h.gamma == doctest::Approx(0.1));
    CHECK(h.lambda == 100.0);
    CHECK(h.u == 1.0);
    CHECK(h.s_bar == 21);
    CHECK(policy.nominal(Setup::Setup2, 125, 100, 200).lambda == doctest::Approx(5.0).epsilon(1e-14));

    SimScenario sc;
    sc.n = 50;
    sc.p = 20;
    sc.m = 5;
    const SimulatedData sim = generate(sc);
    const HyperParams eff = policy.resolve(Setup::Setup1, sim.data);
    const double msq = sim.data.instrument_scales.array().square().mean();
    CHECK(eff.lambda == doctest::Approx(50.0 / msq).epsilon(1e-14));
    HyperPolicy literal;
    literal.raw_scale_lambda = false;
    CHECK(literal.resolve(Setup::Setup1, sim.data).lambda == 50.0);
    HyperPolicy fixed;
    fixed.lambda = 3.0;
    fixed.s_bar = 4;
    CHECK(fixed.nominal(Setup::Setup2, 50, 20, 40).lambda == 3.0);
    CHECK(fixed.nominal(Setup::Setup2, 50, 20, 40).s_bar == 4);
}

TEST_CASE("run_replications") {
    SUBCASE("single replicate has zero spread") {
        const AggregateReport r = run_replications(small_config(1));
        CHECK(r.succeeded == 1);
        CHECK(r.tp.sd == 0.0);
        CHECK(r.fp.sd == 0.0);
        CHECK(r.mse_s.sd == 0.0);
        CHECK(r.mse_n.sd == 0.0);
    }
    SUBCASE("aggregates equal the per-replicate means, independent of threads and order") {
        ReplicationConfig cfg = small_config(5);
        cfg.threads = 1;
        const AggregateReport a = run_replications(cfg);
        cfg.threads = 3;
        const AggregateReport b = run_replications(cfg);
        CHECK(a.requested == 5);
        CHECK(a.replicates.size() == 5);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(a.replicates[i].index == static_cast<int>(i));
            CHECK(a.replicates[i].data_seed == replicate_seed(2024, i));
            CHECK(a.replicates[i].data_seed == b.replicates[i].data_seed);
            CHECK(a.replicates[i].metrics.mse_s == b.replicates[i].metrics.mse_s);
        }
        CHECK(a.tp.mean == b.tp.mean);
        CHECK(a.mse_s.mean == b.mse_s.mean);
        CHECK(a.mse_s.sd == b.mse_s.sd);

        double tp = 0.0, mse = 0.0;
        for (const auto& rec : a.replicates) tp += static_cast<double>(rec.metrics.tp), mse += rec.metrics.mse_s;
        CHECK(std::abs(a.tp.mean - tp / 5.0) <= 1e-12);
        CHECK(std::abs(a.mse_s.mean - mse / 5.0) <= 1e-12 * (1.0 + mse));
        CHECK(std::abs(a.mse_s_per_coord.mean - a.mse_s.mean / 5.0) <= 1e-12 * (1.0 + mse));

        AggregateReport shuffled = a;
        std::reverse(shuffled.replicates.begin(), shuffled.replicates.end());
        aggregate(shuffled, 20);
        CHECK(std::abs(shuffled.mse_s.mean - a.mse_s.mean) <= 1e-12 * (1.0 + mse));
        CHECK(std::abs(shuffled.mse_s.sd - a.mse_s.sd) <= 1e-12 * (1.0 + a.mse_s.sd));
        CHECK(shuffled.tp.mean == a.tp.mean);
    }
    SUBCASE("failed replicates are counted and skipped") {
        AggregateReport r = run_replications(small_config(3));
        r.replicates[1].ok = false;
        r.replicates[1].metrics.tp = 100;
        aggregate(r, 20);
        CHECK(r.failed == 1);
        CHECK(r.succeeded == 2);
        CHECK(r.tp.mean <= 5.0);
    }
    SUBCASE("Setup 1 default scenario") {
        ReplicationConfig cfg;
        cfg.scenario.seed = 11;
        cfg.replicates = 30;
        const AggregateReport r = run_replications(cfg);
        MESSAGE("TP " << r.tp.mean << " FP " << r.fp.mean);
        CHECK(r.failed == 0);
        CHECK(r.tp.mean >= 4.8);
        CHECK(r.fp.mean <= 1.0);
    }
    SUBCASE("strong signal recovers the support") {
        ReplicationConfig cfg;
        cfg.scenario.n = 200;
        cfg.scenario.snr = 10.0;
        cfg.scenario.seed = 12;
        cfg.replicates = 20;
        const AggregateReport r = run_replications(cfg);
        int exact = 0;
        for (const auto& rec : r.replicates) exact += (rec.ok && rec.metrics.tp == 5 && rec.metrics.fp == 0) ? 1 : 0;
        CHECK(exact >= 19);
    }
}

TEST_CASE("ball_fraction") {
    Vector a(2), b(2);
    a << 1.0, 0.0;
    b << 3.0, 0.0;
    const ChainResult c = chain_from({a, a, b, b});
    CHECK(ball_fraction(c, Vector::Zero(2), 1.0) == 0.5);
    CHECK(ball_fraction(c, Vector::Zero(2), 3.0) == 1.0);
    CHECK(ball_fraction(c, Vector::Zero(2), 0.5) == 0.0);
}

TEST_CASE("joint_ball_fraction") {
    Vector a(2), b(2), fa(2), fb(2);
    a << 1.0, 0.0;
    b << 3.0, 0.0;
    fa << 1.0, 0.5;
    fb << 3.0, 2.0;
    ChainResult c = chain_from({a, a, b, b});
    CHECK_THROWS_AS(joint_ball_fraction(c, Vector::Zero(2), 5.0, 1.0), Error);
    c.full_theta_draws = {fa, fa, fb, fb};
    CHECK(joint_ball_fraction(c, Vector::Zero(2), 5.0, 1.0) == 0.5);
    CHECK(joint_ball_fraction(c, Vector::Zero(2), 0.5, 1.0) == 0.0);
    CHECK(joint_ball_fraction(c, Vector::Zero(2), 5.0, 3.0) == 1.0);
}

TEST_CASE("full theta draws agree with the masked draws on the active set") {
    const Instance inst = paired_instance(40, 8, 12, 0.5);
    ChainConfig c;
    c.n_sweeps = 300;
    c.burn_in = 100;
    c.thin = 2;
    c.record_full_theta = true;
    const ChainResult r = run_chain(inst.data, hyper(10.0, 1.0, 0.2, 4), inst.map, c, inst.theta_true);
    REQUIRE(r.full_theta_draws.size() == r.theta_draws.size());
    for (std::size_t i = 0; i < r.theta_draws.size(); ++i)
        for (Index j = 0; j < 8; ++j)
            CHECK(r.theta_draws[i][j] == (r.delta_draws[i][j] ? r.full_theta_draws[i][j] : 0.0));
}
