#include "ivsel_cli/cli.hpp"

#include "ivsel/error.hpp"
#include "ivsel/harness.hpp"
#include "ivsel/io.hpp"
#include "ivsel/model.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

namespace ivsel::cli {
namespace {

namespace fs = std::filesystem;

struct ScenarioArgs {
    int setup = 1;
    Index n = 100;
    Index p = 100;
    Index m = 10;
    Index T = 2;
    double snr = 1.0;
    std::uint64_t seed = 1;

    SimScenario scenario() const {
        SimScenario s;
        s.setup = setup == 1 ? Setup::Setup1 : Setup::Setup2;
        s.n = n;
        s.p = p;
        s.m = m;
        s.T = T;
        s.snr = snr;
        s.seed = seed;
        return s;
    }
};

struct HyperArgs {
    std::optional<double> lambda, rho_sq, gamma, u;
    std::optional<Index> s_bar;
    std::string lambda_scale = "raw";

    HyperPolicy policy() const {
        HyperPolicy h;
        h.lambda = lambda;
        h.rho_sq = rho_sq;
        h.gamma = gamma;
        h.u = u;
        h.s_bar = s_bar;
        h.raw_scale_lambda = lambda_scale == "raw";
        return h;
    }
};

struct DataArgs {
    std::string dir;
    std::string y, x, w, map;

    LoadedDataset load() const {
        auto pick = [&](const std::string& given, const char* file) -> fs::path {
            if (!given.empty()) return given;
            if (dir.empty()) return {};
            return fs::path(dir) / file;
        };
        const fs::path yp = pick(y, "y.csv"), xp = pick(x, "X.csv"), wp = pick(w, "W.csv");
        if (yp.empty() || xp.empty() || wp.empty())
            throw CLI::ValidationError("data", "give --data-dir or all of --y, --x and --w");
        fs::path mp = pick(map, "map.txt");
        if (map.empty() && !mp.empty() && !fs::exists(mp)) mp.clear();
        return load_dataset(yp, xp, wp, mp);
    }
};

struct Args {
    std::string out;
    ScenarioArgs scenario;
    HyperArgs hyper;
    ChainConfig chain;
    DataArgs data;
    int replicates = 30;
    unsigned threads = 0;
    double threshold = 0.5;
    double level = 0.95;
    bool trace = false;
    bool plotdata = false;
    Index plot_coord = 1;
    std::string truth;
    std::optional<Index> s_star;
    double sigma0 = 1.0;
    double big_m = 12.0;
    double small_m = 2.0;
    std::size_t samples = 200;
    bool exhaustive = false;
    std::string mse = "sum";
};

void add_scenario(CLI::App& app, ScenarioArgs& s) {
    app.add_option("--setup", s.setup, "Simulation design (1 or 2)")->check(CLI::IsMember({1, 2}))->capture_default_str();
    app.add_option("--n", s.n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--p", s.p, "Number of regressors")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--m", s.m, "Endogenous regressors (setup 1)")->capture_default_str();
    app.add_option("--T", s.T, "Instruments per regressor (setup 2)")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--snr", s.snr, "Signal-to-noise multiplier")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", s.seed, "Base seed")->capture_default_str();
}

void add_hyper(CLI::App& app, HyperArgs& h, int* setup) {
    app.add_option("--lambda", h.lambda, "Quasi-likelihood scale (default n, or n^(1/3) for setup 2)");
    app.add_option("--rho-sq", h.rho_sq, "Slab precision (default sqrt(n)/log(pq))");
    app.add_option("--gamma", h.gamma, "Spike variance (default 10/p)");
    app.add_option("--u", h.u, "Prior exponent, q = p^-(u+1) (default 1)");
    app.add_option("--s-bar", h.s_bar, "Sparsity cap (default min(p, floor(n/log p)))");
    app.add_option("--lambda-scale", h.lambda_scale,
                   "raw: lambda refers to the instruments before normalization; normalized: used as given")
        ->check(CLI::IsMember({"raw", "normalized"}))
        ->capture_default_str();
    if (setup)
        app.add_option("--setup", *setup, "Default lambda rule: 1 (n) or 2 (n^(1/3))")
            ->check(CLI::IsMember({1, 2}))
            ->capture_default_str();
}

void add_chain(CLI::App& app, ChainConfig& c) {
    app.add_option("--sweeps", c.n_sweeps, "Sweeps per chain")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--burn-in", c.burn_in, "Discarded sweeps")->check(CLI::NonNegativeNumber)->capture_default_str();
    app.add_option("--thin", c.thin, "Keep every k-th sweep")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--refresh-every", c.refresh_every, "Sweeps between cache refreshes")->capture_default_str();
    app.add_option("--flip-mix", c.flip_mix, "Probability of a single flip")->check(CLI::Range(0.0, 1.0))->capture_default_str();
}

void add_data(CLI::App& app, DataArgs& d) {
    app.add_option("--data-dir", d.dir, "Directory holding y.csv, X.csv, W.csv and optionally map.txt");
    app.add_option("--y", d.y, "Response CSV");
    app.add_option("--x", d.x, "Regressor CSV");
    app.add_option("--w", d.w, "Instrument CSV");
    app.add_option("--map", d.map, "Instrument map file");
}

std::string canonical(const std::map<std::string, std::string>& values) {
    std::string text;
    for (const auto& [k, v] : values) text += k + "=" + v + "\n";
    return text;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "default"; }

std::map<std::string, std::string> hyper_config(const HyperArgs& h) {
    return {{"lambda", opt(h.lambda)},
            {"rho_sq", opt(h.rho_sq)},
            {"gamma", opt(h.gamma)},
            {"u", opt(h.u)},
            {"s_bar", h.s_bar ? std::to_string(*h.s_bar) : "default"},
            {"lambda_scale", h.lambda_scale}};
}

void add_chain_config(std::map<std::string, std::string>& cfg, const ChainConfig& c) {
    cfg["sweeps"] = std::to_string(c.n_sweeps);
    cfg["burn_in"] = std::to_string(c.burn_in);
    cfg["thin"] = std::to_string(c.thin);
    cfg["refresh_every"] = std::to_string(c.refresh_every);
    cfg["flip_mix"] = format_double(c.flip_mix);
}

void add_scenario_config(std::map<std::string, std::string>& cfg, const ScenarioArgs& s) {
    cfg["setup"] = std::to_string(s.setup);
    cfg["n"] = std::to_string(s.n);
    cfg["p"] = std::to_string(s.p);
    cfg["m"] = std::to_string(s.m);
    cfg["T"] = std::to_string(s.T);
    cfg["snr"] = format_double(s.snr);
    cfg["seed"] = std::to_string(s.seed);
}

void add_hyper_provenance(Provenance& prov, const HyperParams& h, double lambda_effective, bool raw) {
    prov.add("lambda", h.lambda);
    prov.add("lambda-effective", lambda_effective);
    prov.add("lambda-scale", std::string(raw ? "raw" : "normalized"));
    prov.add("rho_sq", h.rho_sq);
    prov.add("inv_rho_sq", 1.0 / h.rho_sq);
    prov.add("gamma", h.gamma);
    prov.add("u", h.u);
    prov.add("s_bar", std::to_string(h.s_bar));
}

void add_chain_provenance(Provenance& prov, const ChainConfig& c) {
    prov.add("sweeps", std::to_string(c.n_sweeps));
    prov.add("burn-in", std::to_string(c.burn_in));
    prov.add("thin", std::to_string(c.thin));
}

int cmd_simulate(const Args& a, std::ostream& out) {
    std::map<std::string, std::string> cfg{{"command", "simulate"}};
    add_scenario_config(cfg, a.scenario);
    const SimScenario sc = a.scenario.scenario();
    const SimulatedData sim = generate(sc);
    Provenance prov = make_provenance(canonical(cfg));
    prov.add("scenario", describe(sc));
    prov.add("seed", std::to_string(sc.seed));
    const fs::path dir(a.out);
    write_dataset(dir, sim.data, sim.map, prov);
    write_truth(dir / "truth.csv", sim.truth, prov);
    out << "wrote " << describe(sc) << " to " << dir.string() << '\n';
    return kOk;
}

int cmd_fit(const Args& a, std::ostream& out) {
    const LoadedDataset ds = a.data.load();
    const Index p = ds.data.p();
    if (a.plot_coord < 1 || a.plot_coord > p)
        throw CLI::ValidationError("--plot-coord", "must lie in [1, " + std::to_string(p) + "]");

    const Setup setup = a.scenario.setup == 1 ? Setup::Setup1 : Setup::Setup2;
    const HyperPolicy policy = a.hyper.policy();
    const HyperParams nominal = policy.nominal(setup, ds.data.n(), p, ds.data.q());
    const HyperParams hyper = policy.resolve(setup, ds.data);
    hyper.validate(p);

    ChainConfig chain = a.chain;
    chain.seed = a.scenario.seed;
    chain.record_trace = a.trace;

    std::map<std::string, std::string> cfg = hyper_config(a.hyper);
    cfg["command"] = "fit";
    cfg["setup"] = std::to_string(a.scenario.setup);
    cfg["seed"] = std::to_string(a.scenario.seed);
    cfg["threshold"] = format_double(a.threshold);
    cfg["level"] = format_double(a.level);
    add_chain_config(cfg, chain);

    const ChainResult result = fit_chain(ds.data, hyper, ds.map, chain);
    const SparsityPattern selected = select_model(result, a.threshold);
    const Vector theta_hat = point_estimate(result);

    Provenance prov = make_provenance(canonical(cfg));
    add_hyper_provenance(prov, nominal, hyper.lambda, policy.raw_scale_lambda);
    add_chain_provenance(prov, chain);
    prov.add("chain-seed", std::to_string(result.seeds_used.chain_seed));
    prov.add("accept-rate-single", result.accept_rate_single);
    prov.add("accept-rate-double", result.accept_rate_double);

    CsvTable summary;
    summary.provenance = prov;
    summary.header = {"index", "name", "inclusion_prob", "selected", "theta_hat", "ci_lower", "ci_upper"};
    for (Index j = 0; j < p; ++j) {
        const Interval ci = credible_interval(result, j, a.level);
        summary.rows.push_back({std::to_string(j + 1), ds.data.x_names[static_cast<std::size_t>(j)],
                                format_double(result.inclusion_prob[j]), selected[j] ? "1" : "0",
                                format_double(theta_hat[j]), format_double(ci.lower), format_double(ci.upper)});
    }
    const fs::path dir(a.out);
    write_csv(dir / "posterior.csv", summary);

    if (a.trace) {
        CsvTable trace;
        trace.provenance = prov;
        trace.header = {"sweep", "active_count", "log_post", "move", "accepted"};
        for (const auto& t : result.trace)
            trace.rows.push_back({std::to_string(t.sweep), std::to_string(t.active_count), format_double(t.log_post),
                                  std::string(to_string(t.move)), t.accepted ? "1" : "0"});
        write_csv(dir / "trace.csv", trace);
    }
    if (a.plotdata) {
        CsvTable plot;
        plot.provenance = prov;
        plot.provenance.add("coordinate", ds.data.x_names[static_cast<std::size_t>(a.plot_coord - 1)]);
        plot.header = {"draw", "theta_" + std::to_string(a.plot_coord)};
        for (std::size_t i = 0; i < result.theta_draws.size(); ++i)
            plot.rows.push_back({std::to_string(i + 1), format_double(result.theta_draws[i][a.plot_coord - 1])});
        write_csv(dir / "plotdata.csv", plot);
    }
    for (const auto& w : result.warnings) out << "warning: " << w << '\n';
    out << "selected " << selected.count() << " of " << p << " regressors; wrote " << (dir / "posterior.csv").string()
        << '\n';
    return kOk;
}

int cmd_replicate(const Args& a, std::ostream& out) {
    ReplicationConfig rc;
    rc.scenario = a.scenario.scenario();
    rc.replicates = a.replicates;
    rc.chain = a.chain;
    rc.hyper_policy = a.hyper.policy();
    rc.threshold = a.threshold;
    rc.threads = a.threads;

    std::map<std::string, std::string> cfg = hyper_config(a.hyper);
    cfg["command"] = "replicate";
    cfg["replicates"] = std::to_string(a.replicates);
    cfg["threshold"] = format_double(a.threshold);
    cfg["mse"] = a.mse;
    add_scenario_config(cfg, a.scenario);
    add_chain_config(cfg, a.chain);

    const AggregateReport r = run_replications(rc);
    const SimScenario& sc = r.scenario;

    Provenance prov = make_provenance(canonical(cfg));
    prov.add("scenario", describe(sc));
    prov.add("seed", std::to_string(sc.seed));
    add_hyper_provenance(prov, r.hyper, r.lambda_used.mean, r.raw_scale_lambda);
    add_chain_provenance(prov, a.chain);
    prov.add("replicates-failed", std::to_string(r.failed));
    prov.add("mse", a.mse);
    const bool per_coord = a.mse == "per-coordinate";
    const Summary& mse_s = per_coord ? r.mse_s_per_coord : r.mse_s;
    const Summary& mse_n = per_coord ? r.mse_n_per_coord : r.mse_n;

    CsvTable results;
    results.provenance = prov;
    results.header = {"setup",   "n",      "p",         "m_or_T",    "snr",       "TP_mean", "TP_sd", "FP_mean",
                      "FP_sd",   "MSES_mean", "MSES_sd", "MSEN_mean", "MSEN_sd", "R",       "seed"};
    results.rows.push_back({std::to_string(static_cast<int>(sc.setup)), std::to_string(sc.n), std::to_string(sc.p),
                            std::to_string(sc.m_or_T()), format_double(sc.snr), format_double(r.tp.mean),
                            format_double(r.tp.sd), format_double(r.fp.mean), format_double(r.fp.sd),
                            format_double(mse_s.mean), format_double(mse_s.sd), format_double(mse_n.mean),
                            format_double(mse_n.sd), std::to_string(r.succeeded), std::to_string(sc.seed)});
    const fs::path dir(a.out);
    write_csv(dir / "results.csv", results);

    CsvTable reps;
    reps.provenance = prov;
    reps.header = {"replicate", "data_seed", "chain_seed", "ok",  "TP", "FP", "MSES", "MSEN",
                   "lambda",    "accept_single", "accept_double", "error"};
    for (const auto& rec : r.replicates) {
        std::string error = rec.error;
        std::replace(error.begin(), error.end(), ',', ';');
        reps.rows.push_back({std::to_string(rec.index + 1), std::to_string(rec.data_seed),
                             std::to_string(rec.chain_seed), rec.ok ? "1" : "0", std::to_string(rec.metrics.tp),
                             std::to_string(rec.metrics.fp), format_double(rec.metrics.mse_s),
                             format_double(rec.metrics.mse_n), format_double(rec.lambda),
                             format_double(rec.accept_rate_single), format_double(rec.accept_rate_double), error});
    }
    write_csv(dir / "replicates.csv", reps);

    out << describe(sc) << " R=" << r.succeeded << "/" << r.requested << ": TP " << r.tp.mean << " (" << r.tp.sd
        << ") FP " << r.fp.mean << " (" << r.fp.sd << ") MSE_S " << r.mse_s.mean << " MSE_N " << r.mse_n.mean
        << " in " << r.wall_seconds << " s\n";
    return r.succeeded > 0 ? kOk : kRuntimeError;
}

int cmd_diagnose(const Args& a, std::ostream& out) {
    const LoadedDataset ds = a.data.load();
    const Index p = ds.data.p();
    std::optional<Vector> truth;
    if (!a.truth.empty()) {
        truth = read_truth(a.truth);
        if (truth->size() != p)
            fail(ErrorKind::DimensionMismatch, "truth has " + std::to_string(truth->size()) + " entries, expected " +
                                                   std::to_string(p));
    }
    Index s_star = 0;
    if (a.s_star) {
        s_star = *a.s_star;
    } else if (truth) {
        s_star = static_cast<Index>((truth->array() != 0.0).count());
    } else {
        throw CLI::ValidationError("--s-star", "required when no --truth is given");
    }

    const Setup setup = a.scenario.setup == 1 ? Setup::Setup1 : Setup::Setup2;
    const HyperPolicy policy = a.hyper.policy();
    const HyperParams nominal = policy.nominal(setup, ds.data.n(), p, ds.data.q());
    const HyperParams hyper = policy.resolve(setup, ds.data);
    hyper.validate(p);

    DiagnosticOptions opts;
    opts.sigma0 = a.sigma0;
    opts.samples = a.samples;
    opts.seed = a.scenario.seed;
    opts.exhaustive = a.exhaustive;
    const EigenDiagnostics diag = contraction_radius(ds.data, hyper, ds.map, s_star, opts);
    const double radius = a.big_m * diag.epsilon;
    const double spike_radius = a.small_m * std::sqrt(hyper.gamma * static_cast<double>(p));

    std::map<std::string, std::string> cfg = hyper_config(a.hyper);
    cfg["command"] = "diagnose";
    cfg["setup"] = std::to_string(a.scenario.setup);
    cfg["seed"] = std::to_string(a.scenario.seed);
    cfg["sigma0"] = format_double(a.sigma0);
    cfg["M"] = format_double(a.big_m);
    cfg["m"] = format_double(a.small_m);
    cfg["samples"] = std::to_string(a.samples);
    cfg["exhaustive"] = a.exhaustive ? "1" : "0";
    cfg["s_star"] = std::to_string(s_star);
    add_chain_config(cfg, a.chain);

    CsvTable table;
    table.provenance = make_provenance(canonical(cfg));
    add_hyper_provenance(table.provenance, nominal, hyper.lambda, policy.raw_scale_lambda);
    table.provenance.add("seed", std::to_string(a.scenario.seed));
    table.header = {"t_bar",   "t_bar_exact", "kappa1", "kappa_low", "v_low",        "v_high",
                    "epsilon", "sigma0",      "M",      "m",         "radius",       "spike_radius",
                    "s_star",  "patterns_examined"};
    std::vector<std::string> row{std::to_string(diag.t_bar), diag.t_bar_exact ? "1" : "0",
                                 format_double(diag.kappa1), format_double(diag.kappa_low),
                                 format_double(diag.v_low),  format_double(diag.v_high),
                                 format_double(diag.epsilon), format_double(a.sigma0),
                                 format_double(a.big_m),     format_double(a.small_m),
                                 format_double(radius),
                                 format_double(spike_radius),
                                 std::to_string(s_star),     std::to_string(diag.patterns_examined)};
    if (truth) {
        ChainConfig chain = a.chain;
        chain.seed = a.scenario.seed;
        chain.record_full_theta = true;
        const ChainResult result = fit_chain(ds.data, hyper, ds.map, chain);
        const double fraction = ball_fraction(result, *truth, radius);
        const double joint = joint_ball_fraction(result, *truth, radius, spike_radius);
        table.provenance.add("chain-seed", std::to_string(result.seeds_used.chain_seed));
        add_chain_provenance(table.provenance, chain);
        table.header.push_back("ball_fraction");
        table.header.push_back("joint_ball_fraction");
        table.header.push_back("draws");
        row.push_back(format_double(fraction));
        row.push_back(format_double(joint));
        row.push_back(std::to_string(result.theta_draws.size()));
        out << "ball fraction " << fraction << " at radius " << radius << '\n';
    }
    table.rows.push_back(std::move(row));
    const fs::path dir(a.out);
    write_csv(dir / "diagnostics.csv", table);
    out << "epsilon " << diag.epsilon << " kappa1 " << diag.kappa1 << " kappa_low " << diag.kappa_low << " t_bar "
        << diag.t_bar << "; wrote " << (dir / "diagnostics.csv").string() << '\n';
    return kOk;
}

void report(std::ostream& err, std::string_view kind, int code, const std::string& message) {
    std::string escaped;
    for (char c : message) {
        if (c == '"' || c == '\\') escaped += '\\';
        escaped += c == '\n' ? ' ' : c;
    }
    err << "error kind=" << kind << " code=" << code << " message=\"" << escaped << "\"\n";
}

}  // namespace

std::string default_output_dir() {
    const char* env = std::getenv("IVSEL_OUTPUT_DIR");
    return env && *env ? env : "ivsel-out";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Args a;
    a.out = default_output_dir();

    CLI::App app{"Quasi-Bayesian variable selection with instrumental variables", "ivsel"};
    app.set_version_flag("--version", std::string(IVSEL_VERSION_STRING));
    app.set_config("--config", "", "INI or TOML file; [simulate], [fit], [replicate] or [diagnose] sections");
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.add_option("-o,--out", a.out, "Output directory (default $IVSEL_OUTPUT_DIR or ivsel-out)");

    auto* simulate = app.add_subcommand("simulate", "Generate a simulated dataset");
    add_scenario(*simulate, a.scenario);

    auto* fit = app.add_subcommand("fit", "Run one chain on a dataset");
    add_data(*fit, a.data);
    add_hyper(*fit, a.hyper, &a.scenario.setup);
    add_chain(*fit, a.chain);
    fit->add_option("--seed", a.scenario.seed, "Chain seed")->capture_default_str();
    fit->add_option("--threshold", a.threshold, "Selection threshold on inclusion probability")->capture_default_str();
    fit->add_option("--level", a.level, "Credible interval level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    fit->add_flag("--trace", a.trace, "Write trace.csv");
    fit->add_flag("--plotdata", a.plotdata, "Write plotdata.csv with the draws of one coordinate");
    fit->add_option("--plot-coord", a.plot_coord, "1-based coordinate for --plotdata")->capture_default_str();

    auto* replicate = app.add_subcommand("replicate", "Run a simulation study");
    add_scenario(*replicate, a.scenario);
    add_hyper(*replicate, a.hyper, nullptr);
    add_chain(*replicate, a.chain);
    replicate->add_option("-R,--replicates", a.replicates, "Replicates")->check(CLI::PositiveNumber)->capture_default_str();
    replicate->add_option("--threads", a.threads, "Worker threads (0: all cores)")->capture_default_str();
    replicate->add_option("--threshold", a.threshold, "Selection threshold")->capture_default_str();
    replicate->add_option("--mse", a.mse, "MSE columns as block sums or per-coordinate means")
        ->check(CLI::IsMember({"sum", "per-coordinate"}))
        ->capture_default_str();

    auto* diagnose = app.add_subcommand("diagnose", "Contraction diagnostics on a dataset");
    add_data(*diagnose, a.data);
    add_hyper(*diagnose, a.hyper, &a.scenario.setup);
    add_chain(*diagnose, a.chain);
    diagnose->add_option("--seed", a.scenario.seed, "Seed for pattern sampling and the chain")->capture_default_str();
    diagnose->add_option("--truth", a.truth, "CSV with column theta_star; enables the ball fraction");
    diagnose->add_option("--s-star", a.s_star, "True sparsity (default: nonzeros in --truth)");
    diagnose->add_option("--sigma0", a.sigma0, "Sub-Gaussian scale")->check(CLI::PositiveNumber)->capture_default_str();
    diagnose->add_option("--M", a.big_m, "Ball radius multiplier")->check(CLI::PositiveNumber)->capture_default_str();
    diagnose->add_option("--m", a.small_m, "Spike radius multiplier")->check(CLI::PositiveNumber)->capture_default_str();
    diagnose->add_option("--samples", a.samples, "Random patterns examined")->capture_default_str();
    diagnose->add_flag("--exhaustive", a.exhaustive, "Enumerate every admissible pattern (p <= 12)");

    for (auto* sub : {simulate, fit, replicate, diagnose}) {
        sub->configurable();
        sub->allow_config_extras(CLI::config_extras_mode::error);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report(err, "UsageError", kUsageError, e.what());
        err << app.help();
        return kUsageError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(a, out);
        if (fit->parsed()) return cmd_fit(a, out);
        if (replicate->parsed()) return cmd_replicate(a, out);
        return cmd_diagnose(a, out);
    } catch (const CLI::Error& e) {
        report(err, "UsageError", kUsageError, e.what());
        return kUsageError;
    } catch (const Error& e) {
        const int code = is_data_error(e.kind()) ? kDataError : kRuntimeError;
        report(err, to_string(e.kind()), code, e.what());
        return code;
    } catch (const std::exception& e) {
        report(err, "RuntimeError", kRuntimeError, e.what());
        return kRuntimeError;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace ivsel::cli
