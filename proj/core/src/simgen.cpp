#include "ivsel/simgen.hpp"

#include "ivsel/error.hpp"
#include "ivsel/model.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <sstream>

namespace ivsel {

void SimScenario::validate() const {
    require(n >= 1 && p >= 1, ErrorKind::InvalidArgument, "n and p must be >= 1");
    require(snr > 0.0, ErrorKind::InvalidArgument, "snr must be > 0");
    if (setup == Setup::Setup1) {
        require(m >= 3 && m <= p - 2, ErrorKind::InvalidArgument, "Setup 1 requires 3 <= m <= p - 2");
    } else {
        require(T >= 1, ErrorKind::InvalidArgument, "Setup 2 requires T >= 1");
    }
}

GroundTruth make_theta_star(Index p, double snr) {
    if (p < 5) fail(ErrorKind::TooFewRegressors, "the true coefficient vector needs p >= 5");
    require(snr > 0.0, ErrorKind::InvalidArgument, "snr must be > 0");
    GroundTruth truth;
    truth.theta_star = Vector::Zero(p);
    const double base[5] = {5.0, -4.0, 7.0, -2.0, 1.5};
    for (Index j = 0; j < 5; ++j) {
        truth.theta_star[j] = snr * base[j];
        truth.support.push_back(j);
    }
    return truth;
}

std::vector<Index> setup1_endogenous(Index m) {
    std::vector<Index> out{0, 1, 2};
    for (Index j = 5; j <= m + 1; ++j) out.push_back(j);
    return out;
}

SimulatedData generate_setup1(Index n, Index p, Index m, double snr, Rng& rng,
                              const Setup1Options& options) {
    SimScenario{Setup::Setup1, n, p, m, 1, snr, 0}.validate();
    SimulatedData sim;
    sim.truth = make_theta_star(p, snr);
    sim.truth.endogenous = setup1_endogenous(m);
    std::vector<bool> endogenous(static_cast<std::size_t>(p), false);
    for (Index j : sim.truth.endogenous) endogenous[static_cast<std::size_t>(j)] = true;

    DesignData& d = sim.data;
    d.X.resize(n, p);
    d.W.resize(n, 2 * p);
    d.y.resize(n);
    const double pi = std::numbers::pi;
    const double root2 = std::numbers::sqrt2;
    Vector error(n);

    for (Index i = 0; i < n; ++i) {
        const double v[3] = {rng.normal(), rng.normal(), rng.normal()};
        double eps = rng.normal();
        if (options.zero_structural_error) eps = 0.0;
        error[i] = eps;
        for (Index j = 0; j < p; ++j) {
            const double freq = static_cast<double>(j + 1) * pi;
            double s = 0.0;
            double c = 0.0;
            for (double vk : v) {
                s += std::sin(freq * vk);
                c += std::cos(freq * vk);
            }
            const double f = root2 * s;
            const double h = root2 * c;
            d.W(i, j) = f;
            d.W(i, p + j) = h;
            const double u = rng.normal();
            d.X(i, j) = endogenous[static_cast<std::size_t>(j)] ? (f + h + 1.0) * (3.0 * eps + 1.0) : f + h + u;
        }
    }
    d.y = d.X * sim.truth.theta_star + error;
    for (Index j = 0; j < p; ++j) d.x_names.push_back("x" + std::to_string(j + 1));
    for (Index j = 0; j < p; ++j) d.w_names.push_back("F" + std::to_string(j + 1));
    for (Index j = 0; j < p; ++j) d.w_names.push_back("H" + std::to_string(j + 1));
    d = normalize_instruments(std::move(d));
    sim.map = InstrumentMap::paired(p);
    return sim;
}

Vector setup2_gamma0(Index p) {
    Vector g = Vector::Zero(p);
    for (Index j = 0; j < std::min<Index>(p, 10); ++j) g[j] = 0.1 * static_cast<double>(j + 1);
    return g;
}

SimulatedData generate_setup2(Index n, Index p, Index T, double snr, Rng& rng) {
    SimScenario{Setup::Setup2, n, p, 3, T, snr, 0}.validate();
    SimulatedData sim;
    sim.truth = make_theta_star(p, snr);
    for (Index j = 0; j < p; ++j) sim.truth.endogenous.push_back(j);

    Matrix sigma(p, p);
    for (Index a = 0; a < p; ++a)
        for (Index b = 0; b < p; ++b) sigma(a, b) = std::pow(0.3, static_cast<double>(std::abs(a - b)));
    const Matrix chol = Eigen::LLT<Matrix>(sigma).matrixL();
    const Vector gamma0 = setup2_gamma0(p);

    DesignData& d = sim.data;
    d.X.resize(n, p);
    d.W.resize(n, T * p);
    d.y.resize(n);
    Vector e(p);
    Vector error(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) e[j] = rng.normal();
        const Vector latent = chol * e;
        for (Index l = 0; l < T * p; ++l) d.W(i, l) = rng.normal();
        const double zeta = 0.25 * rng.normal();
        for (Index j = 0; j < p; ++j) {
            double x = latent[j];
            for (Index t = 0; t < T; ++t) x += d.W(i, T * j + t);
            d.X(i, j) = x;
        }
        error[i] = zeta + latent.dot(gamma0);
    }
    d.y = d.X * sim.truth.theta_star + error;
    for (Index j = 0; j < p; ++j) d.x_names.push_back("x" + std::to_string(j + 1));
    for (Index l = 0; l < T * p; ++l) d.w_names.push_back("z" + std::to_string(l + 1));
    d = normalize_instruments(std::move(d));
    sim.map = InstrumentMap::blocks(p, T);
    return sim;
}

SimulatedData generate(const SimScenario& scenario) {
    scenario.validate();
    Rng rng(scenario.seed);
    if (scenario.setup == Setup::Setup1)
        return generate_setup1(scenario.n, scenario.p, scenario.m, scenario.snr, rng);
    return generate_setup2(scenario.n, scenario.p, scenario.T, scenario.snr, rng);
}

std::string describe(const SimScenario& s) {
    std::ostringstream os;
    os << "setup" << static_cast<int>(s.setup) << " n=" << s.n << " p=" << s.p
       << (s.setup == Setup::Setup1 ? " m=" : " T=") << s.m_or_T() << " snr=" << s.snr
       << " seed=" << s.seed;
    return os.str();
}

}  // namespace ivsel
