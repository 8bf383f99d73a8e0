#pragma once

#include "ivsel/rng.hpp"
#include "ivsel/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ivsel {

enum class Setup { Setup1 = 1, Setup2 = 2 };

struct SimScenario {
    Setup setup = Setup::Setup1;
    Index n = 100;
    Index p = 100;
    Index m = 10;  ///< Setup1: number of endogenous regressors
    Index T = 2;   ///< Setup2: instruments per regressor
    double snr = 1.0;
    std::uint64_t seed = 1;

    /// m (Setup1) or T (Setup2).
    Index m_or_T() const { return setup == Setup::Setup1 ? m : T; }
    void validate() const;
};

struct GroundTruth {
    Vector theta_star;
    std::vector<Index> support;
    std::vector<Index> endogenous;
};

struct SimulatedData {
    DesignData data;
    GroundTruth truth;
    InstrumentMap map;
};

/// snr * (5, -4, 7, -2, 1.5, 0, ..., 0). Throws TooFewRegressors when p < 5.
GroundTruth make_theta_star(Index p, double snr);

/// 0-based endogenous indices {0, 1, 2} and {5, ..., m + 1}.
std::vector<Index> setup1_endogenous(Index m);

struct Setup1Options {
    bool zero_structural_error = false;  ///< test hook: every epsilon draw replaced by 0
};

/// Fourier-instrument design. Per row, draws in order: V1, V2, V3, epsilon,
/// u_1..u_p. W = [F, H] (q = 2p) normalized; G_j = {j, p + j}.
SimulatedData generate_setup1(Index n, Index p, Index m, double snr, Rng& rng,
                              const Setup1Options& options = {});

/// (0.1, 0.2, ..., 1.0, 0, ...) truncated to length p.
Vector setup2_gamma0(Index p);

/// AR(0.3) design with T instruments per regressor. Per row, draws in order:
/// e_1..e_p (X~ = L e with L the Cholesky factor of 0.3^|i-j|), z_1..z_{Tp},
/// zeta. Every regressor is endogenous; W = z normalized, G_j = {Tj, ..., Tj+T-1}.
SimulatedData generate_setup2(Index n, Index p, Index T, double snr, Rng& rng);

SimulatedData generate(const SimScenario& scenario);

std::string describe(const SimScenario& scenario);

}  // namespace ivsel
