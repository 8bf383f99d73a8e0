#pragma once
#include "ivsel/model.hpp"
#include "ivsel/rng.hpp"
#include "ivsel/types.hpp"

#include <cmath>

namespace ivsel::testing {

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

inline Vector gaussian_vector(Index size, Rng& rng) {
    Vector v(size);
    for (Index i = 0; i < size; ++i) v(i) = rng.normal();
    return v;
}

// Instruments correlated with the regressors they are paired with, so the
// quasi-likelihood carries real information about theta.
struct Instance {
    DesignData data;
    InstrumentMap map;
    Vector theta_true;
};

inline Instance paired_instance(Index n, Index p, std::uint64_t seed, double signal = 1.0) {
    Rng rng(seed);
    Instance inst;
    Matrix F = gaussian_matrix(n, p, rng);
    Matrix H = gaussian_matrix(n, p, rng);
    Matrix X = F + H + 0.5 * gaussian_matrix(n, p, rng);
    inst.theta_true = Vector::Zero(p);
    for (Index j = 0; j < std::min<Index>(p, 3); ++j) inst.theta_true(j) = signal * (j % 2 ? -1.0 : 1.0) * (1.0 + j);
    inst.data.X = X;
    inst.data.W.resize(n, 2 * p);
    inst.data.W << F, H;
    inst.data.y = X * inst.theta_true + gaussian_vector(n, rng);
    inst.data = normalize_instruments(inst.data);
    inst.map = InstrumentMap::paired(p);
    return inst;
}

inline SparsityPattern pattern(std::initializer_list<int> bits) {
    std::vector<std::uint8_t> b;
    for (int v : bits) b.push_back(static_cast<std::uint8_t>(v));
    return SparsityPattern::from_bits(b);
}

inline HyperParams hyper(double lambda, double rho_sq, double gamma, Index s_bar, double u = 1.0) {
    HyperParams h;
    h.lambda = lambda;
    h.rho_sq = rho_sq;
    h.gamma = gamma;
    h.s_bar = s_bar;
    h.u = u;
    return h;
}

}  // namespace ivsel::testing
