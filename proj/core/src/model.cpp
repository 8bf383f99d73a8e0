#include "ivsel/model.hpp"

#include "ivsel/error.hpp"
#include "ivsel/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace ivsel {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_lengths(const DesignData& data, const SparsityPattern& delta, const Vector& theta,
                   const InstrumentMap& map) {
    require(delta.size() == data.p(), ErrorKind::DimensionMismatch, "pattern length differs from p");
    require(theta.size() == data.p(), ErrorKind::DimensionMismatch, "theta length differs from p");
    require(map.p() == data.p(), ErrorKind::DimensionMismatch, "instrument map length differs from p");
}

Vector masked(const Vector& theta, const SparsityPattern& delta) {
    Vector out = Vector::Zero(theta.size());
    for (Index j = 0; j < theta.size(); ++j)
        if (delta[j]) out[j] = theta[j];
    return out;
}

Matrix gather_columns(const Matrix& m, const std::vector<Index>& cols) {
    Matrix out(m.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = m.col(cols[k]);
    return out;
}

}  // namespace

double log_sparsity_weight(Index count, Index p, const HyperParams& hyper) {
    if (count > hyper.s_bar) return kNegInf;
    const double qp = hyper.q_prior(p);
    double out = 0.0;
    if (count > 0) out += static_cast<double>(count) * std::log(qp);
    if (count < p) out += static_cast<double>(p - count) * std::log1p(-qp);
    return out;
}

DesignData normalize_instruments(DesignData data) {
    require(data.n() >= 1, ErrorKind::DimensionMismatch, "design has no rows");
    data.instrument_scales.resize(data.q());
    for (Index j = 0; j < data.q(); ++j) {
        const double norm = data.W.col(j).norm();
        if (norm == 0.0) fail(ErrorKind::ZeroColumn, "instrument column " + std::to_string(j + 1) + " is zero");
        if (std::abs(norm - 1.0) <= 1e-14) {
            data.instrument_scales[j] = 1.0;
            continue;
        }
        data.W.col(j) /= norm;
        data.instrument_scales[j] = norm;
    }
    data.normalized = true;
    return data;
}

InstrumentMask instrument_set(const SparsityPattern& delta, const InstrumentMap& map, Index q) {
    require(delta.size() == map.p(), ErrorKind::DimensionMismatch, "pattern length differs from map");
    InstrumentMask mask(static_cast<std::size_t>(q), 0);
    for (Index j = 0; j < delta.size(); ++j) {
        if (!delta[j]) continue;
        for (int l : map.groups[static_cast<std::size_t>(j)]) mask[static_cast<std::size_t>(l)] = 1;
    }
    return mask;
}

std::vector<Index> mask_indices(const InstrumentMask& mask) {
    std::vector<Index> out;
    for (std::size_t l = 0; l < mask.size(); ++l)
        if (mask[l]) out.push_back(static_cast<Index>(l));
    return out;
}

double log_normal_density(double x, double variance) {
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - 0.5 * x * x / variance;
}

double log_quasi_likelihood(const DesignData& data, const SparsityPattern& delta,
                            const Vector& theta, const HyperParams& hyper,
                            const InstrumentMap& map) {
    check_lengths(data, delta, theta, map);
    const auto instruments = mask_indices(instrument_set(delta, map, data.q()));
    if (instruments.empty()) return 0.0;
    const Vector residual = data.y - data.X * masked(theta, delta);
    double sum = 0.0;
    for (Index l : instruments) {
        const double score = data.W.col(l).dot(residual);
        sum += score * score;
    }
    return -0.5 * sum / hyper.lambda;
}

double log_prior_sparsity(const SparsityPattern& delta, const HyperParams& hyper) {
    return log_sparsity_weight(delta.count(), delta.size(), hyper);
}

double log_prior_coefficients(const Vector& theta, const SparsityPattern& delta,
                              const HyperParams& hyper) {
    require(theta.size() == delta.size(), ErrorKind::DimensionMismatch, "theta length differs from pattern");
    const double slab_var = 1.0 / hyper.rho_sq;
    double sum = 0.0;
    for (Index j = 0; j < theta.size(); ++j)
        sum += log_normal_density(theta[j], delta[j] ? slab_var : hyper.gamma);
    return sum;
}

double log_posterior_unnormalized(const DesignData& data, const SparsityPattern& delta,
                                  const Vector& theta, const HyperParams& hyper,
                                  const InstrumentMap& map) {
    const double sparsity = log_prior_sparsity(delta, hyper);
    const double lik = log_quasi_likelihood(data, delta, theta, hyper, map);
    const double coef = log_prior_coefficients(theta, delta, hyper);
    if (sparsity == kNegInf) return kNegInf;
    return sparsity + lik + coef;
}

double log_marginal_delta(const DesignData& data, const SparsityPattern& delta,
                          const HyperParams& hyper, const InstrumentMap& map) {
    require(delta.size() == data.p() && map.p() == data.p(), ErrorKind::DimensionMismatch,
            "pattern or map length differs from p");
    const double sparsity = log_prior_sparsity(delta, hyper);
    if (sparsity == kNegInf) return kNegInf;

    const auto instruments = mask_indices(instrument_set(delta, map, data.q()));
    if (instruments.empty()) return sparsity;

    const Matrix w_sel = gather_columns(data.W, instruments);
    const Vector wy = w_sel.transpose() * data.y;
    double value = sparsity - 0.5 * wy.squaredNorm() / hyper.lambda;

    const auto active = delta.active();
    if (active.empty()) return value;

    const Matrix moments = w_sel.transpose() * gather_columns(data.X, active);
    const Index k = static_cast<Index>(active.size());
    Matrix precision = moments.transpose() * moments / hyper.lambda;
    precision.diagonal().array() += hyper.rho_sq;
    const Vector b = moments.transpose() * wy / hyper.lambda;

    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::SingularSystem, "posterior precision is not positive definite");
    const Matrix& l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    value += 0.5 * b.dot(llt.solve(b)) - 0.5 * log_det +
             0.5 * static_cast<double>(k) * std::log(hyper.rho_sq);
    return value;
}

std::vector<SparsityPattern> enumerate_patterns(Index p, Index s_bar) {
    require(p >= 1 && p <= 20, ErrorKind::InvalidArgument, "enumeration supports 1 <= p <= 20");
    std::vector<SparsityPattern> out;
    const std::uint64_t total = std::uint64_t{1} << p;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        if (std::popcount(mask) <= s_bar) out.push_back(SparsityPattern::from_mask(mask, p));
    }
    return out;
}

std::vector<PatternProbability> exact_delta_posterior(const DesignData& data,
                                                      const HyperParams& hyper,
                                                      const InstrumentMap& map) {
    std::vector<PatternProbability> out;
    for (auto& delta : enumerate_patterns(data.p(), hyper.s_bar)) {
        const double lm = log_marginal_delta(data, delta, hyper, map);
        out.push_back({std::move(delta), lm, 0.0});
    }
    double top = kNegInf;
    for (const auto& e : out) top = std::max(top, e.log_marginal);
    double total = 0.0;
    for (auto& e : out) {
        e.probability = std::exp(e.log_marginal - top);
        total += e.probability;
    }
    for (auto& e : out) e.probability /= total;
    return out;
}

RestrictedEigen restricted_eigen_diagnostics(const DesignData& data, const SparsityPattern& delta,
                                             const InstrumentMap& map) {
    if (delta.count() == 0) fail(ErrorKind::EmptyPattern, "restricted eigenvalues need an active regressor");
    require(delta.size() == data.p(), ErrorKind::DimensionMismatch, "pattern length differs from p");
    const auto instruments = mask_indices(instrument_set(delta, map, data.q()));
    const Matrix moments =
        gather_columns(data.W, instruments).transpose() * gather_columns(data.X, delta.active());
    const Matrix gram = moments.transpose() * moments / static_cast<double>(data.n());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {std::max(0.0, ev(0)), std::max(0.0, ev(ev.size() - 1))};
}

double contraction_epsilon(double sigma0, double kappa1, double kappa_low, Index s_bar,
                           Index s_star, Index t_bar, Index p, Index q, Index n) {
    const double spread = static_cast<double>(s_bar + s_star) * static_cast<double>(t_bar) *
                          std::log(static_cast<double>(p) * static_cast<double>(q)) /
                          static_cast<double>(n);
    return 2.0 * std::numbers::sqrt2 * sigma0 * (kappa1 / kappa_low) * std::sqrt(spread);
}

EigenDiagnostics contraction_radius(const DesignData& data, const HyperParams& hyper,
                                    const InstrumentMap& map, Index s_star,
                                    const DiagnosticOptions& options) {
    require(s_star >= 1, ErrorKind::InvalidArgument, "s_star must be >= 1");
    require(options.sigma0 > 0.0, ErrorKind::InvalidArgument, "sigma0 must be > 0");
    require(map.p() == data.p(), ErrorKind::DimensionMismatch, "instrument map length differs from p");
    const Index p = data.p();
    const Index q = data.q();
    const Index s_bar = std::min(hyper.s_bar, p);
    const double n = static_cast<double>(data.n());
    const bool disjoint = map.disjoint(q);

    EigenDiagnostics out;

    std::vector<Index> sizes;
    for (const auto& g : map.groups) sizes.push_back(static_cast<Index>(g.size()));
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    out.t_bar = std::accumulate(sizes.begin(), sizes.begin() + s_bar, Index{0});
    out.t_bar_exact = disjoint;
    out.t_bar = std::min(out.t_bar, q);

    const Matrix moments = data.W.transpose() * data.X;  // q x p

    if (disjoint) {
        // energy(i, j) = ||W_{G_i}' X_j||^2; the best pattern for column j takes
        // the s_bar groups with the largest energy.
        std::vector<double> energy(static_cast<std::size_t>(p));
        for (Index j = 0; j < p; ++j) {
            for (Index i = 0; i < p; ++i) {
                double e = 0.0;
                for (int l : map.groups[static_cast<std::size_t>(i)]) e += moments(l, j) * moments(l, j);
                energy[static_cast<std::size_t>(i)] = e;
            }
            std::nth_element(energy.begin(), energy.begin() + (s_bar - 1), energy.end(), std::greater<>());
            const double best = std::accumulate(energy.begin(), energy.begin() + s_bar, 0.0);
            out.kappa1 = std::max(out.kappa1, std::sqrt(best / n));
        }
    }

    auto examine = [&](const SparsityPattern& delta) {
        const auto instruments = mask_indices(instrument_set(delta, map, q));
        const auto active = delta.active();
        if (!disjoint) {
            for (Index j = 0; j < p; ++j) {
                double e = 0.0;
                for (Index l : instruments) e += moments(l, j) * moments(l, j);
                out.kappa1 = std::max(out.kappa1, std::sqrt(e / n));
            }
        }
        Matrix block(static_cast<Index>(instruments.size()), static_cast<Index>(active.size()));
        for (std::size_t r = 0; r < instruments.size(); ++r)
            for (std::size_t c = 0; c < active.size(); ++c)
                block(static_cast<Index>(r), static_cast<Index>(c)) = moments(instruments[r], active[c]);
        const Matrix gram = block.transpose() * block / n;
        Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
        const auto& ev = solver.eigenvalues();
        const double lo = std::max(0.0, ev(0));
        const double hi = std::max(0.0, ev(ev.size() - 1));
        if (out.patterns_examined == 0) {
            out.v_low = lo;
            out.v_high = hi;
        } else {
            out.v_low = std::min(out.v_low, lo);
            out.v_high = std::max(out.v_high, hi);
        }
        ++out.patterns_examined;
    };

    if (options.exhaustive) {
        require(p <= 12, ErrorKind::InvalidArgument, "exhaustive diagnostics require p <= 12");
        for (const auto& delta : enumerate_patterns(p, s_bar))
            if (delta.count() > 0) examine(delta);
    } else {
        Rng rng(options.seed);
        std::vector<Index> perm(static_cast<std::size_t>(p));
        for (std::size_t draw = 0; draw < options.samples; ++draw) {
            const Index k = 1 + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(s_bar)));
            std::iota(perm.begin(), perm.end(), Index{0});
            SparsityPattern delta(p);
            for (Index i = 0; i < k; ++i) {
                const auto pick = i + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(p - i)));
                std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick)]);
                delta.set(perm[static_cast<std::size_t>(i)], true);
            }
            examine(delta);
        }
    }

    out.kappa_low = out.v_low;
    if (!(out.kappa_low > std::numeric_limits<double>::epsilon()))
        fail(ErrorKind::DegenerateDesign, "minimum restricted eigenvalue estimate is numerically zero");
    out.epsilon = contraction_epsilon(options.sigma0, out.kappa1, out.kappa_low, s_bar, s_star,
                                      out.t_bar, p, q, data.n());
    return out;
}

}  // namespace ivsel
