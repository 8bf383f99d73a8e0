#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ivsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Observed triple (y, X, W). Column names are optional and only used by the
/// file loaders to resolve self-instrumenting regressors.
struct DesignData {
    Vector y;
    Matrix X;
    Matrix W;
    bool normalized = false;
    Vector instrument_scales;
    std::vector<std::string> x_names;
    std::vector<std::string> w_names;

    Index n() const { return y.size(); }
    Index p() const { return X.cols(); }
    Index q() const { return W.cols(); }

    /// Throws DimensionMismatch / InvalidArgument on shape or finiteness violations.
    void validate() const;
};

/// Instrument groups G_j: the instruments switched on when regressor j is active.
struct InstrumentMap {
    std::vector<std::vector<int>> groups;

    Index p() const { return static_cast<Index>(groups.size()); }

    /// G_j = {j, p + j}, the paired Fourier sin/cos layout.
    static InstrumentMap paired(Index p);
    /// G_j = {block*j, ..., block*j + block - 1}.
    static InstrumentMap blocks(Index p, Index block);
    /// G_j = {j}.
    static InstrumentMap identity(Index p);

    void validate(Index q) const;
    bool disjoint(Index q) const;
};

/// Inclusion bits with a cached popcount.
class SparsityPattern {
public:
    SparsityPattern() = default;
    explicit SparsityPattern(Index p) : bits_(static_cast<std::size_t>(p), 0) {}
    static SparsityPattern from_bits(const std::vector<std::uint8_t>& bits);
    /// Pattern with bit j set iff bit j of `mask` is set (p <= 64).
    static SparsityPattern from_mask(std::uint64_t mask, Index p);

    Index size() const { return static_cast<Index>(bits_.size()); }
    Index count() const { return count_; }
    bool operator[](Index j) const { return bits_[static_cast<std::size_t>(j)] != 0; }

    void set(Index j, bool on);
    void flip(Index j) { set(j, !(*this)[j]); }

    std::vector<Index> active() const;
    std::vector<Index> inactive() const;
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    bool operator==(const SparsityPattern& other) const { return bits_ == other.bits_; }
    bool operator<(const SparsityPattern& other) const { return bits_ < other.bits_; }

private:
    std::vector<std::uint8_t> bits_;
    Index count_ = 0;
};

struct HyperParams {
    double lambda = 1.0;  ///< quasi-likelihood scale
    double rho_sq = 1.0;  ///< slab precision; slab variance is 1/rho_sq
    double gamma = 1.0;   ///< spike variance
    double u = 1.0;       ///< prior inclusion probability is p^-(u+1)
    Index s_bar = 1;      ///< cap on the number of active regressors

    double q_prior(Index p) const;
    void validate(Index p) const;

    /// min(p, floor(n / log p)), at least 1.
    static Index default_s_bar(Index n, Index p);
};

struct EigenDiagnostics {
    double v_low = 0.0;
    double v_high = 0.0;
    Index t_bar = 0;
    double kappa1 = 0.0;
    double kappa_low = 0.0;
    double epsilon = 0.0;
    bool t_bar_exact = true;
    std::size_t patterns_examined = 0;
};

}  // namespace ivsel
