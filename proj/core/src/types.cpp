#include "ivsel/types.hpp"

#include "ivsel/error.hpp"

#include <algorithm>
#include <cmath>

namespace ivsel {

void DesignData::validate() const {
    require(n() >= 1, ErrorKind::DimensionMismatch, "design has no rows");
    require(p() >= 1, ErrorKind::DimensionMismatch, "design has no regressors");
    require(q() >= 1, ErrorKind::DimensionMismatch, "design has no instruments");
    require(X.rows() == n(), ErrorKind::DimensionMismatch,
            "X has " + std::to_string(X.rows()) + " rows, y has " + std::to_string(n()));
    require(W.rows() == n(), ErrorKind::DimensionMismatch,
            "W has " + std::to_string(W.rows()) + " rows, y has " + std::to_string(n()));
    require(y.allFinite() && X.allFinite() && W.allFinite(), ErrorKind::InvalidArgument,
            "design contains non-finite entries");
    if (normalized) {
        require(instrument_scales.size() == q(), ErrorKind::DimensionMismatch,
                "instrument_scales length differs from q");
        for (Index j = 0; j < q(); ++j) {
            require(std::abs(W.col(j).norm() - 1.0) <= 1e-12, ErrorKind::InvalidArgument,
                    "instrument column " + std::to_string(j + 1) + " is flagged normalized but does not have unit norm");
        }
    }
}

InstrumentMap InstrumentMap::paired(Index p) {
    InstrumentMap map;
    map.groups.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
        map.groups[static_cast<std::size_t>(j)] = {static_cast<int>(j), static_cast<int>(p + j)};
    }
    return map;
}

InstrumentMap InstrumentMap::blocks(Index p, Index block) {
    InstrumentMap map;
    map.groups.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
        auto& g = map.groups[static_cast<std::size_t>(j)];
        for (Index t = 0; t < block; ++t) g.push_back(static_cast<int>(block * j + t));
    }
    return map;
}

InstrumentMap InstrumentMap::identity(Index p) {
    InstrumentMap map;
    map.groups.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) map.groups[static_cast<std::size_t>(j)] = {static_cast<int>(j)};
    return map;
}

void InstrumentMap::validate(Index q) const {
    for (std::size_t j = 0; j < groups.size(); ++j) {
        require(!groups[j].empty(), ErrorKind::InvalidArgument,
                "instrument group of regressor " + std::to_string(j + 1) + " is empty");
        for (int l : groups[j]) {
            require(l >= 0 && l < q, ErrorKind::DimensionMismatch,
                    "instrument index " + std::to_string(l + 1) + " out of range for regressor " +
                        std::to_string(j + 1));
        }
    }
}

bool InstrumentMap::disjoint(Index q) const {
    std::vector<int> owner(static_cast<std::size_t>(q), -1);
    for (std::size_t j = 0; j < groups.size(); ++j) {
        for (int l : groups[j]) {
            auto& o = owner[static_cast<std::size_t>(l)];
            if (o != -1 && o != static_cast<int>(j)) return false;
            o = static_cast<int>(j);
        }
    }
    return true;
}

SparsityPattern SparsityPattern::from_bits(const std::vector<std::uint8_t>& bits) {
    SparsityPattern s(static_cast<Index>(bits.size()));
    for (std::size_t j = 0; j < bits.size(); ++j) s.set(static_cast<Index>(j), bits[j] != 0);
    return s;
}

SparsityPattern SparsityPattern::from_mask(std::uint64_t mask, Index p) {
    SparsityPattern s(p);
    for (Index j = 0; j < p; ++j) s.set(j, ((mask >> j) & 1U) != 0);
    return s;
}

void SparsityPattern::set(Index j, bool on) {
    auto& b = bits_[static_cast<std::size_t>(j)];
    if ((b != 0) == on) return;
    b = on ? 1 : 0;
    count_ += on ? 1 : -1;
}

std::vector<Index> SparsityPattern::active() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(count_));
    for (Index j = 0; j < size(); ++j)
        if ((*this)[j]) out.push_back(j);
    return out;
}

std::vector<Index> SparsityPattern::inactive() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(size() - count_));
    for (Index j = 0; j < size(); ++j)
        if (!(*this)[j]) out.push_back(j);
    return out;
}

double HyperParams::q_prior(Index p) const {
    return std::pow(static_cast<double>(p), -(u + 1.0));
}

void HyperParams::validate(Index p) const {
    require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::InvalidArgument, "lambda must be > 0");
    require(rho_sq > 0.0 && std::isfinite(rho_sq), ErrorKind::InvalidArgument, "rho_sq must be > 0");
    require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::InvalidArgument, "gamma must be > 0");
    require(u > 0.0 && std::isfinite(u), ErrorKind::InvalidArgument, "u must be > 0");
    require(s_bar >= 1 && s_bar <= p, ErrorKind::InvalidArgument,
            "s_bar must lie in [1, p], got " + std::to_string(s_bar));
    const double qp = q_prior(p);
    require(qp > 0.0 && qp <= 0.5, ErrorKind::InvalidArgument,
            "prior inclusion probability p^-(u+1) must lie in (0, 1/2]");
}

Index HyperParams::default_s_bar(Index n, Index p) {
    if (p <= 1) return 1;
    const double cap = std::floor(static_cast<double>(n) / std::log(static_cast<double>(p)));
    return std::clamp<Index>(static_cast<Index>(cap), 1, p);
}

}  // namespace ivsel
