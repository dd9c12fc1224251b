#pragma once

// Affine necklace blocks over F_p and the digit stream obtained by
// concatenating them.
//
// Block A_m has p^m * p^{p^m} digits laid out column-major:
//
//     d_0(0) ... d_{p^m-1}(0)  d_0(1) ... d_{p^m-1}(1)  ...
//
// with d_k(n) = sum_j P(k, j) e_j(n) + z_k mod p, where e_j(n) is the j-th
// base-p digit of n, least significant first. Getting the order wrong (row-major)
// silently breaks every discrepancy result downstream, so the tests pin it.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <vector>

#include "levin/common.hpp"
#include "levin/ffmat.hpp"
#include "levin/necklace.hpp"

namespace levin::construct {

using ffmat::Prime;

struct AffineParams {
    Prime p;
    unsigned m;
    std::vector<Residue> z;
    ffmat::ShiftProfile eta;
    ffmat::UnitProfile u;

    AffineParams(Prime p, unsigned m, std::vector<Residue> z, ffmat::ShiftProfile eta, ffmat::UnitProfile u);

    std::size_t dim() const noexcept { return z.size(); }
    ffmat::PascalView view() const { return ffmat::PascalView(p, eta, u); }
};

/// z = 0, eta = 0, u = 1: Levin's construction.
AffineParams levin_params(unsigned m, Prime p);

/// Uniformly random valid profiles: z and u uniform, eta a random 0/1 walk.
AffineParams random_params(unsigned m, Prime p, std::mt19937_64& rng);

/// Start offset of A_m in the concatenated stream: sum_{j<m} p^j * p^{p^j}.
BigInt n_offset(unsigned m, Prime p);

/// p^m * p^{p^m}.
BigInt block_length(unsigned m, Prime p);

/// Precomputed evaluator for one level. Dense rows are kept when
/// p^m <= PascalView::kMaxDenseDim; larger levels evaluate rows lazily.
class AffineBlock {
public:
    explicit AffineBlock(AffineParams params);

    const AffineParams& params() const noexcept { return params_; }
    std::size_t dim() const noexcept { return params_.dim(); }
    Prime prime() const noexcept { return params_.p; }

    /// d_k(n) from the little-endian digit vector of n (length dim()).
    Residue digit(std::size_t k, std::span<const Residue> n_digits) const;
    Residue digit(std::size_t k, const BigInt& n) const;

    /// Number of columns, p^{p^m}.
    const BigInt& columns() const noexcept { return columns_; }

private:
    AffineParams params_;
    ffmat::PascalView view_;
    ffmat::ResidueMatrix dense_;
    bool has_dense_ = false;
    BigInt columns_;
};

/// d_k(n) evaluated straight from the definition. Throws std::out_of_range
/// when k >= p^m or n >= p^{p^m}.
Residue digit_d(std::size_t k, const BigInt& n, const AffineParams& params);

/// Materializes A_m. Throws BudgetExceeded when the block has more than
/// `max_digits` digits.
necklace::Word block(const AffineParams& params, std::uint64_t max_digits = std::uint64_t{1} << 26);

/// z' with P z' = z over F_p.
std::vector<Residue> z_prime(const AffineParams& params);

/// d_k(n) in the alternative form sum_j P(k, j) (e_j(n) + z'_j).
Residue digit_d_shifted(std::size_t k, const BigInt& n, const AffineParams& params, std::span<const Residue> zp);

using ParamsSource = std::function<AffineParams(unsigned m)>;

/// ParamsSource producing random_params for every level from a fixed seed.
ParamsSource random_source(Prime p, std::uint64_t seed);

/// The base-p expansion of alpha = 0.A_1 A_2 A_3 ... with random access by
/// absolute 0-indexed digit position (alpha_1 is position 0).
///
/// Levels are built lazily and shared between threads. Positions at or beyond
/// the start of level max_level + 1 raise BudgetExceeded.
class DigitStream {
public:
    static constexpr unsigned kDefaultMaxLevel = 8;

    explicit DigitStream(Prime p, unsigned max_level = kDefaultMaxLevel, ParamsSource source = {});

    Prime prime() const noexcept { return p_; }
    unsigned max_level() const noexcept { return max_level_; }

    /// n_m for 1 <= m <= max_level + 1.
    BigInt offset(unsigned m) const;

    /// The level containing absolute position i.
    unsigned level_of(const BigInt& i) const;

    const AffineBlock& level(unsigned m) const;

    Residue digit(const BigInt& i) const;
    necklace::Word slice(const BigInt& i, std::size_t len) const;

private:
    Prime p_;
    unsigned max_level_;
    ParamsSource source_;

    mutable std::mutex mutex_;
    mutable std::vector<BigInt> offsets_;  // offsets_[m] = n_m, filled on demand
    mutable std::map<unsigned, std::shared_ptr<const AffineBlock>> levels_;
};

} // namespace levin::construct
