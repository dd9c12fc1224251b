#pragma once

// Exact binomial and matrix arithmetic over F_p.
//
// The central object is the shifted Pascal matrix
//
//     P(i, j) = C(i + j - eta_j, j) * u_j  (mod p),   0 <= i, j < p^m,
//
// evaluated lazily through Lucas' theorem. Everything here is exact; there are
// no tolerances anywhere in this module.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "levin/common.hpp"

namespace levin::ffmat {

/// A prime modulus. Primality is checked on construction, and the factorial
/// tables used for single-digit binomials are built once and shared.
class Prime {
public:
    static constexpr std::uint32_t kMax = 65521;

    explicit Prime(std::uint32_t p);

    std::uint32_t value() const noexcept { return p_; }
    operator std::uint32_t() const noexcept { return p_; }

    /// C(a, b) mod p for single digits 0 <= a, b < p.
    Residue digit_binom(std::uint32_t a, std::uint32_t b) const noexcept {
        if (b > a) return 0;
        return static_cast<Residue>(
            static_cast<std::uint64_t>(tables_->fact[a]) * tables_->inv_fact[b] % p_ *
            tables_->inv_fact[a - b] % p_);
    }

    Residue add(Residue a, Residue b) const noexcept { return (a + b) % p_; }
    Residue sub(Residue a, Residue b) const noexcept { return (a + p_ - b) % p_; }
    Residue mul(Residue a, Residue b) const noexcept {
        return static_cast<Residue>(static_cast<std::uint64_t>(a) * b % p_);
    }
    Residue neg(Residue a) const noexcept { return a == 0 ? 0 : p_ - a; }
    Residue inverse(Residue a) const;
    /// Reduces any signed integer into {0, ..., p-1}.
    Residue reduce(std::int64_t v) const noexcept {
        auto r = v % static_cast<std::int64_t>(p_);
        return static_cast<Residue>(r < 0 ? r + p_ : r);
    }

    friend bool operator==(const Prime& a, const Prime& b) noexcept { return a.p_ == b.p_; }

private:
    struct Tables {
        std::vector<Residue> fact;
        std::vector<Residue> inv_fact;
    };
    std::uint32_t p_;
    std::shared_ptr<const Tables> tables_;
};

bool is_prime(std::uint64_t n) noexcept;

/// Little-endian base-p digits of n (e_0 first). With `width` set, the result
/// is zero-padded or must fit; digits beyond `width` raise std::out_of_range.
std::vector<Residue> base_digits(const BigInt& n, Prime p, std::optional<std::size_t> width = {});
std::vector<Residue> base_digits(std::uint64_t n, Prime p, std::optional<std::size_t> width = {});

/// Inverse of base_digits.
BigInt from_digits(std::span<const Residue> little_endian, Prime p);

/// C(n, r) mod p by Lucas' theorem, digit by digit. C(n, r) = 0 for r > n.
Residue binom_mod(const BigInt& n, const BigInt& r, Prime p);
Residue binom_mod(std::uint64_t n, std::uint64_t r, Prime p) noexcept;

/// Non-decreasing column shifts with unit steps: eta_0 = 0 and
/// eta_{j+1} - eta_j in {0, 1}.
class ShiftProfile {
public:
    explicit ShiftProfile(std::vector<std::uint64_t> eta);
    static ShiftProfile zero(std::size_t dim);

    std::size_t size() const noexcept { return eta_.size(); }
    std::uint64_t operator[](std::size_t j) const { return eta_[j]; }
    std::span<const std::uint64_t> values() const noexcept { return eta_; }

    friend bool operator==(const ShiftProfile&, const ShiftProfile&) = default;

private:
    std::vector<std::uint64_t> eta_;
};

/// Column scalings u_j, every one a unit mod p.
class UnitProfile {
public:
    UnitProfile(std::vector<Residue> u, Prime p);
    static UnitProfile ones(std::size_t dim, Prime p);

    std::size_t size() const noexcept { return u_.size(); }
    Residue operator[](std::size_t j) const { return u_[j]; }
    std::span<const Residue> values() const noexcept { return u_; }

    friend bool operator==(const UnitProfile&, const UnitProfile&) = default;

private:
    std::vector<Residue> u_;
};

/// Dense row-major matrix of residues.
struct ResidueMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Residue> data;

    ResidueMatrix() = default;
    ResidueMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    Residue& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    Residue at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    std::span<const Residue> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    static ResidueMatrix identity(std::size_t n);

    friend bool operator==(const ResidueMatrix&, const ResidueMatrix&) = default;
};

/// Lazily evaluated shifted Pascal matrix P^(eta,u) mod p of size p^m.
///
/// Rows are cached on first use; the cache is mutex-guarded so a view may be
/// shared between threads. `tail(t)` yields the view with profiles
/// (eta_t, eta_{t+1}, ...) and (u_t, u_{t+1}, ...) used by the d-row identity.
class PascalView {
public:
    /// Largest dimension that may be materialized densely.
    static constexpr std::size_t kMaxDenseDim = std::size_t{1} << 12;

    PascalView(Prime p, ShiftProfile eta, UnitProfile u);

    /// eta = 0, u = 1.
    static PascalView unshifted(Prime p, unsigned m);

    Prime prime() const noexcept { return p_; }
    /// Number of columns (p^m for a full view, p^m - t for tail(t)).
    std::size_t dim() const noexcept { return dim_; }
    /// Rows are addressable up to the full dimension p^m even for a tail view.
    std::size_t row_limit() const noexcept { return row_limit_; }
    std::size_t column_offset() const noexcept { return offset_; }

    Residue entry(std::size_t i, std::size_t j) const;
    std::vector<Residue> row(std::size_t i) const;
    PascalView tail(std::size_t t) const;

    ResidueMatrix materialize() const;

    std::uint64_t eta(std::size_t j) const { return eta_->values()[offset_ + j]; }
    Residue unit(std::size_t j) const { return u_->values()[offset_ + j]; }

private:
    PascalView(Prime p, std::shared_ptr<const ShiftProfile> eta, std::shared_ptr<const UnitProfile> u,
               std::size_t offset);

    Residue compute(std::size_t i, std::size_t j) const;

    struct RowCache {
        std::mutex mutex;
        std::unordered_map<std::size_t, std::shared_ptr<const std::vector<Residue>>> rows;
    };

    Prime p_;
    std::shared_ptr<const ShiftProfile> eta_;
    std::shared_ptr<const UnitProfile> u_;
    std::size_t offset_ = 0;
    std::size_t dim_ = 0;
    std::size_t row_limit_ = 0;
    std::shared_ptr<RowCache> cache_;
};

Residue pascal_entry(std::size_t i, std::size_t j, const ShiftProfile& eta, const UnitProfile& u, Prime p);

// Named windows. A_{k,t}: rows k..k+t-1, columns 0..t-1. B_{k,t}: the same rows,
// columns t..dim-1. c_{k+t,t} and d_{k+t,t}: row k+t split at column t.
ResidueMatrix submatrix_A(const PascalView& view, std::size_t k, std::size_t t);
ResidueMatrix submatrix_B(const PascalView& view, std::size_t k, std::size_t t);
std::vector<Residue> row_c(const PascalView& view, std::size_t row, std::size_t t);
std::vector<Residue> row_d(const PascalView& view, std::size_t row, std::size_t t);

/// Arbitrary rectangular window of a view.
ResidueMatrix window(const PascalView& view, std::size_t row0, std::size_t rows, std::size_t col0,
                     std::size_t cols);

std::size_t rank(ResidueMatrix mat, Prime p);
bool is_regular(const ResidueMatrix& mat, Prime p);
Residue determinant(ResidueMatrix mat, Prime p);

/// Unique solution of mat * x = rhs over F_p, or nullopt when mat is singular.
std::optional<std::vector<Residue>> solve(ResidueMatrix mat, std::vector<Residue> rhs, Prime p);

/// mat * x.
std::vector<Residue> multiply(const ResidueMatrix& mat, std::span<const Residue> x, Prime p);
/// x^T * mat (row vector times matrix).
std::vector<Residue> left_multiply(std::span<const Residue> x, const ResidueMatrix& mat, Prime p);
Residue dot(std::span<const Residue> a, std::span<const Residue> b, Prime p);

/// xi_t = ((-1)^{t+1} C(t,0), (-1)^{t+2} C(t,1), ..., (-1)^{2t} C(t,t-1)) mod p.
std::vector<Residue> xi(std::size_t t, Prime p);

/// sum_{j=1}^{u} C(i+j, j) mod p, term by term.
Residue hockey_stick_sum(std::uint64_t i, std::uint64_t u, Prime p);
/// The same sum in closed form C(i+1+u, u) - 1.
Residue hockey_stick(std::uint64_t i, std::uint64_t u, Prime p);

/// c_{k+t,t} predicted as xi_t * A_{k,t}.
std::vector<Residue> predict_c_row(const PascalView& view, std::size_t k, std::size_t t);
/// d_{k+t,t} predicted as xi_t * B_{k,t} + c-row of tail(t) at row k+t.
std::vector<Residue> predict_d_row(const PascalView& view, std::size_t k, std::size_t t);

/// Row window [row_begin, row_end) x [0, cols) of the D_m matrix
/// C(i+1+j, j) - 1 mod p.
struct DmWindow {
    std::uint64_t row_begin = 0;
    std::uint64_t row_end = 0;
    std::uint64_t cols = 0;

    std::uint64_t rows() const noexcept { return row_end - row_begin; }
};

/// The window used for m > 7: rows [p^{m-3} - p(p^3-1)p^{m-7}, p^{m-3}),
/// columns [0, p^{m-7}). Throws std::domain_error for m <= 7.
DmWindow dm_window(unsigned m, Prime p);

ResidueMatrix dm_matrix(unsigned m, Prime p, std::optional<DmWindow> override_window = {});
Residue dm_entry(std::uint64_t i, std::uint64_t j, Prime p) noexcept;

/// Number of entries equal to `value` in the window, column by column.
std::vector<std::uint64_t> dm_column_counts(const DmWindow& window, Prime p, Residue value);

/// Exact fraction of (p-1)s in D_m predicted in closed form, 1 - ((p+1)/(2p))^{m-7}.
Rational dm_predicted_fraction(unsigned m, Prime p);

/// Number of nonzero entries of (C(j, i) mod p)_{0 <= i, j < p^r}.
std::uint64_t pascal_nonzero_count(unsigned r, Prime p);

} // namespace levin::ffmat
