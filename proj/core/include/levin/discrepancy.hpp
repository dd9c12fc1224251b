#pragma once

// Prefix point sets of ({p^n alpha}), exact star discrepancy, local
// discrepancy, and the necklace discrepancy bounds.
//
// Points are truncated to L base-p digits and stored as integer numerators over
// p^L, so every comparison is exact. Truncation moves each point down by less
// than p^-L, hence |D*(truncated) - D*(true)| <= p^-L.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levin/common.hpp"
#include "levin/construct.hpp"
#include "levin/ffmat.hpp"

namespace levin::discrepancy {

using ffmat::Prime;

struct PointSet {
    Prime p{2};
    unsigned L = 1;
    std::uint64_t scale = 2;               // p^L
    std::vector<std::uint64_t> numerators;  // x_n = numerators[n] / scale

    std::size_t size() const noexcept { return numerators.size(); }
    bool empty() const noexcept { return numerators.empty(); }
    Rational point(std::size_t i) const { return Rational(numerators.at(i), scale); }
};

/// Largest L with p^L < 2^63.
unsigned max_precision(Prime p) noexcept;

/// ceil(log_p N) + 16, clamped to max_precision(p).
unsigned default_precision(std::uint64_t N, Prime p) noexcept;

/// x_n = 0.alpha_{n+1} ... alpha_{n+L} for n = n_start, ..., n_start + N - 1.
/// Throws std::invalid_argument for L outside [1, max_precision(p)].
PointSet extract_points(const construct::DigitStream& stream, const BigInt& n_start, std::uint64_t N, unsigned L);

/// The point set over already extracted digits (positions 0..N+L-2 of `digits`).
PointSet points_from_digits(std::span<const necklace::Digit> digits, Prime p, std::uint64_t N, unsigned L);

/// [0, a) when right_limit is false, [0, a] (the limit from the right) otherwise.
struct Witness {
    Rational a;
    bool right_limit = false;
};

struct StarDiscrepancy {
    Rational value;
    Witness witness;
};

/// D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N) over the sorted points.
/// Throws std::invalid_argument for an empty set.
StarDiscrepancy star_discrepancy(const PointSet& ps);

/// The same value for numerators already sorted ascending, over `scale`.
StarDiscrepancy star_discrepancy_sorted(std::span<const std::uint64_t> sorted, std::uint64_t scale);

/// #{x in [a, c)} - N (c - a). Throws std::invalid_argument unless 0 <= a < c <= 1.
Rational local_discrepancy(const PointSet& ps, const Rational& a, const Rational& c);

/// Positive integer sequence j -> f(j), j >= 1.
using Sequence = std::function<BigInt(unsigned)>;

/// j -> b^j.
Sequence power_sequence(std::uint32_t b);

struct Thm1Bound {
    unsigned m = 0;
    Rational bound;        // the stated bound
    Rational proof_bound;  // the sharper value at the end of the proof
};

/// Level m with sum_{j<m} g(j) b^f(j) <= N < sum_{j<=m} g(j) b^f(j), and the
/// corresponding upper bound for N D*_N. m = 1 is allowed (N below the first
/// block). Throws std::invalid_argument for N = 0 or b < 2.
Thm1Bound thm1_bound(const BigInt& N, const Sequence& f, const Sequence& g, std::uint32_t b);

/// sum_{j<m} f(j) + sum_{j<m} g(j). Throws std::invalid_argument for m < 2.
BigInt cor1_bound(unsigned m, const Sequence& f, const Sequence& g);

struct DiscrepancyReport {
    std::uint64_t N = 0;
    Rational d_star;        // exact, for the truncated points
    Rational d_upper;       // d_star + p^-L, an upper bound for the true value
    Witness witness;
    Rational nd_star;       // N * d_star
    unsigned level = 0;     // m from thm1_bound
    Rational thm1;          // bound on N D*_N
    Rational thm1_proof;
    std::optional<BigInt> cor1;  // only when N = n_m
    double ratio = 0;       // N d_star / thm1, approximate
    double trend = 0;       // N d_star / (log N)^2, approximate; 0 for N = 1
    double trend_max = 0;   // running max of trend over the rows so far
};

/// Exact D*_N for each requested N (sorted ascending, duplicates removed) over
/// one stream prefix of length max(Ns). Levin-type streams use f = g = p^j.
std::vector<DiscrepancyReport> scan(const construct::DigitStream& stream, std::vector<std::uint64_t> Ns,
                                    std::optional<unsigned> L = {});

/// `count` distinct integers in [1, n_max], roughly geometrically spaced,
/// always including 1 and n_max.
std::vector<std::uint64_t> log_spaced(std::uint64_t n_max, std::size_t count);

/// CSV header and row. Float columns are approximate. The last column bounds
/// the two-sided discrepancy D_N <= 2 D*_N.
std::string csv_header();
std::string csv_row(const DiscrepancyReport& r);

} // namespace levin::discrepancy
