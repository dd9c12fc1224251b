#pragma once

// Executable form of the lower-bound construction for Levin-type streams.
//
// Notation: a plan fixes a level m, a strictly decreasing schedule
// w_0 > ... > w_M, and block offsets B_l = sum_{i<l} p^{w_i}. Block l holds the
// columns n in [B_l, B_l + p^{w_l}) of A_m, and x_{n,k} is the point whose
// digits start at d_k(n). For k + w < p^m the first w digits of x_{n,k} are
// d_k(n), ..., d_{k+w-1}(n) and the next one, gamma, is d_{k+w}(n).
//
// U digits are written most significant first: U = u_{w-1} + u_{w-2} p + ... + u_0 p^{w-1}.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "levin/common.hpp"
#include "levin/construct.hpp"
#include "levin/ffmat.hpp"

namespace levin::lowerbound {

using ffmat::Prime;

struct LowerBoundPlan {
    Prime p{2};
    unsigned m = 1;
    std::size_t dim = 0;          // p^m
    std::vector<std::uint64_t> w;  // w_0 > w_1 > ... > w_M
    std::vector<BigInt> B;         // B_0 = 0, B_l = sum_{i<l} p^{w_i}
    BigInt N;                      // n_m + p^m (p^{w_0} + ... + p^{w_M})
    bool standard_schedule = false;

    std::size_t blocks() const noexcept { return w.size(); }
    std::size_t M() const noexcept { return w.size() - 1; }
};

/// w_l = p^{m-3} - 1 - p^3 l for l = 0, ..., p^{m-7} - 1. Requires m >= 8
/// (std::domain_error otherwise).
LowerBoundPlan make_plan(unsigned m, Prime p);

/// Caller-chosen schedule: non-empty, strictly decreasing, every w_l = p-1
/// (mod p), w_0 < p^m. Throws std::invalid_argument otherwise.
LowerBoundPlan make_custom_plan(Prime p, unsigned m, std::vector<std::uint64_t> w);

/// Number of points of {x_{n,k} : 0 <= k < p^m, B p^t <= n < (B+1) p^t} in
/// each cell [c/p^t, (c+1)/p^t). Reads past the end of the level when the last
/// column's points run into A_{m+1}. Throws BudgetExceeded when p^t cells or
/// p^{m+t} points exceed `budget`.
std::vector<std::uint64_t> cell_counts(const construct::DigitStream& stream, unsigned m, std::size_t t,
                                       const BigInt& B, std::uint64_t budget = std::uint64_t{1} << 26);

/// Cells whose count differs from p^m, ascending.
std::vector<std::uint64_t> exceptional_cs(const construct::DigitStream& stream, unsigned m, std::size_t t,
                                          const BigInt& B, std::uint64_t budget = std::uint64_t{1} << 26);

/// Length p^m - w_l vector with ones at offsets w_i - w_l for i < l.
std::vector<Residue> block_vector(const LowerBoundPlan& plan, std::size_t l);

/// The w base-p digits of U, most significant first.
std::vector<Residue> u_digits(const BigInt& U, std::size_t w, Prime p);

/// gamma = xi_w . (U - z window) + (tail c-row) . v + z_{k+w}, with w = |U_digits|.
/// Requires k + w < p^m.
Residue predict_gamma(const construct::AffineParams& params, const LowerBoundPlan& plan, std::size_t l,
                      std::size_t k, std::span<const Residue> U_digits);

/// Levin closed form xi_w . U + C(floor((k+w)/s) + 1 + l, l) - 1, where s is
/// the common gap w_{i} - w_{i+1} of the schedule up to l. Throws
/// std::domain_error when the gaps differ or s is not a power of p.
Residue predict_gamma_levin(const LowerBoundPlan& plan, std::size_t l, std::size_t k,
                            std::span<const Residue> U_digits);

/// The digits e_0..e_{w-1} of n - B_l solving A_{k,w} e = U - z window - B_{k,w} v.
std::vector<Residue> solve_unique_n(const construct::AffineParams& params, std::size_t k,
                                    std::span<const Residue> U_digits, std::span<const Residue> block_vec);

/// c_{k+w,w} . e + d_{k+w,w} . v + z_{k+w}, with w = |e|.
Residue gamma_from_solution(const construct::AffineParams& params, std::size_t k, std::span<const Residue> e,
                            std::span<const Residue> block_vec);

/// Brute-force reading of block l: for every n in the block, the cell U of
/// x_{n,k} at resolution p^-w_l and its next digit gamma.
struct Hit {
    std::uint64_t U = 0;
    BigInt n;
    Residue gamma = 0;
};
std::vector<Hit> enumerate_hits(const construct::DigitStream& stream, const LowerBoundPlan& plan, std::size_t l,
                                std::size_t k);

struct GammaCheck {
    std::uint64_t pairs = 0;            // (l, k, U) triples checked
    std::uint64_t not_unique = 0;       // cells hit by zero or several n
    std::uint64_t matrix_mismatch = 0;  // predict_gamma vs observed digit
    std::uint64_t solve_mismatch = 0;   // solve_unique_n vs observed n, or its gamma
    std::uint64_t closed_form_mismatch = 0;
    std::uint64_t closed_form_checked = 0;
    std::uint64_t shift_mismatch = 0;
    std::uint64_t shift_checked = 0;

    bool ok() const noexcept {
        return not_unique == 0 && matrix_mismatch == 0 && solve_mismatch == 0 && closed_form_mismatch == 0 &&
               shift_mismatch == 0;
    }
};

/// Every (l, k, U) with k + w_l < p^m: uniqueness of n, gamma from both
/// prediction paths and the solver, and the U -> U+1 shift law.
GammaCheck verify_gamma(const LowerBoundPlan& plan, const construct::DigitStream& stream);

struct ChainLevel {
    BigInt U;                           // J_l = [U, V) / p^{w_l}
    Rational V;
    Residue gamma = 0;                  // most frequent predicted sub-cell
    std::uint64_t A = 0;                // its frequency over k
    bool wide = false;                  // gamma == p-1
    std::vector<Residue> gammas;        // predicted gamma for k = 0, ..., p^m - w_l - 1
    std::vector<std::uint64_t> exceptional;
};

struct IntervalChain {
    Prime p{2};
    std::vector<std::uint64_t> w;
    std::vector<ChainLevel> levels;  // indexed by l

    Rational left(std::size_t l) const;
    Rational right(std::size_t l) const;
    Rational lower() const { return left(levels.size() - 1); }
    Rational upper() const { return right(0); }
    Rational length() const { return upper() - lower(); }
};

/// Chooses U(M) as the least integer != p-1 (mod p) for which the whole chain
/// stays on non-exceptional cells: for each l, every cell of block l from
/// U(M) p^{w_l - w_M} to U(l) (U(l)+1 when wide) is fair. Throws
/// std::runtime_error when no such U(M) exists and BudgetExceeded when the
/// blocks are too large to enumerate.
IntervalChain build_chain(const LowerBoundPlan& plan, const construct::DigitStream& stream,
                          std::uint64_t budget = std::uint64_t{1} << 26);

struct BlockSurplus {
    std::uint64_t count_all = 0;    // (n, k) in block l with x_{n,k} in J
    std::uint64_t count_upper = 0;  // ... in J_M u ... u J_l
    Rational expected_upper;        // p^m p^{w_l} lambda(J_M u ... u J_l)
    Rational claimed_upper;         // expected_upper + A(l) - (p-1)/p p^m
    bool claim_holds = false;       // count_upper >= claimed_upper
    Rational delta;                 // count_all - p^m p^{w_l} lambda(J)
};

struct SurplusReport {
    Rational delta;         // #{n < N : x_n in J} - N lambda(J)
    Rational prefix_delta;  // the same restricted to n < n_m
    std::vector<BlockSurplus> blocks;
    Rational lambda;
};

/// Exact surplus of J over the first N points.
SurplusReport count_surplus(const LowerBoundPlan& plan, const IntervalChain& chain,
                            const construct::DigitStream& stream, std::uint64_t budget = std::uint64_t{1} << 26);

struct ALBound {
    std::vector<std::uint64_t> column_counts;  // (p-1)s per column of D_m
    std::vector<std::uint64_t> a_lower;        // p^3 times the column counts
    std::uint64_t total = 0;                   // sum of a_lower
    Rational target;                           // (M+1) p^m (p^3-1)/p^3 (p^5-1)/p^5
    bool regime = false;                       // 1 - ((p+1)/2p)^{m-7} >= (p^5-1)/p^5
    bool holds = false;                        // total >= target
};

/// Requires m >= 8 (std::domain_error otherwise).
ALBound a_l_lower_bound(unsigned m, Prime p);

/// (p^3-1)/p^3 (p^5-1)/p^5 - (p-1)/p - (2p-1)/((p-1) p^{p^3}).
Rational final_constant(Prime p);

} // namespace levin::lowerbound
