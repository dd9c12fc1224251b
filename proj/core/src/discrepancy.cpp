#include "levin/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace levin::discrepancy {

namespace {

__extension__ typedef __int128 i128;
__extension__ typedef unsigned __int128 u128;

BigInt to_big(i128 v) {
    const bool neg = v < 0;
    const u128 u = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
    BigInt out = static_cast<std::uint64_t>(u >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(u);
    return neg ? BigInt(-out) : out;
}

} // namespace

unsigned max_precision(Prime p) noexcept {
    const std::uint64_t limit = std::uint64_t{1} << 63;
    unsigned L = 0;
    std::uint64_t v = 1;
    while (v <= (limit - 1) / p.value()) {
        v *= p.value();
        ++L;
    }
    return L;
}

unsigned default_precision(std::uint64_t N, Prime p) noexcept {
    unsigned digits = 0;
    std::uint64_t v = 1;
    while (v < N) {
        if (v > std::numeric_limits<std::uint64_t>::max() / p.value()) {
            ++digits;
            break;
        }
        v *= p.value();
        ++digits;
    }
    return std::min(digits + 16, max_precision(p));
}

PointSet points_from_digits(std::span<const necklace::Digit> digits, Prime p, std::uint64_t N, unsigned L) {
    if (L == 0 || L > max_precision(p)) {
        throw std::invalid_argument("extract_points: precision L must lie in [1, " + std::to_string(max_precision(p)) +
                                    "]");
    }
    PointSet ps;
    ps.p = p;
    ps.L = L;
    ps.scale = checked_pow(p.value(), L);
    if (N == 0) return ps;
    if (digits.size() < N + L - 1) throw std::invalid_argument("extract_points: not enough digits");

    ps.numerators.resize(N);
    std::uint64_t x = 0;
    for (unsigned i = 0; i < L; ++i) x = x * p.value() + digits[i];
    ps.numerators[0] = x;
    for (std::uint64_t n = 1; n < N; ++n) {
        x = (x % (ps.scale / p.value())) * p.value() + digits[n + L - 1];
        ps.numerators[n] = x;
    }
    return ps;
}

PointSet extract_points(const construct::DigitStream& stream, const BigInt& n_start, std::uint64_t N, unsigned L) {
    if (L == 0 || L > max_precision(stream.prime())) {
        throw std::invalid_argument("extract_points: precision L must lie in [1, " +
                                    std::to_string(max_precision(stream.prime())) + "]");
    }
    if (N == 0) return points_from_digits({}, stream.prime(), 0, L);
    const auto word = stream.slice(n_start, static_cast<std::size_t>(N + L - 1));
    return points_from_digits(word.digits(), stream.prime(), N, L);
}

StarDiscrepancy star_discrepancy_sorted(std::span<const std::uint64_t> sorted, std::uint64_t scale) {
    if (sorted.empty()) throw std::invalid_argument("star_discrepancy: empty point set");
    const i128 N = static_cast<i128>(sorted.size());
    const i128 S = scale;
    i128 best = -1;
    std::uint64_t best_x = 0;
    bool best_closed = false;
    for (std::size_t idx = 0; idx < sorted.size(); ++idx) {
        const i128 i = static_cast<i128>(idx) + 1;
        const i128 x = sorted[idx];
        const i128 excess = i * S - x * N;         // [0, x] holds i points
        const i128 deficit = x * N - (i - 1) * S;  // [0, x) holds at most i-1 points
        if (excess > best) {
            best = excess;
            best_x = sorted[idx];
            best_closed = true;
        }
        if (deficit > best) {
            best = deficit;
            best_x = sorted[idx];
            best_closed = false;
        }
    }
    StarDiscrepancy out;
    out.value = Rational(to_big(best), to_big(N * S));
    out.witness = Witness{Rational(best_x, scale), best_closed};
    return out;
}

StarDiscrepancy star_discrepancy(const PointSet& ps) {
    std::vector<std::uint64_t> sorted = ps.numerators;
    std::sort(sorted.begin(), sorted.end());
    return star_discrepancy_sorted(sorted, ps.scale);
}

Rational local_discrepancy(const PointSet& ps, const Rational& a, const Rational& c) {
    if (a < 0 || !(a < c) || c > 1) throw std::invalid_argument("local_discrepancy: need 0 <= a < c <= 1");
    std::uint64_t count = 0;
    for (std::uint64_t x : ps.numerators) {
        const Rational v(x, ps.scale);
        if (v >= a && v < c) ++count;
    }
    return Rational(count) - Rational(ps.size()) * (c - a);
}

Sequence power_sequence(std::uint32_t b) {
    return [b](unsigned j) { return big_pow(b, j); };
}

Thm1Bound thm1_bound(const BigInt& N, const Sequence& f, const Sequence& g, std::uint32_t b) {
    if (N <= 0) throw std::invalid_argument("thm1_bound: N must be positive");
    if (b < 2) throw std::invalid_argument("thm1_bound: base must be >= 2");

    BigInt reached = 0;
    BigInt sum_f = 0;  // sum_{j<m} f(j)
    BigInt sum_g = 0;  // sum_{j<m} g(j)
    unsigned m = 1;
    for (;; ++m) {
        const BigInt fm = f(m);
        const BigInt gm = g(m);
        if (fm <= 0 || gm <= 0) throw std::invalid_argument("thm1_bound: f and g must be positive");
        if (fm > 4096) throw std::overflow_error("thm1_bound: f(m) too large to evaluate b^f(m)");
        const BigInt next = reached + gm * big_pow(b, fm.convert_to<unsigned>());
        if (N < next) {
            const BigInt bm1 = b - 1;
            Thm1Bound out;
            out.m = m;
            out.bound = Rational(sum_f + sum_g + gm) + Rational(bm1 * fm * fm, 2) + Rational(bm1 * fm * gm);
            out.proof_bound = Rational(sum_f + sum_g + gm) + Rational(bm1 * fm * (fm - 1), 2) +
                              Rational(bm1 * fm * gm) - Rational(bm1 * fm) - Rational(m);
            return out;
        }
        reached = next;
        sum_f += fm;
        sum_g += gm;
    }
}

BigInt cor1_bound(unsigned m, const Sequence& f, const Sequence& g) {
    if (m < 2) throw std::invalid_argument("cor1_bound: m must be >= 2");
    BigInt total = 0;
    for (unsigned j = 1; j < m; ++j) total += f(j) + g(j);
    return total;
}

std::vector<DiscrepancyReport> scan(const construct::DigitStream& stream, std::vector<std::uint64_t> Ns,
                                    std::optional<unsigned> L) {
    std::sort(Ns.begin(), Ns.end());
    Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
    std::vector<DiscrepancyReport> out;
    if (Ns.empty()) return out;
    if (Ns.front() == 0) throw std::invalid_argument("scan: N must be positive");

    const Prime p = stream.prime();
    const std::uint64_t n_max = Ns.back();
    const unsigned precision = L.value_or(default_precision(n_max, p));
    const PointSet ps = extract_points(stream, 0, n_max, precision);

    std::vector<std::uint32_t> order(n_max);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return ps.numerators[a] != ps.numerators[b] ? ps.numerators[a] < ps.numerators[b] : a < b;
    });

    std::vector<BigInt> checkpoints;  // n_m, m >= 2, up to n_max
    for (unsigned m = 2;; ++m) {
        const BigInt nm = construct::n_offset(m, p);
        if (nm > n_max) break;
        checkpoints.push_back(nm);
    }

    const auto f = power_sequence(p.value());
    const Rational envelope(1, ps.scale);
    std::vector<std::uint64_t> sorted;
    sorted.reserve(n_max);
    double running = 0;
    out.reserve(Ns.size());
    for (std::uint64_t N : Ns) {
        sorted.clear();
        for (std::uint32_t idx : order) {
            if (idx < N) sorted.push_back(ps.numerators[idx]);
        }
        const auto sd = star_discrepancy_sorted(sorted, ps.scale);
        const auto bound = thm1_bound(N, f, f, p.value());

        DiscrepancyReport r;
        r.N = N;
        r.d_star = sd.value;
        r.d_upper = sd.value + envelope;
        r.witness = sd.witness;
        r.nd_star = sd.value * N;
        r.level = bound.m;
        r.thm1 = bound.bound;
        r.thm1_proof = bound.proof_bound;
        for (std::size_t i = 0; i < checkpoints.size(); ++i) {
            if (checkpoints[i] == N) r.cor1 = cor1_bound(static_cast<unsigned>(i + 2), f, f);
        }
        r.ratio = to_double(r.nd_star) / to_double(r.thm1);
        if (N > 1) {
            const double lg = std::log(static_cast<double>(N));
            r.trend = to_double(r.nd_star) / (lg * lg);
        }
        running = std::max(running, r.trend);
        r.trend_max = running;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::uint64_t> log_spaced(std::uint64_t n_max, std::size_t count) {
    if (n_max == 0 || count == 0) return {};
    count = static_cast<std::size_t>(std::min<std::uint64_t>(count, n_max));
    std::vector<std::uint64_t> out;
    out.reserve(count);
    if (count == 1) return {n_max};
    const double top = std::log(static_cast<double>(n_max));
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < count; ++i) {
        auto v = static_cast<std::uint64_t>(std::llround(std::exp(top * static_cast<double>(i) / (count - 1))));
        v = std::max(v, prev + 1);
        v = std::min<std::uint64_t>(v, n_max - (count - 1 - i));
        out.push_back(v);
        prev = v;
    }
    return out;
}

std::string csv_header() {
    return "N,Dstar_num,Dstar_den,NDstar,thm1_bound,cor1_bound,ratio,witness_a,D_upper,thm1_proof_bound,level,"
           "witness_closed,trend_c,trend_max,D_two_sided_upper";
}

std::string csv_row(const DiscrepancyReport& r) {
    std::ostringstream row;
    row.precision(10);
    row << r.N << ',' << numerator(r.d_star) << ',' << denominator(r.d_star) << ',' << to_string(r.nd_star) << ','
        << to_string(r.thm1) << ',' << (r.cor1 ? r.cor1->str() : std::string()) << ',' << r.ratio << ','
        << to_string(r.witness.a) << ',' << to_string(r.d_upper) << ',' << to_string(r.thm1_proof) << ','
        << r.level << ',' << (r.witness.right_limit ? 1 : 0) << ',' << r.trend << ',' << r.trend_max << ','
        << to_string(r.d_upper * 2);
    return row.str();
}

} // namespace levin::discrepancy
