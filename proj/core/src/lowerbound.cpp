#include "levin/lowerbound.hpp"

#include <algorithm>

#include "levin/discrepancy.hpp"

namespace levin::lowerbound {

namespace {

bool is_power_of(std::uint64_t v, std::uint64_t p) {
    if (v == 0) return false;
    while (v % p == 0) v /= p;
    return v == 1;
}

bool is_levin(const construct::AffineParams& params) {
    for (std::size_t j = 0; j < params.dim(); ++j) {
        if (params.z[j] != 0 || params.eta[j] != 0 || params.u[j] != 1) return false;
    }
    return true;
}

void finish_plan(LowerBoundPlan& plan) {
    plan.B.assign(plan.w.size(), BigInt(0));
    BigInt total = 0;
    for (std::size_t l = 0; l < plan.w.size(); ++l) {
        plan.B[l] = total;
        total += big_pow(plan.p.value(), plan.w[l]);
    }
    plan.N = construct::n_offset(plan.m, plan.p) + BigInt(plan.dim) * total;
}

// Shared state for repeated predictions over one level.
class Predictor {
public:
    Predictor(const construct::AffineParams& params, const LowerBoundPlan& plan)
        : params_(params), plan_(plan), view_(params.view()) {
        if (params.m != plan.m || !(params.p == plan.p)) {
            throw std::invalid_argument("predict_gamma: parameters and plan describe different levels");
        }
        for (std::size_t l = 0; l < plan.blocks(); ++l) {
            tails_.push_back(view_.tail(plan.w[l]));
            xis_.push_back(ffmat::xi(plan.w[l], plan.p));
            vs_.push_back(block_vector(plan, l));
        }
    }

    Residue gamma(std::size_t l, std::size_t k, std::span<const Residue> U) const {
        const std::size_t w = plan_.w.at(l);
        if (U.size() != w) throw std::invalid_argument("predict_gamma: U must have w_l digits");
        if (k + w >= plan_.dim) throw std::out_of_range("predict_gamma: requires k + w_l < p^m");
        const Prime p = plan_.p;
        Residue acc = 0;
        for (std::size_t i = 0; i < w; ++i) acc = p.add(acc, p.mul(xis_[l][i], p.sub(U[i], params_.z[k + i])));
        acc = p.add(acc, ffmat::dot(tails_[l].row(k + w), vs_[l], p));
        return p.add(acc, params_.z[k + w]);
    }

    const std::vector<Residue>& v(std::size_t l) const { return vs_[l]; }

private:
    const construct::AffineParams& params_;
    const LowerBoundPlan& plan_;
    ffmat::PascalView view_;
    std::vector<ffmat::PascalView> tails_;
    std::vector<std::vector<Residue>> xis_;
    std::vector<std::vector<Residue>> vs_;
};

std::uint64_t small_pow(Prime p, std::uint64_t e, std::uint64_t budget, const char* what) {
    if (e >= 63) throw BudgetExceeded(std::string(what) + ": p^" + std::to_string(e) + " is not enumerable");
    const BigInt v = big_pow(p.value(), e);
    if (v > budget) throw BudgetExceeded(std::string(what) + ": p^" + std::to_string(e) + " exceeds the budget");
    return v.convert_to<std::uint64_t>();
}

// Scales x to an integer numerator over p^L; x's denominator must divide p^L.
std::uint64_t scaled(const Rational& x, std::uint64_t scale) {
    const Rational v = x * scale;
    if (denominator(v) != 1) throw std::logic_error("count_surplus: precision too low for exact membership");
    return numerator(v).convert_to<std::uint64_t>();
}

} // namespace

LowerBoundPlan make_plan(unsigned m, Prime p) {
    if (m < 8) throw std::domain_error("make_plan: the schedule w_l = p^{m-3} - 1 - p^3 l needs m >= 8");
    LowerBoundPlan plan;
    plan.p = p;
    plan.m = m;
    plan.dim = checked_pow(p.value(), m);
    plan.standard_schedule = true;
    const std::uint64_t top = checked_pow(p.value(), m - 3);
    const std::uint64_t step = checked_pow(p.value(), 3);
    const std::uint64_t count = checked_pow(p.value(), m - 7);
    for (std::uint64_t l = 0; l < count; ++l) plan.w.push_back(top - 1 - step * l);
    finish_plan(plan);
    return plan;
}

LowerBoundPlan make_custom_plan(Prime p, unsigned m, std::vector<std::uint64_t> w) {
    if (m == 0) throw std::invalid_argument("make_custom_plan: m must be >= 1");
    if (w.empty()) throw std::invalid_argument("make_custom_plan: schedule is empty");
    LowerBoundPlan plan;
    plan.p = p;
    plan.m = m;
    plan.dim = checked_pow(p.value(), m);
    for (std::size_t l = 0; l < w.size(); ++l) {
        if (w[l] % p.value() != p.value() - 1) {
            throw std::invalid_argument("make_custom_plan: w_" + std::to_string(l) + " = " + std::to_string(w[l]) +
                                        " is not p-1 mod p");
        }
        if (l > 0 && w[l] >= w[l - 1]) throw std::invalid_argument("make_custom_plan: w must strictly decrease");
    }
    if (w.front() >= plan.dim) throw std::invalid_argument("make_custom_plan: w_0 must be < p^m");
    plan.w = std::move(w);
    finish_plan(plan);
    return plan;
}

std::vector<std::uint64_t> cell_counts(const construct::DigitStream& stream, unsigned m, std::size_t t,
                                       const BigInt& B, std::uint64_t budget) {
    const Prime p = stream.prime();
    const std::uint64_t dim = checked_pow(p.value(), m);
    if (t == 0 || t > dim) throw std::invalid_argument("cell_counts: t must lie in [1, p^m]");
    if (B < 0 || B >= big_pow(p.value(), dim - t)) throw std::invalid_argument("cell_counts: B out of range");
    const std::uint64_t cells = small_pow(p, t, budget, "cell_counts");
    if (BigInt(cells) * dim > budget) throw BudgetExceeded("cell_counts: too many points for the budget");
    const std::uint64_t points = cells * dim;

    const BigInt start = stream.offset(m) + BigInt(dim) * B * cells;
    const auto word = stream.slice(start, static_cast<std::size_t>(points + t - 1));
    const auto digits = word.digits();

    std::vector<std::uint64_t> counts(cells, 0);
    std::uint64_t code = 0;
    for (std::size_t i = 0; i + 1 < t; ++i) code = code * p.value() + digits[i];
    for (std::uint64_t pos = 0; pos < points; ++pos) {
        code = (code * p.value()) % cells + digits[pos + t - 1];
        ++counts[code];
    }
    return counts;
}

std::vector<std::uint64_t> exceptional_cs(const construct::DigitStream& stream, unsigned m, std::size_t t,
                                          const BigInt& B, std::uint64_t budget) {
    const auto counts = cell_counts(stream, m, t, B, budget);
    const std::uint64_t fair = checked_pow(stream.prime().value(), m);
    std::vector<std::uint64_t> out;
    for (std::uint64_t c = 0; c < counts.size(); ++c) {
        if (counts[c] != fair) out.push_back(c);
    }
    return out;
}

std::vector<Residue> block_vector(const LowerBoundPlan& plan, std::size_t l) {
    const std::uint64_t wl = plan.w.at(l);
    std::vector<Residue> v(plan.dim - wl, 0);
    for (std::size_t i = 0; i < l; ++i) v.at(plan.w[i] - wl) = 1;
    return v;
}

std::vector<Residue> u_digits(const BigInt& U, std::size_t w, Prime p) {
    auto digits = ffmat::base_digits(U, p, w);
    std::reverse(digits.begin(), digits.end());
    return digits;
}

Residue predict_gamma(const construct::AffineParams& params, const LowerBoundPlan& plan, std::size_t l,
                      std::size_t k, std::span<const Residue> U_digits) {
    return Predictor(params, plan).gamma(l, k, U_digits);
}

Residue predict_gamma_levin(const LowerBoundPlan& plan, std::size_t l, std::size_t k,
                            std::span<const Residue> U_digits) {
    const std::size_t w = plan.w.at(l);
    if (U_digits.size() != w) throw std::invalid_argument("predict_gamma_levin: U must have w_l digits");
    if (k + w >= plan.dim) throw std::out_of_range("predict_gamma_levin: requires k + w_l < p^m");
    const Prime p = plan.p;
    const auto xi = ffmat::xi(w, p);
    Residue acc = 0;
    for (std::size_t i = 0; i < w; ++i) acc = p.add(acc, p.mul(xi[i], U_digits[i]));
    if (l == 0) return acc;

    const std::uint64_t s = plan.w[0] - plan.w[1];
    for (std::size_t i = 0; i < l; ++i) {
        if (plan.w[i] - plan.w[i + 1] != s) throw std::domain_error("predict_gamma_levin: schedule gaps differ");
    }
    if (!is_power_of(s, p.value())) throw std::domain_error("predict_gamma_levin: gap is not a power of p");
    const std::uint64_t q = (k + w) / s;
    return p.add(acc, p.sub(ffmat::binom_mod(q + 1 + l, l, p), 1));
}

std::vector<Residue> solve_unique_n(const construct::AffineParams& params, std::size_t k,
                                    std::span<const Residue> U_digits, std::span<const Residue> block_vec) {
    const std::size_t w = U_digits.size();
    const std::size_t dim = params.dim();
    if (w == 0 || k + w > dim) throw std::out_of_range("solve_unique_n: window exceeds the matrix");
    if (block_vec.size() != dim - w) throw std::invalid_argument("solve_unique_n: block vector must have p^m - w entries");
    const Prime p = params.p;
    const auto view = params.view();
    const auto Bv = ffmat::multiply(ffmat::submatrix_B(view, k, w), block_vec, p);
    std::vector<Residue> rhs(w);
    for (std::size_t i = 0; i < w; ++i) rhs[i] = p.sub(p.sub(U_digits[i], params.z[k + i]), Bv[i]);
    auto e = ffmat::solve(ffmat::submatrix_A(view, k, w), std::move(rhs), p);
    if (!e) throw std::logic_error("solve_unique_n: A_{k,w} is singular");
    return *e;
}

Residue gamma_from_solution(const construct::AffineParams& params, std::size_t k, std::span<const Residue> e,
                            std::span<const Residue> block_vec) {
    const std::size_t w = e.size();
    if (k + w >= params.dim()) throw std::out_of_range("gamma_from_solution: requires k + w < p^m");
    const Prime p = params.p;
    const auto view = params.view();
    const Residue c = ffmat::dot(ffmat::row_c(view, k + w, w), e, p);
    const Residue d = ffmat::dot(ffmat::row_d(view, k + w, w), block_vec, p);
    return p.add(p.add(c, d), params.z[k + w]);
}

std::vector<Hit> enumerate_hits(const construct::DigitStream& stream, const LowerBoundPlan& plan, std::size_t l,
                                std::size_t k) {
    const std::size_t w = plan.w.at(l);
    if (k + w >= plan.dim) throw std::out_of_range("enumerate_hits: requires k + w_l < p^m");
    const std::uint64_t columns = small_pow(plan.p, w, std::uint64_t{1} << 26, "enumerate_hits");
    if (BigInt(columns) * plan.dim > (std::uint64_t{1} << 26)) throw BudgetExceeded("enumerate_hits: block too large");

    const BigInt start = stream.offset(plan.m) + BigInt(plan.dim) * plan.B[l];
    const auto word = stream.slice(start, static_cast<std::size_t>(columns * plan.dim));
    std::vector<Hit> hits;
    hits.reserve(columns);
    for (std::uint64_t j = 0; j < columns; ++j) {
        const std::size_t base = static_cast<std::size_t>(j * plan.dim + k);
        Hit h;
        for (std::size_t i = 0; i < w; ++i) h.U = h.U * plan.p.value() + word[base + i];
        h.gamma = word[base + w];
        h.n = plan.B[l] + j;
        hits.push_back(std::move(h));
    }
    return hits;
}

GammaCheck verify_gamma(const LowerBoundPlan& plan, const construct::DigitStream& stream) {
    const auto& params = stream.level(plan.m).params();
    const Predictor predictor(params, plan);
    const bool levin = is_levin(params);
    const Prime p = plan.p;
    GammaCheck out;

    for (std::size_t l = 0; l < plan.blocks(); ++l) {
        const std::size_t w = plan.w[l];
        const std::uint64_t cells = small_pow(p, w, std::uint64_t{1} << 26, "verify_gamma");
        bool closed_form = levin;
        if (closed_form) {
            try {
                std::vector<Residue> zero(w, 0);
                predict_gamma_levin(plan, l, 0, zero);
            } catch (const std::domain_error&) {
                closed_form = false;
            }
        }
        for (std::size_t k = 0; k + w < plan.dim; ++k) {
            const auto hits = enumerate_hits(stream, plan, l, k);
            std::vector<std::uint32_t> seen(cells, 0);
            std::vector<const Hit*> by_cell(cells, nullptr);
            for (const auto& h : hits) {
                ++seen[h.U];
                by_cell[h.U] = &h;
            }
            for (std::uint64_t U = 0; U < cells; ++U) {
                ++out.pairs;
                if (seen[U] != 1) {
                    ++out.not_unique;
                    continue;
                }
                const Hit& h = *by_cell[U];
                const auto digits = u_digits(U, w, p);
                if (predictor.gamma(l, k, digits) != h.gamma) ++out.matrix_mismatch;

                const auto e = solve_unique_n(params, k, digits, predictor.v(l));
                if (plan.B[l] + ffmat::from_digits(e, p) != h.n ||
                    gamma_from_solution(params, k, e, predictor.v(l)) != h.gamma) {
                    ++out.solve_mismatch;
                }
                if (closed_form) {
                    ++out.closed_form_checked;
                    if (predict_gamma_levin(plan, l, k, digits) != h.gamma) ++out.closed_form_mismatch;
                }
                if (U % p.value() != p.value() - 1 && seen[U + 1] == 1) {
                    ++out.shift_checked;
                    if (by_cell[U + 1]->gamma != p.add(h.gamma, p.value() - 1)) ++out.shift_mismatch;
                }
            }
        }
    }
    return out;
}

Rational IntervalChain::left(std::size_t l) const {
    return Rational(levels.at(l).U) / big_pow(p.value(), w.at(l));
}

Rational IntervalChain::right(std::size_t l) const {
    return levels.at(l).V / big_pow(p.value(), w.at(l));
}

IntervalChain build_chain(const LowerBoundPlan& plan, const construct::DigitStream& stream, std::uint64_t budget) {
    const auto& params = stream.level(plan.m).params();
    const Predictor predictor(params, plan);
    const Prime p = plan.p;
    const std::size_t M = plan.M();

    std::vector<std::vector<std::uint64_t>> exceptional(plan.blocks());
    for (std::size_t l = 0; l < plan.blocks(); ++l) {
        const BigInt cell_block = plan.B[l] / big_pow(p.value(), plan.w[l]);
        exceptional[l] = exceptional_cs(stream, plan.m, plan.w[l], cell_block, budget);
    }
    auto fair = [&](std::size_t l, const BigInt& cell) {
        return !std::binary_search(exceptional[l].begin(), exceptional[l].end(), cell.convert_to<std::uint64_t>());
    };

    const std::uint64_t candidates = small_pow(p, plan.w[M], budget, "build_chain");
    const Rational narrow(BigInt(p.value() - 1), BigInt(p.value()));
    const Rational wide_width(BigInt(2 * p.value() - 1), BigInt(p.value()));

    for (std::uint64_t UM = 0; UM < candidates; ++UM) {
        if (UM % p.value() == p.value() - 1) continue;
        IntervalChain chain;
        chain.p = p;
        chain.w = plan.w;
        chain.levels.resize(plan.blocks());
        bool ok = true;
        BigInt U = UM;
        for (std::size_t l = M + 1; l-- > 0 && ok;) {
            if (l < M) {
                const Rational next = chain.levels[l + 1].V * big_pow(p.value(), plan.w[l] - plan.w[l + 1]);
                if (denominator(next) != 1) throw std::logic_error("build_chain: chain endpoint is not on the grid");
                U = numerator(next);
            }
            const BigInt cells = big_pow(p.value(), plan.w[l]);
            if (U % p.value() == p.value() - 1 || U >= cells) {
                ok = false;
                break;
            }
            ChainLevel& level = chain.levels[l];
            level.U = U;
            level.exceptional = exceptional[l];
            const auto digits = u_digits(U, plan.w[l], p);
            std::vector<std::uint64_t> freq(p.value(), 0);
            for (std::size_t k = 0; k + plan.w[l] < plan.dim; ++k) {
                level.gammas.push_back(predictor.gamma(l, k, digits));
                ++freq[level.gammas.back()];
            }
            level.gamma = static_cast<Residue>(std::max_element(freq.begin(), freq.end()) - freq.begin());
            level.A = freq[level.gamma];
            level.wide = level.gamma == p.value() - 1;
            level.V = Rational(U) + (level.wide ? wide_width : narrow);
            if (level.wide && U + 1 >= cells) {
                ok = false;
                break;
            }
            const BigInt first = BigInt(UM) * big_pow(p.value(), plan.w[l] - plan.w[M]);
            const BigInt last = U + (level.wide ? 1 : 0);
            for (BigInt c = first; c <= last && ok; ++c) ok = fair(l, c);
        }
        if (ok) return chain;
    }
    throw std::runtime_error("build_chain: no U(M) keeps the chain clear of exceptional cells");
}

SurplusReport count_surplus(const LowerBoundPlan& plan, const IntervalChain& chain,
                            const construct::DigitStream& stream, std::uint64_t budget) {
    if (chain.levels.size() != plan.blocks()) throw std::invalid_argument("count_surplus: chain does not match plan");
    if (plan.N > budget) throw BudgetExceeded("count_surplus: N = " + plan.N.str() + " exceeds the budget");
    const Prime p = plan.p;
    const std::uint64_t N = plan.N.convert_to<std::uint64_t>();
    const std::uint64_t nm = construct::n_offset(plan.m, p).convert_to<std::uint64_t>();

    const unsigned needed = static_cast<unsigned>(plan.w.front() + 1);
    if (needed > discrepancy::max_precision(p)) throw BudgetExceeded("count_surplus: w_0 too large for exact points");
    const unsigned L = std::max(needed, std::min(discrepancy::default_precision(N, p), discrepancy::max_precision(p)));
    const auto ps = discrepancy::extract_points(stream, 0, N, L);

    const std::uint64_t lo = scaled(chain.lower(), ps.scale);
    const std::uint64_t hi = scaled(chain.upper(), ps.scale);
    auto in_J = [&](std::uint64_t idx) { return ps.numerators[idx] >= lo && ps.numerators[idx] < hi; };

    SurplusReport out;
    out.lambda = chain.length();
    std::uint64_t total = 0;
    std::uint64_t prefix = 0;
    for (std::uint64_t n = 0; n < N; ++n) {
        if (in_J(n)) {
            ++total;
            if (n < nm) ++prefix;
        }
    }
    out.delta = Rational(total) - Rational(N) * out.lambda;
    out.prefix_delta = Rational(prefix) - Rational(nm) * out.lambda;

    const Rational fair_share(BigInt(p.value() - 1), BigInt(p.value()));
    for (std::size_t l = 0; l < plan.blocks(); ++l) {
        BlockSurplus bs;
        const std::uint64_t hi_l = scaled(chain.right(l), ps.scale);
        const std::uint64_t columns = checked_pow(p.value(), plan.w[l]);
        const std::uint64_t first = nm + plan.dim * plan.B[l].convert_to<std::uint64_t>();
        for (std::uint64_t idx = first; idx < first + columns * plan.dim; ++idx) {
            const std::uint64_t x = ps.numerators[idx];
            if (x >= lo && x < hi) ++bs.count_all;
            if (x >= lo && x < hi_l) ++bs.count_upper;
        }
        const Rational points(BigInt(plan.dim) * columns);
        bs.expected_upper = points * (chain.right(l) - chain.lower());
        bs.claimed_upper = bs.expected_upper + Rational(chain.levels[l].A) - fair_share * plan.dim;
        bs.claim_holds = Rational(bs.count_upper) >= bs.claimed_upper;
        bs.delta = Rational(bs.count_all) - points * out.lambda;
        out.blocks.push_back(std::move(bs));
    }
    return out;
}

ALBound a_l_lower_bound(unsigned m, Prime p) {
    const auto window = ffmat::dm_window(m, p);
    if (window.rows() * window.cols > (std::uint64_t{1} << 26)) {
        throw BudgetExceeded("a_l_lower_bound: D_m too large to enumerate");
    }
    ALBound out;
    const std::uint64_t p3 = checked_pow(p.value(), 3);
    out.column_counts = ffmat::dm_column_counts(window, p, p.value() - 1);
    for (std::uint64_t c : out.column_counts) {
        out.a_lower.push_back(p3 * c);
        out.total += p3 * c;
    }
    const Rational f3(big_pow(p.value(), 3) - 1, big_pow(p.value(), 3));
    const Rational f5(big_pow(p.value(), 5) - 1, big_pow(p.value(), 5));
    out.target = Rational(big_pow(p.value(), m - 7) * big_pow(p.value(), m)) * f3 * f5;
    out.regime = ffmat::dm_predicted_fraction(m, p) >= f5;
    out.holds = Rational(out.total) >= out.target;
    return out;
}

Rational final_constant(Prime p) {
    const std::uint64_t pv = p.value();
    const Rational f3(big_pow(pv, 3) - 1, big_pow(pv, 3));
    const Rational f5(big_pow(pv, 5) - 1, big_pow(pv, 5));
    const Rational tail(BigInt(2 * pv - 1), BigInt(pv - 1) * big_pow(pv, pv * pv * pv));
    return f3 * f5 - Rational(BigInt(pv - 1), BigInt(pv)) - tail;
}

} // namespace levin::lowerbound
