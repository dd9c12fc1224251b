#include "levin/lemmas.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "levin/construct.hpp"
#include "levin/lowerbound.hpp"
#include "levin/necklace.hpp"

namespace levin::lemmas {

using construct::AffineParams;
using ffmat::PascalView;
using ffmat::Prime;

namespace {

std::vector<AffineParams> profiles_for(const SuiteOptions& opt, unsigned m, unsigned count) {
    std::vector<AffineParams> out;
    out.push_back(construct::levin_params(m, opt.p));
    std::mt19937_64 rng(opt.seed);
    for (unsigned i = 0; i < count; ++i) out.push_back(construct::random_params(m, opt.p, rng));
    return out;
}

void fail(SuiteResult& r, const std::string& what) {
    if (r.failed++ == 0) r.note = what;
}

void skip(SuiteResult& r, const std::string& why) {
    r.skipped = true;
    r.note = why;
}

std::string where(std::size_t profile, std::size_t a, std::size_t b) {
    std::ostringstream s;
    s << "profile " << profile << " at (" << a << ", " << b << ")";
    return s.str();
}

SuiteResult suite_lucas(const SuiteOptions& opt) {
    SuiteResult r;
    r.name = "lucas";
    const std::uint64_t n_max = 300;
    std::vector<Residue> row{1};
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        for (std::uint64_t k = 0; k <= n; ++k) {
            ++r.checked;
            if (ffmat::binom_mod(n, k, opt.p) != row[k]) fail(r, where(0, n, k));
        }
        std::vector<Residue> next(n + 2, 1);
        for (std::uint64_t k = 1; k <= n; ++k) next[k] = opt.p.add(row[k - 1], row[k]);
        row = std::move(next);
    }
    return r;
}

SuiteResult suite_rank(const SuiteOptions& opt) {
    SuiteResult r;
    r.name = "rank";
    const std::size_t dim = checked_pow(opt.p.value(), opt.m);
    const long double cost = static_cast<long double>(opt.profiles + 1) * dim * dim * dim * dim / 4;
    if (cost > static_cast<long double>(opt.budget) * 4) {
        skip(r, "window count exceeds budget");
        return r;
    }
    const Prime p = opt.p;

    const PascalView plain = PascalView::unshifted(p, opt.m);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto row = plain.row(i);
        for (std::size_t j = 0; j < dim; ++j) {
            if (i + j == dim - 1) {
                ++r.checked;
                if (row[j] == 0) fail(r, "anti-diagonal zero at " + where(0, i, j));
            } else if (i + j >= dim) {
                ++r.checked;
                if (row[j] != 0) fail(r, "nonzero below anti-diagonal at " + where(0, i, j));
            }
        }
    }

    const auto params = profiles_for(opt, opt.m, opt.profiles);
    for (std::size_t q = 0; q < params.size(); ++q) {
        const PascalView view = params[q].view();
        for (std::size_t t = 1; t <= dim; ++t) {
            for (std::size_t l = 0; l + t <= dim; ++l) {
                ++r.checked;
                if (!ffmat::is_regular(ffmat::window(view, l, t, 0, t), p)) fail(r, "row window " + where(q, l, t));
                ++r.checked;
                const auto e = static_cast<std::size_t>(view.eta(l));
                if (!ffmat::is_regular(ffmat::window(view, e, t, l, t), p)) {
                    fail(r, "shifted window " + where(q, l, t));
                }
            }
        }
    }
    return r;
}

SuiteResult suite_lem_c(const SuiteOptions& opt) {
    SuiteResult r;
    r.name = "lem_c";
    const std::size_t dim = checked_pow(opt.p.value(), opt.m);
    const long double cost = static_cast<long double>(opt.profiles + 1) * dim * dim * dim * dim / 2;
    if (cost > static_cast<long double>(opt.budget) * 4) {
        skip(r, "window count exceeds budget");
        return r;
    }
    const auto params = profiles_for(opt, opt.m, opt.profiles);
    for (std::size_t q = 0; q < params.size(); ++q) {
        const PascalView view = params[q].view();
        for (std::size_t t = 1; t < dim; ++t) {
            for (std::size_t k = 0; k + t < dim; ++k) {
                ++r.checked;
                if (ffmat::predict_c_row(view, k, t) != ffmat::row_c(view, k + t, t)) fail(r, "c-row " + where(q, k, t));
                ++r.checked;
                if (ffmat::predict_d_row(view, k, t) != ffmat::row_d(view, k + t, t)) fail(r, "d-row " + where(q, k, t));
            }
        }
    }
    return r;
}

// The column identity and its three consequences on the grid t, k, j <= 12,
// over the integers and through xi_t mod p.
SuiteResult suite_lem_d(const SuiteOptions& opt, bool corollary) {
    SuiteResult r;
    r.name = corollary ? "cor_b" : "lem_d";
    constexpr std::int64_t kGrid = 12;
    const Prime p = opt.p;

    std::vector<std::vector<std::int64_t>> etas{std::vector<std::int64_t>(kGrid + 1, 0)};
    std::mt19937_64 rng(opt.seed);
    std::bernoulli_distribution step(0.5);
    for (unsigned q = 0; q < opt.profiles; ++q) {
        std::vector<std::int64_t> eta(kGrid + 1, 0);
        for (std::size_t j = 1; j < eta.size(); ++j) eta[j] = eta[j - 1] + (step(rng) ? 1 : 0);
        etas.push_back(std::move(eta));
    }

    for (std::size_t q = 0; q < etas.size(); ++q) {
        for (std::int64_t t = 1; t <= kGrid; ++t) {
            const auto x = ffmat::xi(static_cast<std::size_t>(t), p);
            for (std::int64_t k = 0; k <= kGrid; ++k) {
                for (std::int64_t j = 0; j <= kGrid; ++j) {
                    const std::int64_t e = etas[q][static_cast<std::size_t>(j)];
                    const std::int64_t full = xi_column_sum(t, k, j, e, t);
                    const std::int64_t partial = xi_column_sum(t, k, j, e, t - 1);
                    const std::int64_t top = small_binom(k + j + t - e, j);
                    const std::int64_t low = small_binom(k + j - e, j - t);
                    if (!corollary) {
                        ++r.checked;
                        if (full != -low || p.reduce(full) != p.reduce(-low)) fail(r, "identity " + where(q, t, k));
                        continue;
                    }
                    ++r.checked;
                    if (j < t) {
                        if (full != 0) fail(r, "(a) " + where(q, t, k));
                        if (partial != top) fail(r, "(b) " + where(q, t, k));
                    } else if (partial != top - low) {
                        fail(r, "(c) " + where(q, t, k));
                    }
                    // the same partial sum as xi_t against the column
                    ++r.checked;
                    Residue acc = 0;
                    for (std::int64_t i = 0; i < t; ++i) {
                        const Residue c = p.reduce(small_binom(k + j + i - e, j));
                        acc = p.add(acc, p.mul(x[static_cast<std::size_t>(i)], c));
                    }
                    if (acc != p.reduce(partial)) fail(r, "xi mod p " + where(q, t, k));
                }
            }
        }
    }
    return r;
}

SuiteResult suite_1a(const SuiteOptions& opt) {
    SuiteResult r;
    r.name = "1a";
    for (std::uint64_t i = 0; i <= 60; ++i) {
        for (std::uint64_t u = 1; u <= 60; ++u) {
            ++r.checked;
            if (ffmat::hockey_stick_sum(i, u, opt.p) != ffmat::hockey_stick(i, u, opt.p)) fail(r, where(0, i, u));
        }
    }
    return r;
}

SuiteResult suite_1b(const SuiteOptions& opt) {
    SuiteResult r;
    r.name = "1b";
    const Prime p = opt.p;
    std::vector<unsigned> levels{8};
    if (p.value() <= 3) levels.push_back(9);
    for (unsigned m : levels) {
        const auto win = ffmat::dm_window(m, p);
        if (static_cast<long double>(win.rows()) * win.cols > static_cast<long double>(opt.budget)) continue;
        const auto counts = ffmat::dm_column_counts(win, p, p.value() - 1);
        std::uint64_t total = 0;
        for (auto c : counts) total += c;
        ++r.checked;
        const Rational expected = ffmat::dm_predicted_fraction(m, p) * Rational(win.rows() * win.cols);
        if (Rational(total) != expected) {
            fail(r, "D_" + std::to_string(m) + " count " + std::to_string(total) + " vs " + to_string(expected));
        }
    }
    for (unsigned rr = 0; rr <= 5; ++rr) {
        const long double size = static_cast<long double>(checked_pow(p.value(), 2 * rr));
        if (size > static_cast<long double>(opt.budget)) break;
        ++r.checked;
        const std::uint64_t tri = std::uint64_t{p.value()} * (p.value() + 1) / 2;
        if (ffmat::pascal_nonzero_count(rr, p) != checked_pow(tri, rr)) fail(r, "Pascal count r=" + std::to_string(rr));
    }
    return r;
}

SuiteResult suite_2gen(const SuiteOptions& opt) {
    SuiteResult r;
    r.name = "2gen";
    const Prime p = opt.p;
    const std::size_t dim = checked_pow(p.value(), opt.m);
    const unsigned randoms = std::min(opt.profiles, 10u);
    const long double per_stream =
        static_cast<long double>(dim) * static_cast<long double>(checked_pow(p.value(), opt.m)) *
        static_cast<long double>(big_pow(p.value(), dim).convert_to<double>());
    if (per_stream * (randoms + 1) > static_cast<long double>(opt.budget) * 4) {
        skip(r, "blocks too large to enumerate within budget");
        return r;
    }
    const std::uint64_t fair = checked_pow(p.value(), opt.m);
    for (unsigned q = 0; q <= randoms; ++q) {
        const construct::DigitStream stream(p, opt.m + 1,
                                            q == 0 ? construct::ParamsSource{}
                                                   : construct::random_source(p, opt.seed + q));
        for (std::size_t t = 1; t <= dim; ++t) {
            const std::uint64_t blocks = checked_pow(p.value(), dim - t);
            for (std::uint64_t B = 0; B < blocks; ++B) {
                const auto counts = lowerbound::cell_counts(stream, opt.m, t, BigInt(B), opt.budget);
                std::uint64_t exceptional = 0;
                std::uint64_t total = 0;
                for (auto c : counts) {
                    total += c;
                    if (c != fair) ++exceptional;
                }
                ++r.checked;
                if (exceptional > 2 * (t - 1) || total != fair * counts.size()) {
                    fail(r, "t=" + std::to_string(t) + " B=" + std::to_string(B) + " with " +
                                std::to_string(exceptional) + " exceptional cells, stream " + std::to_string(q));
                }
            }
        }
    }
    return r;
}

SuiteResult suite_prop1(const SuiteOptions& opt) {
    SuiteResult r;
    r.name = "prop1";
    const BigInt length = construct::block_length(opt.m, opt.p);
    if (length * (opt.profiles + 1) > opt.budget) {
        skip(r, "block too large for budget");
        return r;
    }
    const std::size_t dim = checked_pow(opt.p.value(), opt.m);
    for (const auto& params : profiles_for(opt, opt.m, opt.profiles)) {
        const auto w = construct::block(params, opt.budget);
        ++r.checked;
        if (auto v = necklace::check_nested(w, dim, dim, false)) fail(r, "nested perfect: " + v->reason);

        AffineParams plain = params;
        std::fill(plain.z.begin(), plain.z.end(), 0);
        std::vector<necklace::Digit> zd(params.z.begin(), params.z.end());
        ++r.checked;
        if (construct::block(plain, opt.budget) != necklace::add_periodic(w, necklace::negated(necklace::Word(opt.p, zd)))) {
            fail(r, "z-equivariance");
        }
    }
    return r;
}

using Runner = std::function<SuiteResult(const SuiteOptions&)>;

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> table{
        {"lucas", suite_lucas},
        {"rank", suite_rank},
        {"lem_c", suite_lem_c},
        {"lem_d", [](const SuiteOptions& o) { return suite_lem_d(o, false); }},
        {"cor_b", [](const SuiteOptions& o) { return suite_lem_d(o, true); }},
        {"1a", suite_1a},
        {"1b", suite_1b},
        {"2gen", suite_2gen},
        {"prop1", suite_prop1},
    };
    return table;
}

} // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"lucas", "rank", "lem_c", "lem_d", "cor_b", "1a", "1b", "2gen", "prop1"};
    return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& opt) {
    const auto it = runners().find(name);
    if (it == runners().end()) throw std::invalid_argument("unknown lemma suite: " + name);
    return it->second(opt);
}

std::vector<SuiteResult> run_all(const SuiteOptions& opt) {
    std::vector<SuiteResult> out;
    for (const auto& name : suite_names()) out.push_back(run_suite(name, opt));
    return out;
}

std::int64_t small_binom(std::int64_t n, std::int64_t r) {
    if (r < 0 || n < 0 || r > n) return 0;
    r = std::min(r, n - r);
    std::int64_t out = 1;
    for (std::int64_t i = 0; i < r; ++i) out = out * (n - i) / (i + 1);
    return out;
}

std::int64_t xi_column_sum(std::int64_t t, std::int64_t k, std::int64_t j, std::int64_t eta_j, std::int64_t hi) {
    std::int64_t acc = 0;
    for (std::int64_t i = std::max<std::int64_t>(eta_j - k, 0); i <= hi; ++i) {
        const std::int64_t term = small_binom(t, i) * small_binom(k + j + i - eta_j, j);
        acc += ((t + i + 1) % 2 == 0) ? term : -term;
    }
    return acc;
}

} // namespace levin::lemmas
