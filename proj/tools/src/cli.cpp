#include "levin/cli.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "levin/common.hpp"
#include "levin/construct.hpp"
#include "levin/discrepancy.hpp"
#include "levin/ffmat.hpp"
#include "levin/lemmas.hpp"
#include "levin/lowerbound.hpp"
#include "levin/necklace.hpp"

namespace levin::cli {

using json = nlohmann::ordered_json;
using ffmat::Prime;

namespace {

Format resolve(Format f, Format fallback) { return f == Format::automatic ? fallback : f; }

construct::DigitStream make_stream(const RunConfig& cfg, unsigned levels) {
    const Prime p(cfg.p);
    return construct::DigitStream(p, levels,
                                  cfg.random_stream ? construct::random_source(p, cfg.seed) : construct::ParamsSource{});
}

BigInt resolve_start(const RunConfig& cfg) {
    const std::string& s = cfg.start;
    if (!s.empty() && s.front() == 'n') {
        const auto m = parse_list(s.substr(1));
        if (m.size() != 1 || m[0] == 0) throw std::invalid_argument("--start n<m> needs a level m >= 1");
        return construct::n_offset(static_cast<unsigned>(m[0]), Prime(cfg.p));
    }
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw std::invalid_argument("--start must be a decimal position or n<m>");
    }
    return BigInt(s);
}

std::string join(const std::vector<std::size_t>& v, const char* sep) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? sep : "") << v[i];
    return s.str();
}

json violation_json(const necklace::Violation& v, std::size_t l) {
    std::vector<std::size_t> residues;
    for (auto pos : v.positions) residues.push_back(l ? pos % l : pos);
    std::string block;
    for (auto d : v.block) block += static_cast<char>(d < 10 ? '0' + d : 'a' + d - 10);
    return {{"level", v.level},       {"segment_start", v.segment_start}, {"block", block},
            {"positions", v.positions}, {"residues", residues},          {"reason", v.reason}};
}

json rationals(const std::vector<Rational>& v) {
    json out = json::array();
    for (const auto& q : v) out.push_back(to_string(q));
    return out;
}

} // namespace

std::vector<std::uint64_t> parse_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, end - pos);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw std::invalid_argument("not a non-negative integer list: '" + text + "'");
        }
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

void RunConfig::validate() const {
    static const std::vector<std::string> commands{"digits", "verify", "scan", "lemmas", "lowerbound", "search"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
        throw std::invalid_argument("unknown command '" + command + "'");
    }
    if (!ffmat::is_prime(p) || p > Prime::kMax) throw std::invalid_argument("--p must be a prime");
    if (budget == 0) throw std::invalid_argument("--budget must be positive");
    if (levels == 0) throw std::invalid_argument("--levels must be >= 1");
    if (m == 0) throw std::invalid_argument("--m must be >= 1");
    if (command == "scan") {
        if (n_max == 0) throw std::invalid_argument("scan needs --Nmax >= 1");
        if (stride == 0) throw std::invalid_argument("--stride must be >= 1");
    }
    if (command == "verify" && !word.empty() && (k == 0 || l == 0)) {
        throw std::invalid_argument("verify --word needs --k and --l");
    }
    if (command == "search" && (k == 0 || l == 0)) throw std::invalid_argument("search needs --k and --l");
    if (format == Format::csv && command != "scan") throw std::invalid_argument("--format csv applies to scan only");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        if (cfg.command == "digits") return cmd_digits(cfg, out);
        if (cfg.command == "verify") return cmd_verify(cfg, out);
        if (cfg.command == "scan") return cmd_scan(cfg, out);
        if (cfg.command == "lemmas") return cmd_lemmas(cfg, out);
        if (cfg.command == "lowerbound") return cmd_lowerbound(cfg, out);
        return cmd_search(cfg, out);
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return static_cast<int>(ExitCode::budget);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::fail);
    }
}

int cmd_digits(const RunConfig& cfg, std::ostream& out) {
    if (cfg.len > cfg.budget) {
        throw BudgetExceeded("--len " + std::to_string(cfg.len) + " exceeds budget " + std::to_string(cfg.budget));
    }
    const auto stream = make_stream(cfg, cfg.levels);
    const BigInt start = resolve_start(cfg);
    const auto word = stream.slice(start, static_cast<std::size_t>(cfg.len));
    out << "p=" << cfg.p << " start=" << start << " len=" << cfg.len << '\n' << necklace::format_word(word);
    if (necklace::format_word(word).back() != '\n') out << '\n';
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const Format fmt = resolve(cfg.format, Format::text);
    necklace::Word w;
    std::size_t k = cfg.k;
    std::size_t l = cfg.l;
    bool nested = cfg.nested;
    std::string subject;
    if (!cfg.word.empty()) {
        w = necklace::Word::from_string(cfg.base ? cfg.base : cfg.p, cfg.word);
        subject = "word " + cfg.word;
    } else {
        const Prime p(cfg.p);
        std::mt19937_64 rng(cfg.seed);
        auto params = cfg.random_stream ? construct::random_params(cfg.m, p, rng) : construct::levin_params(cfg.m, p);
        w = construct::block(params, cfg.budget);
        k = l = params.dim();
        nested = true;
        subject = "A_" + std::to_string(cfg.m) + (cfg.random_stream ? " (random profile)" : " (Levin)");
    }
    const auto violation = nested ? necklace::check_nested(w, k, l, cfg.semi) : necklace::check_perfect(w, k, l, cfg.semi);
    const std::string cls = "(" + std::to_string(k) + "," + std::to_string(l) + ")-" +
                            (nested ? std::string("nested ") : std::string()) + (cfg.semi ? "semi-perfect" : "perfect");
    if (fmt == Format::json) {
        json j{{"subject", subject}, {"class", cls}, {"length", w.size()}, {"pass", !violation}};
        if (cfg.random_stream && cfg.word.empty()) j["seed"] = cfg.seed;
        if (violation) j["counterexample"] = violation_json(*violation, l);
        out << j.dump(2) << '\n';
    } else if (!violation) {
        out << "PASS " << subject << " is " << cls << '\n';
    } else {
        std::vector<std::size_t> residues;
        for (auto pos : violation->positions) residues.push_back(pos % l);
        std::string block;
        for (auto d : violation->block) block += static_cast<char>(d < 10 ? '0' + d : 'a' + d - 10);
        out << "FAIL " << subject << " is not " << cls << '\n'
            << "  level=" << violation->level << " segment_start=" << violation->segment_start << '\n'
            << "  block=" << block << " positions=" << join(violation->positions, ",")
            << " residues_mod_l=" << join(residues, ",") << '\n'
            << "  reason: " << violation->reason << '\n';
    }
    return violation ? 1 : 0;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out) {
    const Format fmt = resolve(cfg.format, Format::csv);
    const Prime p(cfg.p);
    const unsigned L = cfg.precision ? cfg.precision : discrepancy::default_precision(cfg.n_max, p);
    if (cfg.n_max + L > cfg.budget) {
        throw BudgetExceeded("scan needs " + std::to_string(cfg.n_max + L) + " digits, budget is " +
                             std::to_string(cfg.budget));
    }
    std::vector<std::uint64_t> Ns;
    for (std::uint64_t N = cfg.stride; N <= cfg.n_max; N += cfg.stride) Ns.push_back(N);
    Ns.push_back(cfg.n_max);
    for (auto N : discrepancy::log_spaced(cfg.n_max, cfg.log_points)) Ns.push_back(N);

    const auto stream = make_stream(cfg, cfg.levels);
    const auto rows = discrepancy::scan(stream, Ns, L);
    std::uint64_t violations = 0;
    for (const auto& r : rows) {
        if (r.d_upper * r.N > r.thm1) ++violations;
        if (r.cor1 && r.nd_star > Rational(*r.cor1)) ++violations;
    }

    if (fmt == Format::json) {
        json j{{"p", cfg.p}, {"stream", cfg.random_stream ? "random" : "levin"}, {"L", L}, {"violations", violations}};
        if (cfg.random_stream) j["seed"] = cfg.seed;
        json arr = json::array();
        for (const auto& r : rows) {
            json row{{"N", r.N},
                     {"Dstar", to_string(r.d_star)},
                     {"NDstar", to_string(r.nd_star)},
                     {"thm1_bound", to_string(r.thm1)},
                     {"thm1_proof_bound", to_string(r.thm1_proof)},
                     {"ratio", r.ratio},
                     {"witness_a", to_string(r.witness.a)},
                     {"witness_closed", r.witness.right_limit},
                     {"D_upper", to_string(r.d_upper)},
                     {"level", r.level},
                     {"trend_c", r.trend},
                     {"trend_max", r.trend_max}};
            if (r.cor1) row["cor1_bound"] = r.cor1->str();
            arr.push_back(std::move(row));
        }
        j["rows"] = std::move(arr);
        out << j.dump(2) << '\n';
    } else {
        if (cfg.random_stream) out << "# p=" << cfg.p << " stream=random seed=" << cfg.seed << '\n';
        out << discrepancy::csv_header() << '\n';
        for (const auto& r : rows) out << discrepancy::csv_row(r) << '\n';
    }
    return violations ? 1 : 0;
}

int cmd_lemmas(const RunConfig& cfg, std::ostream& out) {
    const Format fmt = resolve(cfg.format, Format::text);
    lemmas::SuiteOptions opt;
    opt.p = Prime(cfg.p);
    opt.m = cfg.m;
    opt.profiles = cfg.profiles;
    opt.seed = cfg.seed;
    opt.budget = cfg.budget;
    const auto& names = cfg.suites.empty() ? lemmas::suite_names() : cfg.suites;

    std::vector<lemmas::SuiteResult> results;
    for (const auto& name : names) results.push_back(lemmas::run_suite(name, opt));
    const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.ok(); });

    if (fmt == Format::json) {
        json arr = json::array();
        for (const auto& r : results) {
            arr.push_back({{"name", r.name},
                           {"checked", r.checked},
                           {"failed", r.failed},
                           {"skipped", r.skipped},
                           {"note", r.note}});
        }
        out << json{{"p", cfg.p}, {"m", cfg.m}, {"seed", cfg.seed}, {"profiles", cfg.profiles}, {"pass", ok},
                    {"suites", arr}}
                   .dump(2)
            << '\n';
    } else {
        out << "p=" << cfg.p << " m=" << cfg.m << " seed=" << cfg.seed << " profiles=" << cfg.profiles << '\n';
        for (const auto& r : results) {
            out << (r.skipped ? "SKIP " : r.ok() ? "PASS " : "FAIL ") << r.name << " checked=" << r.checked
                << " failed=" << r.failed;
            if (!r.note.empty()) out << " (" << r.note << ")";
            out << '\n';
        }
    }
    return ok ? 0 : 1;
}

int cmd_lowerbound(const RunConfig& cfg, std::ostream& out) {
    const Prime p(cfg.p);
    const auto plan = cfg.custom_w.empty() ? lowerbound::make_plan(cfg.m, p)
                                           : lowerbound::make_custom_plan(p, cfg.m, cfg.custom_w);
    json j{{"p", cfg.p}, {"m", cfg.m}, {"w", plan.w}, {"N", plan.N.str()}, {"standard_schedule", plan.standard_schedule}};
    json B = json::array();
    for (const auto& b : plan.B) B.push_back(b.str());
    j["B"] = std::move(B);
    j["final_constant"] = to_string(lowerbound::final_constant(p));

    if (plan.standard_schedule) {
        try {
            const auto al = lowerbound::a_l_lower_bound(cfg.m, p);
            j["a_l"] = {{"total", al.total}, {"target", to_string(al.target)}, {"regime", al.regime},
                        {"holds", al.holds}};
        } catch (const std::exception& e) {
            j["a_l"] = nullptr;
        }
    }

    if (cfg.analyze_only) {
        j["U"] = json::array();
        j["V"] = json::array();
        j["gamma_table"] = json::array();
        j["delta_num"] = nullptr;
        j["delta_den"] = nullptr;
        out << j.dump(2) << '\n';
        return 0;
    }
    if (plan.N > cfg.budget) {
        throw BudgetExceeded("plan needs the first " + plan.N.str() + " digits; rerun with --analyze-only");
    }

    const construct::DigitStream stream(p, cfg.m + 1,
                                        cfg.random_stream ? construct::random_source(p, cfg.seed) : construct::ParamsSource{});
    if (cfg.random_stream) j["seed"] = cfg.seed;
    int code = 0;
    if (cfg.verify_gamma) {
        const auto g = lowerbound::verify_gamma(plan, stream);
        j["gamma_check"] = {{"pairs", g.pairs},
                            {"not_unique", g.not_unique},
                            {"matrix_mismatch", g.matrix_mismatch},
                            {"solve_mismatch", g.solve_mismatch},
                            {"closed_form_checked", g.closed_form_checked},
                            {"closed_form_mismatch", g.closed_form_mismatch},
                            {"shift_checked", g.shift_checked},
                            {"shift_mismatch", g.shift_mismatch},
                            {"ok", g.ok()}};
        if (!g.ok()) code = 1;
    }

    lowerbound::IntervalChain chain;
    try {
        chain = lowerbound::build_chain(plan, stream, cfg.budget);
    } catch (const BudgetExceeded&) {
        throw;
    } catch (const std::runtime_error& e) {
        j["U"] = json::array();
        j["V"] = json::array();
        j["gamma_table"] = json::array();
        j["delta_num"] = nullptr;
        j["delta_den"] = nullptr;
        j["chain_error"] = e.what();
        out << j.dump(2) << '\n';
        return 1;
    }
    const auto surplus = lowerbound::count_surplus(plan, chain, stream, cfg.budget);

    json U = json::array();
    std::vector<Rational> V;
    json table = json::array();
    for (std::size_t l = 0; l < chain.levels.size(); ++l) {
        const auto& lv = chain.levels[l];
        U.push_back(lv.U.str());
        V.push_back(lv.V);
        table.push_back({{"l", l},
                         {"gamma", lv.gamma},
                         {"A", lv.A},
                         {"wide", lv.wide},
                         {"gammas", lv.gammas},
                         {"exceptional", lv.exceptional}});
    }
    j["U"] = std::move(U);
    j["V"] = rationals(V);
    j["gamma_table"] = std::move(table);
    j["J"] = {to_string(chain.lower()), to_string(chain.upper())};
    j["lambda"] = to_string(surplus.lambda);
    j["delta_num"] = numerator(surplus.delta).str();
    j["delta_den"] = denominator(surplus.delta).str();
    j["prefix_delta"] = to_string(surplus.prefix_delta);
    json blocks = json::array();
    bool claims = true;
    for (const auto& b : surplus.blocks) {
        claims = claims && b.claim_holds;
        blocks.push_back({{"count_all", b.count_all},
                          {"count_upper", b.count_upper},
                          {"expected_upper", to_string(b.expected_upper)},
                          {"claimed_upper", to_string(b.claimed_upper)},
                          {"claim_holds", b.claim_holds},
                          {"delta", to_string(b.delta)}});
    }
    j["blocks"] = std::move(blocks);
    j["claims_hold"] = claims;
    out << j.dump(2) << '\n';
    return code;
}

int cmd_search(const RunConfig& cfg, std::ostream& out) {
    const Format fmt = resolve(cfg.format, Format::text);
    necklace::SearchQuery q;
    q.k = cfg.k;
    q.l = cfg.l;
    q.base = cfg.base ? cfg.base : cfg.p;
    q.nested = cfg.nested;
    q.semi = cfg.semi;
    const auto words = necklace::search_class(q, cfg.budget);
    const std::string cls = "(" + std::to_string(q.k) + "," + std::to_string(q.l) + ")-" +
                            (q.nested ? std::string("nested ") : std::string()) + (q.semi ? "semi-perfect" : "perfect");
    if (fmt == Format::json) {
        json arr = json::array();
        for (const auto& w : words) arr.push_back(w.to_string());
        out << json{{"class", cls}, {"base", q.base}, {"count", words.size()}, {"words", arr}}.dump(2) << '\n';
    } else {
        out << "base=" << q.base << " class=" << cls << " count=" << words.size() << '\n';
        for (const auto& w : words) out << w.to_string() << '\n';
    }
    return 0;
}

} // namespace levin::cli
