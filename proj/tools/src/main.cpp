#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "levin/cli.hpp"

int main(int argc, char** argv) {
    using levin::cli::Format;
    levin::cli::RunConfig cfg;

    CLI::App app{"Affine necklaces, Levin's normal number and its discrepancy"};
    app.require_subcommand(1);
    app.fallthrough();

    const std::map<std::string, Format> formats{
        {"auto", Format::automatic}, {"text", Format::text}, {"csv", Format::csv}, {"json", Format::json}};
    app.add_option("--p", cfg.p, "prime base")->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for random profiles")->capture_default_str();
    app.add_option("--budget", cfg.budget, "max digits or candidates materialized")->capture_default_str();
    app.add_option("--out", cfg.out, "output file (default stdout)");
    app.add_option("--format", cfg.format, "output format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
        ->option_text("auto|text|csv|json");
    bool levin_stream = false;
    auto* random_opt = app.add_flag("--random", cfg.random_stream, "random (z, eta, u) per level instead of Levin's");
    app.add_flag("--levin", levin_stream, "Levin's construction (default)")->excludes(random_opt);
    app.add_option("--levels", cfg.levels, "highest level the stream may generate")->capture_default_str();

    auto* digits = app.add_subcommand("digits", "dump stream digits");
    digits->add_option("--start", cfg.start, "decimal position, or n<m> for the start of A_m")->capture_default_str();
    digits->add_option("--len", cfg.len, "number of digits")->required();

    auto* verify = app.add_subcommand("verify", "check a word or an affine block for a necklace property");
    verify->add_option("--word", cfg.word, "digit string; omit to verify the block A_m");
    verify->add_option("--base", cfg.base, "word base (default p)");
    verify->add_option("--k", cfg.k, "block length");
    verify->add_option("--l", cfg.l, "multiplicity");
    verify->add_flag("--nested", cfg.nested, "nested variant");
    verify->add_flag("--semi", cfg.semi, "semi-perfect variant");
    verify->add_option("--m", cfg.m, "block level when no word is given")->capture_default_str();

    auto* scan = app.add_subcommand("scan", "exact star discrepancy of prefixes");
    scan->add_option("--Nmax", cfg.n_max, "largest N")->required();
    scan->add_option("--stride", cfg.stride, "N = stride, 2 stride, ..., Nmax")->capture_default_str();
    scan->add_option("--log-points", cfg.log_points, "extra log-spaced N up to Nmax");
    scan->add_option("--L", cfg.precision, "digits per point (default ceil(log_p Nmax) + 16)");

    auto* lemmas = app.add_subcommand("lemmas", "run the lemma property suites");
    lemmas->add_option("--m", cfg.m, "level")->capture_default_str();
    lemmas->add_option("--suite", cfg.suites, "suite names (default all)");
    lemmas->add_option("--profiles", cfg.profiles, "random profiles per suite")->capture_default_str();

    auto* lower = app.add_subcommand("lowerbound", "interval chain and surplus for a block schedule");
    std::string custom_w;
    lower->add_option("--m", cfg.m, "level")->required();
    lower->add_option("--custom-w", custom_w, "comma-separated schedule w_0 > w_1 > ...");
    lower->add_flag("--verify-gamma", cfg.verify_gamma, "check the sub-interval predictions by enumeration");
    lower->add_flag("--analyze-only", cfg.analyze_only, "plan formulas only, no enumeration");

    auto* search = app.add_subcommand("search", "enumerate words with a necklace property");
    search->add_option("--k", cfg.k, "block length")->required();
    search->add_option("--l", cfg.l, "multiplicity")->required();
    search->add_option("--base", cfg.base, "alphabet size (default p)");
    search->add_flag("--nested", cfg.nested, "nested variant");
    search->add_flag("--semi", cfg.semi, "semi-perfect variant");

    CLI11_PARSE(app, argc, argv);

    cfg.command = app.get_subcommands().front()->get_name();
    if (!custom_w.empty()) {
        try {
            cfg.custom_w = levin::cli::parse_list(custom_w);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }

    if (cfg.out.empty()) return levin::cli::run(cfg, std::cout, std::cerr);
    std::ofstream file(cfg.out);
    if (!file) {
        std::cerr << "error: cannot open " << cfg.out << '\n';
        return 1;
    }
    return levin::cli::run(cfg, file, std::cerr);
}
