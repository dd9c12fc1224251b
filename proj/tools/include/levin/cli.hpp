#pragma once

// Command implementations behind the `levin` executable. Each command writes
// to the given stream and returns the process exit code: 0 pass, 1 fail,
// 2 budget exceeded.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace levin::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240611;
inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 26;

enum class ExitCode : int { pass = 0, fail = 1, budget = 2 };

enum class Format { automatic, text, csv, json };

struct RunConfig {
    std::string command;

    // global
    std::uint32_t p = 2;
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t budget = kDefaultBudget;  // max digits (or candidates) materialized
    std::string out;                        // empty: stdout
    Format format = Format::automatic;

    // stream selection
    bool random_stream = false;  // random (z, eta, u) per level instead of Levin's
    unsigned levels = 8;         // highest level the stream may generate

    // digits
    std::string start = "0";  // decimal position, or "n<m>" for the start of A_m
    std::uint64_t len = 0;

    // verify
    std::string word;  // digit string; when empty, verify a block
    std::uint32_t base = 0;  // word base, 0: use p
    std::size_t k = 0;
    std::size_t l = 0;
    bool nested = false;
    bool semi = false;
    unsigned m = 1;  // block level for verify, lemma level, plan level

    // scan
    std::uint64_t n_max = 0;
    std::uint64_t stride = 1;
    std::size_t log_points = 0;  // extra log-spaced N up to n_max
    unsigned precision = 0;      // L, 0: default

    // lemmas
    std::vector<std::string> suites;  // empty: all
    unsigned profiles = 50;

    // lowerbound
    std::vector<std::uint64_t> custom_w;
    bool verify_gamma = false;
    bool analyze_only = false;

    /// Throws std::invalid_argument describing the first problem.
    void validate() const;
};

/// Validates, runs the command, and maps exceptions to exit codes (budget
/// errors to 2, everything else to 1, with a message on `err`).
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int cmd_digits(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_scan(const RunConfig& cfg, std::ostream& out);
int cmd_lemmas(const RunConfig& cfg, std::ostream& out);
int cmd_lowerbound(const RunConfig& cfg, std::ostream& out);
int cmd_search(const RunConfig& cfg, std::ostream& out);

/// Parses "1,2,3" into integers; throws std::invalid_argument.
std::vector<std::uint64_t> parse_list(const std::string& text);

} // namespace levin::cli
