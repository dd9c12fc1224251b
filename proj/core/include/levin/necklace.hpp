#pragma once

// Words and circular words over {0, ..., b-1}, and brute-force checks of the
// (k,l)-perfect family of necklace properties.
//
// Positions are 0-indexed throughout. A nested check at level j looks at the
// aligned blocks of length l*b^j that start at positions = 0 (mod l*b^j).

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "levin/common.hpp"

namespace levin::necklace {

using Digit = std::uint8_t;

class Word {
public:
    Word() = default;
    Word(std::uint32_t base, std::vector<Digit> digits);

    /// Parses a digit string such as "00111001" (base-36 characters).
    static Word from_string(std::uint32_t base, std::string_view digits);

    std::uint32_t base() const noexcept { return base_; }
    std::size_t size() const noexcept { return digits_.size(); }
    bool empty() const noexcept { return digits_.empty(); }
    Digit operator[](std::size_t i) const { return digits_[i]; }
    std::span<const Digit> digits() const noexcept { return digits_; }

    /// Digit at position i read circularly.
    Digit circular(std::size_t i) const { return digits_[i % digits_.size()]; }

    Word rotated(std::size_t shift) const;
    Word slice(std::size_t pos, std::size_t len) const;

    /// The digits as base-36 characters (only valid for base <= 36).
    std::string to_string() const;

    friend bool operator==(const Word&, const Word&) = default;

private:
    std::uint32_t base_ = 2;
    std::vector<Digit> digits_;
};

enum class Wrap { circular, linear };

/// Length-k block -> sorted start positions.
using OccurrenceMap = std::map<std::vector<Digit>, std::vector<std::size_t>>;

/// Every start position contributes one block in circular mode; in linear mode
/// only starts with pos + k <= |w| count. Throws std::invalid_argument when
/// k == 0 or k > |w|.
OccurrenceMap occurrences(const Word& w, std::size_t k, Wrap wrap = Wrap::circular);

/// First failure found by a perfectness check, with enough context to print a
/// counterexample.
struct Violation {
    std::size_t level = 0;            ///< j for nested checks, k for flat ones
    std::size_t segment_start = 0;    ///< start of the aligned block that failed
    std::vector<Digit> block;         ///< offending length-j word
    std::vector<std::size_t> positions;  ///< its circular start positions inside the segment
    std::string reason;
};

/// Returns the first violation of the (k,l) semi-perfect / perfect property, or
/// nullopt when w has it. Throws std::invalid_argument if |w| != l*b^k.
std::optional<Violation> check_perfect(const Word& w, std::size_t k, std::size_t l, bool semi);
std::optional<Violation> check_nested(const Word& w, std::size_t k, std::size_t l, bool semi);

bool is_semi_perfect(const Word& w, std::size_t k, std::size_t l);
bool is_perfect(const Word& w, std::size_t k, std::size_t l);
bool is_nested_semi_perfect(const Word& w, std::size_t k, std::size_t l);
bool is_nested_perfect(const Word& w, std::size_t k, std::size_t l);

/// w + z^{b^k} mod b, where z is repeated to the length of w.
/// Requires |z| to divide |w| and equal bases.
Word add_periodic(const Word& w, const Word& z);

/// Digitwise negation mod b (the group inverse used to undo add_periodic).
Word negated(const Word& z);

struct SearchQuery {
    std::size_t k = 1;
    std::size_t l = 1;
    std::uint32_t base = 2;
    bool nested = false;
    bool semi = false;
};

/// Every word of length l*b^k with the requested property, in lexicographic
/// order. Throws BudgetExceeded when b^{l*b^k} exceeds `max_candidates`.
std::vector<Word> search_class(const SearchQuery& query, std::uint64_t max_candidates);

/// Word text format: "base=<b>" on the first line, then the digits on one line
/// as base-36 characters when b <= 36, comma-separated integers otherwise.
std::string format_word(const Word& w);
Word parse_word(std::string_view text);

} // namespace levin::necklace
