#include "levin/necklace.hpp"

#include <algorithm>
#include <sstream>

namespace levin::necklace {

namespace {

char digit_char(Digit d) { return static_cast<char>(d < 10 ? '0' + d : 'a' + (d - 10)); }

int char_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'z') return c - 'a' + 10;
    if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
    return -1;
}

// b^k if it does not exceed `limit`, otherwise nullopt.
std::optional<std::size_t> bounded_pow(std::size_t b, std::size_t k, std::size_t limit) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (r > limit / b) return std::nullopt;
        r *= b;
    }
    return r;
}

std::vector<Digit> decode_block(std::size_t code, std::size_t k, std::uint32_t b) {
    std::vector<Digit> out(k);
    for (std::size_t i = k; i-- > 0;) {
        out[i] = static_cast<Digit>(code % b);
        code /= b;
    }
    return out;
}

// Checks that the circular word seg (length l*b^k) is (k,l)-(semi-)perfect.
std::optional<Violation> check_segment(std::span<const Digit> seg, std::uint32_t b, std::size_t k, std::size_t l,
                                       bool semi, std::size_t segment_start) {
    const std::size_t n = seg.size();
    const std::size_t kinds = n / l;  // b^k
    // counts[code * l + residue]
    std::vector<std::uint32_t> counts(kinds * l, 0);
    std::vector<std::uint32_t> totals(kinds, 0);

    std::size_t code = 0;
    for (std::size_t i = 0; i < k; ++i) code = code * b + seg[i % n];
    for (std::size_t pos = 0; pos < n; ++pos) {
        ++totals[code];
        ++counts[code * l + pos % l];
        code = (code * b) % kinds + seg[(pos + k) % n];
    }

    for (std::size_t c = 0; c < kinds; ++c) {
        bool bad = totals[c] != l;
        std::string reason;
        if (bad) {
            reason = "block occurs " + std::to_string(totals[c]) + " times, expected " + std::to_string(l);
        } else if (!semi) {
            for (std::size_t r = 0; r < l; ++r) {
                if (counts[c * l + r] != 1) {
                    bad = true;
                    reason = "occurrence positions are not pairwise distinct modulo " + std::to_string(l);
                    break;
                }
            }
        }
        if (!bad) continue;

        Violation v;
        v.level = k;
        v.segment_start = segment_start;
        v.block = decode_block(c, k, b);
        v.reason = std::move(reason);
        for (std::size_t pos = 0; pos < n; ++pos) {
            bool match = true;
            for (std::size_t i = 0; i < k && match; ++i) match = seg[(pos + i) % n] == v.block[i];
            if (match) v.positions.push_back(pos);
        }
        return v;
    }
    return std::nullopt;
}

std::size_t checked_class_length(const Word& w, std::size_t k, std::size_t l) {
    if (k == 0 || l == 0) throw std::invalid_argument("necklace: k and l must be positive");
    const auto kinds = bounded_pow(w.base(), k, w.size());
    if (!kinds || *kinds * l != w.size()) {
        throw std::invalid_argument("necklace: word length " + std::to_string(w.size()) + " is not l*b^k for k=" +
                                    std::to_string(k) + ", l=" + std::to_string(l));
    }
    return *kinds;
}

} // namespace

Word::Word(std::uint32_t base, std::vector<Digit> digits) : base_(base), digits_(std::move(digits)) {
    if (base_ < 2 || base_ > 256) throw std::invalid_argument("Word: base must be in [2, 256]");
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        if (digits_[i] >= base_) {
            throw std::invalid_argument("Word: digit " + std::to_string(digits_[i]) + " at position " +
                                        std::to_string(i) + " is not below base " + std::to_string(base_));
        }
    }
}

Word Word::from_string(std::uint32_t base, std::string_view digits) {
    std::vector<Digit> out;
    out.reserve(digits.size());
    for (char c : digits) {
        const int d = char_digit(c);
        if (d < 0) throw std::invalid_argument(std::string("Word: invalid digit character '") + c + "'");
        out.push_back(static_cast<Digit>(d));
    }
    return Word(base, std::move(out));
}

Word Word::rotated(std::size_t shift) const {
    if (digits_.empty()) return *this;
    std::vector<Digit> out(digits_.size());
    for (std::size_t i = 0; i < digits_.size(); ++i) out[i] = digits_[(i + shift) % digits_.size()];
    return Word(base_, std::move(out));
}

Word Word::slice(std::size_t pos, std::size_t len) const {
    if (pos + len > digits_.size()) throw std::out_of_range("Word::slice: range exceeds word");
    return Word(base_, std::vector<Digit>(digits_.begin() + static_cast<std::ptrdiff_t>(pos),
                                          digits_.begin() + static_cast<std::ptrdiff_t>(pos + len)));
}

std::string Word::to_string() const {
    if (base_ > 36) throw std::logic_error("Word::to_string: base above 36 has no character form");
    std::string s;
    s.reserve(digits_.size());
    for (Digit d : digits_) s.push_back(digit_char(d));
    return s;
}

OccurrenceMap occurrences(const Word& w, std::size_t k, Wrap wrap) {
    if (k == 0) throw std::invalid_argument("occurrences: k must be >= 1");
    if (k > w.size()) throw std::invalid_argument("occurrences: k exceeds word length");
    OccurrenceMap out;
    const std::size_t n = w.size();
    const std::size_t starts = wrap == Wrap::circular ? n : n - k + 1;
    std::vector<Digit> block(k);
    for (std::size_t pos = 0; pos < starts; ++pos) {
        for (std::size_t i = 0; i < k; ++i) block[i] = w.circular(pos + i);
        out[block].push_back(pos);
    }
    return out;
}

std::optional<Violation> check_perfect(const Word& w, std::size_t k, std::size_t l, bool semi) {
    checked_class_length(w, k, l);
    return check_segment(w.digits(), w.base(), k, l, semi, 0);
}

std::optional<Violation> check_nested(const Word& w, std::size_t k, std::size_t l, bool semi) {
    checked_class_length(w, k, l);
    const auto digits = w.digits();
    std::size_t seg_len = l;
    for (std::size_t j = 1; j <= k; ++j) {
        seg_len *= w.base();
        for (std::size_t start = 0; start < w.size(); start += seg_len) {
            if (auto v = check_segment(digits.subspan(start, seg_len), w.base(), j, l, semi, start)) return v;
        }
    }
    return std::nullopt;
}

bool is_semi_perfect(const Word& w, std::size_t k, std::size_t l) { return !check_perfect(w, k, l, true); }
bool is_perfect(const Word& w, std::size_t k, std::size_t l) { return !check_perfect(w, k, l, false); }
bool is_nested_semi_perfect(const Word& w, std::size_t k, std::size_t l) { return !check_nested(w, k, l, true); }
bool is_nested_perfect(const Word& w, std::size_t k, std::size_t l) { return !check_nested(w, k, l, false); }

Word add_periodic(const Word& w, const Word& z) {
    if (w.base() != z.base()) throw std::invalid_argument("add_periodic: bases differ");
    if (z.empty() || w.size() % z.size() != 0) {
        throw std::invalid_argument("add_periodic: |z| must divide |w|");
    }
    std::vector<Digit> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = static_cast<Digit>((w[i] + z[i % z.size()]) % w.base());
    }
    return Word(w.base(), std::move(out));
}

Word negated(const Word& z) {
    std::vector<Digit> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<Digit>((z.base() - z[i]) % z.base());
    return Word(z.base(), std::move(out));
}

std::vector<Word> search_class(const SearchQuery& q, std::uint64_t max_candidates) {
    if (q.k == 0 || q.l == 0) throw std::invalid_argument("search_class: k and l must be positive");
    const auto kinds = bounded_pow(q.base, q.k, std::size_t{1} << 24);
    if (!kinds) throw BudgetExceeded("search_class: b^k is too large to enumerate");
    const std::size_t len = *kinds * q.l;
    const auto candidates = bounded_pow(q.base, len, max_candidates);
    if (!candidates) {
        throw BudgetExceeded("search_class: " + std::to_string(q.base) + "^" + std::to_string(len) +
                             " candidates exceed the budget of " + std::to_string(max_candidates));
    }

    std::vector<Word> found;
    std::vector<Digit> digits(len, 0);
    for (std::uint64_t c = 0; c < *candidates; ++c) {
        Word w(q.base, digits);
        const bool ok = q.nested ? !check_nested(w, q.k, q.l, q.semi) : !check_perfect(w, q.k, q.l, q.semi);
        if (ok) found.push_back(std::move(w));
        // odometer, most significant digit first so output stays lexicographic
        for (std::size_t i = len; i-- > 0;) {
            if (++digits[i] < q.base) break;
            digits[i] = 0;
        }
    }
    return found;
}

std::string format_word(const Word& w) {
    std::ostringstream out;
    out << "base=" << w.base() << '\n';
    if (w.base() <= 36) {
        out << w.to_string();
    } else {
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (i) out << ',';
            out << static_cast<unsigned>(w[i]);
        }
    }
    out << '\n';
    return out.str();
}

Word parse_word(std::string_view text) {
    const auto eol = text.find('\n');
    const std::string_view header = text.substr(0, eol);
    if (header.substr(0, 5) != "base=") throw std::invalid_argument("parse_word: missing base=<b> header");
    const std::uint32_t base = static_cast<std::uint32_t>(std::stoul(std::string(header.substr(5))));
    std::string_view body = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r' || body.back() == ' ')) body.remove_suffix(1);

    if (base <= 36) return Word::from_string(base, body);

    std::vector<Digit> digits;
    std::size_t pos = 0;
    while (pos < body.size()) {
        auto comma = body.find(',', pos);
        if (comma == std::string_view::npos) comma = body.size();
        const unsigned long v = std::stoul(std::string(body.substr(pos, comma - pos)));
        if (v > 255) throw std::invalid_argument("parse_word: digit out of range");
        digits.push_back(static_cast<Digit>(v));
        pos = comma + 1;
    }
    return Word(base, std::move(digits));
}

} // namespace levin::necklace
