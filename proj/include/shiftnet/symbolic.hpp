#pragma once

#include "shiftnet/error.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shiftnet {

using Symbol = std::string;
using Word = std::vector<Symbol>;

inline const Symbol default_blank = "_";

inline std::string join(const Word& word, std::string_view sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i != 0) out += sep;
        out += word[i];
    }
    return out;
}

inline Word reversed(Word word) {
    std::reverse(word.begin(), word.end());
    return word;
}

/// Ordered set of symbol names with an optional blank.
class Alphabet {
  public:
    Alphabet() = default;

    explicit Alphabet(Word symbols, std::optional<Symbol> blank = std::nullopt)
        : symbols_(std::move(symbols)), blank_(std::move(blank)) {
        if (symbols_.empty()) throw Error(ErrorCode::InvalidMachine, "alphabet must not be empty");
        std::set<Symbol> seen;
        for (const auto& s : symbols_) {
            if (s.empty()) throw Error(ErrorCode::InvalidMachine, "empty symbol name");
            if (s.find('.') != std::string::npos)
                throw Error(ErrorCode::InvalidMachine, "symbol '" + s + "' contains the dot");
            if (!seen.insert(s).second)
                throw Error(ErrorCode::InvalidMachine, "duplicate symbol '" + s + "'");
        }
        if (blank_ && !contains(*blank_))
            throw Error(ErrorCode::InvalidMachine, "blank '" + *blank_ + "' is not in the alphabet");
    }

    const Word& symbols() const noexcept { return symbols_; }
    const std::optional<Symbol>& blank() const noexcept { return blank_; }
    std::size_t size() const noexcept { return symbols_.size(); }

    bool contains(const Symbol& s) const {
        return std::find(symbols_.begin(), symbols_.end(), s) != symbols_.end();
    }

    /// Splits text into symbols: whitespace separates chunks, and each chunk
    /// is cut greedily into the longest alphabet symbols.
    Word tokenize(std::string_view text) const {
        Word out;
        std::istringstream in{std::string(text)};
        std::string chunk;
        while (in >> chunk) {
            std::size_t pos = 0;
            while (pos < chunk.size()) {
                std::size_t best = 0;
                for (const auto& s : symbols_) {
                    if (s.size() > best && chunk.compare(pos, s.size(), s) == 0) best = s.size();
                }
                if (best == 0)
                    throw Error(ErrorCode::UnknownSymbol,
                                "cannot tokenize '" + chunk.substr(pos) + "'");
                out.push_back(chunk.substr(pos, best));
                pos += best;
            }
        }
        return out;
    }

  private:
    Word symbols_;
    std::optional<Symbol> blank_;
};

/// Finite dotted word v1.v2, both halves in written (left-to-right) order.
struct DottedWord {
    Word left;
    Word right;

    friend bool operator==(const DottedWord&, const DottedWord&) = default;
    friend auto operator<=>(const DottedWord&, const DottedWord&) = default;

    std::string str() const {
        std::string l = join(left), r = join(right);
        return l + (l.empty() ? "." : " .") + (r.empty() ? "" : " " + r);
    }

    static DottedWord parse(std::string_view text, const Alphabet& alphabet) {
        const auto dot = text.find('.');
        if (dot == std::string_view::npos || text.find('.', dot + 1) != std::string_view::npos)
            throw Error(ErrorCode::MalformedWord, "dotted word needs exactly one dot: '" +
                                                      std::string(text) + "'");
        return DottedWord{alphabet.tokenize(text.substr(0, dot)),
                          alphabet.tokenize(text.substr(dot + 1))};
    }
};

/// Two-sided sequence around a dot, finitely stored with blank continuation.
///
/// `left()` is stored nearest-dot-first (the reversal of the written left
/// half); `right()` is nearest-dot-first as well. Trailing fill symbols are
/// stripped, so equality compares the infinite extensions.
class DottedSequence {
  public:
    DottedSequence() : DottedSequence({}, {}, default_blank, default_blank) {}

    DottedSequence(Word left_nearest_first, Word right, Symbol fill_left, Symbol fill_right)
        : left_(std::move(left_nearest_first)), right_(std::move(right)),
          fill_left_(std::move(fill_left)), fill_right_(std::move(fill_right)) {
        strip(left_, fill_left_);
        strip(right_, fill_right_);
    }

    DottedSequence(Word left_nearest_first, Word right, const Symbol& fill = default_blank)
        : DottedSequence(std::move(left_nearest_first), std::move(right), fill, fill) {}

    /// Builds from a dotted word written left to right, e.g. "wo.rd".
    static DottedSequence from_written(const DottedWord& word, const Symbol& fill_left,
                                       const Symbol& fill_right) {
        return DottedSequence(reversed(word.left), word.right, fill_left, fill_right);
    }

    static DottedSequence parse(std::string_view text, const Alphabet& alphabet,
                                const Symbol& fill = default_blank) {
        return from_written(DottedWord::parse(text, alphabet), fill, fill);
    }

    const Word& left() const noexcept { return left_; }
    const Word& right() const noexcept { return right_; }
    const Symbol& fill_left() const noexcept { return fill_left_; }
    const Symbol& fill_right() const noexcept { return fill_right_; }

    /// Symbol at a cell index; -1 is nearest the dot on the left, 0 on the right.
    const Symbol& at(long index) const {
        if (index < 0) {
            const auto k = static_cast<std::size_t>(-index - 1);
            return k < left_.size() ? left_[k] : fill_left_;
        }
        const auto k = static_cast<std::size_t>(index);
        return k < right_.size() ? right_[k] : fill_right_;
    }

    /// First n symbols of the left half, nearest-dot-first, fill padded.
    Word left_prefix(std::size_t n) const { return prefix(left_, fill_left_, n); }
    Word right_prefix(std::size_t n) const { return prefix(right_, fill_right_, n); }

    DottedWord written() const { return DottedWord{reversed(left_), right_}; }

    std::string str() const {
        std::string l = join(reversed(left_)), r = join(right_);
        return l + (l.empty() ? "." : " .") + (r.empty() ? "" : " " + r);
    }

    friend bool operator==(const DottedSequence&, const DottedSequence&) = default;

  private:
    static void strip(Word& word, const Symbol& fill) {
        while (!word.empty() && word.back() == fill) word.pop_back();
    }

    static Word prefix(const Word& word, const Symbol& fill, std::size_t n) {
        Word out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(i < word.size() ? word[i] : fill);
        return out;
    }

    Word left_;
    Word right_;
    Symbol fill_left_;
    Symbol fill_right_;
};

/// Domain of dependence: the open index interval (k_l, k_r) around the dot.
struct DoD {
    int k_l = -2;
    int k_r = 1;

    DoD() = default;
    DoD(int kl, int kr) : k_l(kl), k_r(kr) {
        if (k_l > -1 || k_r < 0)
            throw Error(ErrorCode::InvalidMachine, "DoD needs k_l <= -1 and k_r >= 0");
        if (alpha_size() == 0 && beta_size() == 0)
            throw Error(ErrorCode::InvalidMachine, "DoD must cover at least one cell");
    }

    std::size_t alpha_size() const noexcept { return static_cast<std::size_t>(-k_l - 1); }
    std::size_t beta_size() const noexcept { return static_cast<std::size_t>(k_r); }

    friend bool operator==(const DoD&, const DoD&) = default;
};

/// Moves the dot: positive f moves it left by f cells, negative f moves it right.
inline DottedSequence shift_dot(const DottedSequence& s, long f) {
    if (f == 0) return s;
    Word left = s.left();
    Word right = s.right();
    if (f > 0) {
        const auto n = static_cast<std::size_t>(f);
        Word moved = s.left_prefix(n);
        left.erase(left.begin(), left.begin() + static_cast<long>(std::min(n, left.size())));
        Word new_right = reversed(std::move(moved));
        new_right.insert(new_right.end(), right.begin(), right.end());
        return DottedSequence(std::move(left), std::move(new_right), s.fill_left(), s.fill_right());
    }
    const auto n = static_cast<std::size_t>(-f);
    Word moved = s.right_prefix(n);
    right.erase(right.begin(), right.begin() + static_cast<long>(std::min(n, right.size())));
    Word new_left = reversed(std::move(moved));
    new_left.insert(new_left.end(), left.begin(), left.end());
    return DottedSequence(std::move(new_left), std::move(right), s.fill_left(), s.fill_right());
}

/// Blank-filled dotted word occupying the DoD, in written order.
inline DottedWord read_dod(const DottedSequence& s, const DoD& dod) {
    return DottedWord{reversed(s.left_prefix(dod.alpha_size())), s.right_prefix(dod.beta_size())};
}

/// Replaces the DoD content of s by `replacement` (lengths may differ).
inline DottedSequence substitute(const DottedSequence& s, const DoD& dod,
                                 const DottedWord& replacement) {
    Word left = reversed(replacement.left);
    const auto drop_l = std::min(dod.alpha_size(), s.left().size());
    left.insert(left.end(), s.left().begin() + static_cast<long>(drop_l), s.left().end());
    Word right = replacement.right;
    const auto drop_r = std::min(dod.beta_size(), s.right().size());
    right.insert(right.end(), s.right().begin() + static_cast<long>(drop_r), s.right().end());
    return DottedSequence(std::move(left), std::move(right), s.fill_left(), s.fill_right());
}

struct ShiftRule {
    DottedWord replacement;
    long shift = 0;

    friend bool operator==(const ShiftRule&, const ShiftRule&) = default;
};

/// Deterministic versatile shift: Omega(s) = shift_dot(substitute(s, G), F).
class VersatileShift {
  public:
    using RuleTable = std::map<DottedWord, ShiftRule>;

    VersatileShift() = default;
    VersatileShift(Alphabet alphabet, DoD dod) : alphabet_(std::move(alphabet)), dod_(dod) {}

    VersatileShift(Alphabet alphabet, DoD dod, const std::vector<std::pair<DottedWord, ShiftRule>>& rules)
        : VersatileShift(std::move(alphabet), dod) {
        for (const auto& [key, rule] : rules) add_rule(key, rule);
    }

    /// Adds a rule after checking key shape, symbols and shift validity.
    /// Re-adding an identical rule is a no-op; a conflicting one throws.
    void add_rule(const DottedWord& key, const ShiftRule& rule) {
        if (key.left.size() != dod_.alpha_size() || key.right.size() != dod_.beta_size())
            throw Error(ErrorCode::MalformedWord,
                        "rule key '" + key.str() + "' does not match the DoD");
        for (const Word* w : {&key.left, &key.right, &rule.replacement.left, &rule.replacement.right})
            for (const auto& sym : *w)
                if (!alphabet_.contains(sym))
                    throw Error(ErrorCode::UnknownSymbol, "symbol '" + sym + "' in rule '" +
                                                              key.str() + "'");
        // Symbols crossing the dot must come from the replacement itself.
        if (rule.shift > 0 && static_cast<std::size_t>(rule.shift) > rule.replacement.left.size())
            throw Error(ErrorCode::InvalidShift, "rule '" + key.str() + "' shifts " +
                                                     std::to_string(rule.shift) +
                                                     " cells past its left replacement");
        if (rule.shift < 0 && static_cast<std::size_t>(-rule.shift) > rule.replacement.right.size())
            throw Error(ErrorCode::InvalidShift, "rule '" + key.str() + "' shifts " +
                                                     std::to_string(-rule.shift) +
                                                     " cells past its right replacement");
        auto [it, inserted] = rules_.emplace(key, rule);
        if (!inserted && !(it->second == rule))
            throw Error(ErrorCode::NondeterministicMachine,
                        "two rules for DoD word '" + key.str() + "'");
    }

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const DoD& dod() const noexcept { return dod_; }
    const RuleTable& rules() const noexcept { return rules_; }

    const ShiftRule* find(const DottedWord& key) const {
        auto it = rules_.find(key);
        return it == rules_.end() ? nullptr : &it->second;
    }

  private:
    Alphabet alphabet_;
    DoD dod_;
    RuleTable rules_;
};

inline DottedSequence apply_rule(const DottedSequence& s, const DoD& dod, const ShiftRule& rule) {
    return shift_dot(substitute(s, dod, rule.replacement), rule.shift);
}

/// One step of the shift. Throws NoRule when the DoD content has no entry.
inline DottedSequence apply_vs(const VersatileShift& vs, const DottedSequence& s) {
    const DottedWord key = read_dod(s, vs.dod());
    const ShiftRule* rule = vs.find(key);
    if (rule == nullptr) throw Error(ErrorCode::NoRule, "no rule for '" + key.str() + "'");
    return apply_rule(s, vs.dod(), *rule);
}

} // namespace shiftnet
