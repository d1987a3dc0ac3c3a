#pragma once

#include "shiftnet/error.hpp"
#include "shiftnet/rational.hpp"
#include "shiftnet/symbolic.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace shiftnet {

using Code = Rational;

/// Bijection from symbols onto 0..g-1. The symbol with code 0 doubles as the fill.
class GammaMap {
  public:
    GammaMap() = default;

    /// Codes follow list order: symbols[i] gets i.
    explicit GammaMap(Word symbols_in_code_order) : symbols_(std::move(symbols_in_code_order)) {
        if (symbols_.empty()) throw Error(ErrorCode::InvalidMachine, "gamma map must not be empty");
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (!codes_.emplace(symbols_[i], static_cast<long>(i)).second)
                throw Error(ErrorCode::InvalidMachine,
                            "gamma map lists '" + symbols_[i] + "' twice");
        }
    }

    /// From explicit (symbol, code) pairs; codes must cover 0..g-1 exactly once.
    static GammaMap from_pairs(const std::vector<std::pair<Symbol, long>>& pairs) {
        Word ordered(pairs.size());
        std::vector<bool> used(pairs.size(), false);
        for (const auto& [sym, code] : pairs) {
            if (code < 0 || static_cast<std::size_t>(code) >= pairs.size() ||
                used[static_cast<std::size_t>(code)])
                throw Error(ErrorCode::InvalidMachine,
                            "gamma codes must be a permutation of 0.." +
                                std::to_string(pairs.size() - 1));
            used[static_cast<std::size_t>(code)] = true;
            ordered[static_cast<std::size_t>(code)] = sym;
        }
        return GammaMap(std::move(ordered));
    }

    /// Blank (if any) first, the remaining symbols in alphabet order.
    static GammaMap from_alphabet(const Alphabet& alphabet) {
        Word ordered;
        if (alphabet.blank()) ordered.push_back(*alphabet.blank());
        for (const auto& s : alphabet.symbols())
            if (!alphabet.blank() || s != *alphabet.blank()) ordered.push_back(s);
        return GammaMap(std::move(ordered));
    }

    std::size_t size() const noexcept { return symbols_.size(); }
    const Word& symbols() const noexcept { return symbols_; }
    const Symbol& fill() const { return symbols_.front(); }
    bool contains(const Symbol& s) const { return codes_.count(s) != 0; }

    long code(const Symbol& s) const {
        auto it = codes_.find(s);
        if (it == codes_.end()) throw Error(ErrorCode::UnknownSymbol, "no gamma code for '" + s + "'");
        return it->second;
    }

    const Symbol& symbol(long code) const {
        if (code < 0 || static_cast<std::size_t>(code) >= symbols_.size())
            throw Error(ErrorCode::UnknownSymbol, "no symbol with gamma code " + std::to_string(code));
        return symbols_[static_cast<std::size_t>(code)];
    }

    friend bool operator==(const GammaMap& a, const GammaMap& b) { return a.symbols_ == b.symbols_; }

  private:
    Word symbols_;
    std::map<Symbol, long> codes_;
};

/// State enumeration for the leading digit plus symbol enumeration for the rest.
struct RefinedGammaMap {
    GammaMap states;
    GammaMap symbols;
};

struct Interval {
    Rational lo;
    Rational hi;

    bool contains(const Rational& v) const { return lo <= v && v < hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Positional code of one side of a dotted sequence. Plain axes use one
/// base throughout; refined axes read the first symbol as a state.
class AxisEncoding {
  public:
    AxisEncoding() = default;
    explicit AxisEncoding(GammaMap plain) : tail_(std::move(plain)) {}
    explicit AxisEncoding(RefinedGammaMap refined)
        : head_(std::move(refined.states)), tail_(std::move(refined.symbols)) {}
    AxisEncoding(GammaMap head, GammaMap tail) : head_(std::move(head)), tail_(std::move(tail)) {}

    bool refined() const noexcept { return head_.has_value(); }
    const std::optional<GammaMap>& head() const noexcept { return head_; }
    const GammaMap& tail() const noexcept { return tail_; }
    const Symbol& fill() const { return tail_.fill(); }

    const GammaMap& map_at(std::size_t position) const {
        return position == 1 && head_ ? *head_ : tail_;
    }

    /// Weight of 1-based position k; weight(0) = 1.
    Rational weight(std::size_t k) const {
        if (k == 0) return Rational(1);
        if (!head_) return pow_int(Rational(static_cast<long>(tail_.size())), -static_cast<long>(k));
        return Rational(1, static_cast<long>(head_->size())) *
               pow_int(Rational(static_cast<long>(tail_.size())), -static_cast<long>(k - 1));
    }

    /// Number of distinct words of length p this axis can hold.
    std::size_t word_count(std::size_t p) const {
        std::size_t n = 1;
        for (std::size_t k = 1; k <= p; ++k) n *= map_at(k).size();
        return n;
    }

    Code encode(const Word& word) const {
        Code sum = 0;
        Rational w = 1;
        for (std::size_t k = 1; k <= word.size(); ++k) {
            w = k == 1 ? weight(1) : w / Rational(static_cast<long>(tail_.size()));
            const long d = map_at(k).code(word[k - 1]);
            if (d != 0) sum += w * d;
        }
        return sum;
    }

    /// Cylinder of all codes whose first |prefix| symbols equal prefix.
    Interval cylinder(const Word& prefix) const {
        const Code lo = encode(prefix);
        return Interval{lo, lo + weight(prefix.size())};
    }

    /// First n symbols of a code; remaining digits are ignored.
    Word decode_prefix(const Code& code, std::size_t n) const {
        Word out;
        digits(code, n, out);
        return out;
    }

    /// Exactly n symbols; the code must have no further nonzero digits.
    Word decode(const Code& code, std::size_t n) const {
        Word out;
        const Rational rest = digits(code, n, out);
        if (rest != 0)
            throw Error(ErrorCode::NonRepresentable,
                        to_fraction_string(code) + " needs more than " + std::to_string(n) + " digits");
        return out;
    }

    /// Shortest word (no trailing fill) with this code.
    Word decode_all(const Code& code, std::size_t max_length = 4096) const {
        check_range(code);
        const std::size_t min_length = head_ ? 1 : 0;
        Word out;
        Rational r = code;
        for (std::size_t k = 1; r != 0 || k <= min_length; ++k) {
            if (k > max_length || (k > 1 && tail_.size() == 1))
                throw Error(ErrorCode::NonRepresentable,
                            to_fraction_string(code) + " has no finite expansion");
            const GammaMap& g = map_at(k);
            r *= static_cast<long>(g.size());
            const Integer d = floor_int(r);
            r -= Rational(d);
            out.push_back(g.symbol(d.convert_to<long>()));
        }
        while (out.size() > min_length && out.back() == fill()) out.pop_back();
        return out;
    }

    friend bool operator==(const AxisEncoding&, const AxisEncoding&) = default;

  private:
    static void check_range(const Code& code) {
        if (code < 0 || code >= 1)
            throw Error(ErrorCode::NonRepresentable, to_fraction_string(code) + " is outside [0,1)");
    }

    Rational digits(const Code& code, std::size_t n, Word& out) const {
        check_range(code);
        Rational r = code;
        for (std::size_t k = 1; k <= n; ++k) {
            const GammaMap& g = map_at(k);
            r *= static_cast<long>(g.size());
            const Integer d = floor_int(r);
            r -= Rational(d);
            out.push_back(g.symbol(d.convert_to<long>()));
        }
        return r;
    }

    std::optional<GammaMap> head_;
    GammaMap tail_;
};

/// Sum of gamma(d_k) g^-k over the word.
inline Code godelize(const Word& w, const GammaMap& g) { return AxisEncoding(g).encode(w); }

/// Leading state digit in base n_q, the rest in base n_s scaled by 1/n_q.
inline Code godelize_refined(const Word& w, const RefinedGammaMap& g) {
    if (w.empty()) throw Error(ErrorCode::MalformedWord, "refined word must start with a state");
    return AxisEncoding(g).encode(w);
}

/// Symbologram point: x from the left half (nearest-dot-first), y from the right half.
inline std::pair<Code, Code> godelize_dotted(const DottedSequence& s, const AxisEncoding& gx,
                                             const AxisEncoding& gy) {
    return {gx.encode(s.left()), gy.encode(s.right())};
}

inline Word decode(const Code& c, const GammaMap& g, std::size_t n) {
    return AxisEncoding(g).decode(c, n);
}

/// Removes the leading |popped| digits: c * g^p - sum gamma(d_i) g^(p-i).
inline Code pop_code(const Code& c, const Word& popped, const GammaMap& g) {
    const AxisEncoding axis(g);
    if (axis.decode_prefix(c, popped.size()) != popped)
        throw Error(ErrorCode::DigitMismatch, "code does not start with '" + join(popped) + "'");
    const long p = static_cast<long>(popped.size());
    const Rational base(static_cast<long>(g.size()));
    Code result = c * pow_int(base, p);
    for (long i = 1; i <= p; ++i)
        result -= Rational(g.code(popped[static_cast<std::size_t>(i - 1)])) * pow_int(base, p - i);
    return result;
}

/// Prepends |pushed| digits: c * g^-r + sum gamma(b_i) g^-i.
inline Code push_code(const Code& c, const Word& pushed, const GammaMap& g) {
    const long r = static_cast<long>(pushed.size());
    const Rational base(static_cast<long>(g.size()));
    Code result = c * pow_int(base, -r);
    for (long i = 1; i <= r; ++i)
        result += Rational(g.code(pushed[static_cast<std::size_t>(i - 1)])) * pow_int(base, -i);
    return result;
}

} // namespace shiftnet
