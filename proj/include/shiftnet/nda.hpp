#pragma once

#include "shiftnet/error.hpp"
#include "shiftnet/godel.hpp"
#include "shiftnet/rational.hpp"
#include "shiftnet/symbolic.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace shiftnet {

/// (x, y) -> (a_x + lambda_x x, a_y + lambda_y y).
struct AffineMap2D {
    Rational a_x = 0;
    Rational a_y = 0;
    Rational lambda_x = 1;
    Rational lambda_y = 1;

    std::pair<Rational, Rational> operator()(const Rational& x, const Rational& y) const {
        return {a_x + lambda_x * x, a_y + lambda_y * y};
    }

    bool is_identity() const { return a_x == 0 && a_y == 0 && lambda_x == 1 && lambda_y == 1; }

    friend bool operator==(const AffineMap2D&, const AffineMap2D&) = default;
};

/// One axis of the partition: words (nearest-dot-first) with their cylinders, ordered by code.
struct AxisPartition {
    std::vector<Word> words;
    std::vector<Interval> intervals;

    std::size_t size() const noexcept { return words.size(); }

    std::optional<std::size_t> index_of(const Word& w) const {
        auto it = std::find(words.begin(), words.end(), w);
        if (it == words.end()) return std::nullopt;
        return static_cast<std::size_t>(it - words.begin());
    }

    /// Half-open membership by binary search over the lower bounds.
    std::optional<std::size_t> locate(const Rational& v) const {
        auto it = std::upper_bound(intervals.begin(), intervals.end(), v,
                                   [](const Rational& value, const Interval& iv) { return value < iv.lo; });
        if (it == intervals.begin()) return std::nullopt;
        --it;
        if (!it->contains(v)) return std::nullopt;
        return static_cast<std::size_t>(it - intervals.begin());
    }
};

/// Every word of length p the axis can hold, in increasing code order.
inline AxisPartition partition_axis(const AxisEncoding& axis, std::size_t p) {
    AxisPartition out;
    std::vector<std::size_t> digits(p, 0);
    const std::size_t total = axis.word_count(p);
    out.words.reserve(total);
    out.intervals.reserve(total);
    for (std::size_t n = 0; n < total; ++n) {
        Word w(p);
        for (std::size_t k = 0; k < p; ++k) w[k] = axis.map_at(k + 1).symbol(static_cast<long>(digits[k]));
        out.intervals.push_back(axis.cylinder(w));
        out.words.push_back(std::move(w));
        for (std::size_t k = p; k-- > 0;) {
            if (++digits[k] < axis.map_at(k + 1).size()) break;
            digits[k] = 0;
        }
    }
    for (std::size_t i = 1; i < out.intervals.size(); ++i) {
        if (out.intervals[i].lo < out.intervals[i - 1].hi)
            throw Error(ErrorCode::OverlappingPrefixes,
                        "cylinders of '" + join(out.words[i - 1]) + "' and '" + join(out.words[i]) + "' overlap");
    }
    return out;
}

struct Partition {
    AxisPartition x;
    AxisPartition y;
};

inline Partition build_partition(const DoD& dod, const AxisEncoding& gx, const AxisEncoding& gy) {
    return Partition{partition_axis(gx, dod.alpha_size()), partition_axis(gy, dod.beta_size())};
}

inline Partition build_partition(const VersatileShift& vs, const AxisEncoding& gx, const AxisEncoding& gy) {
    return build_partition(vs.dod(), gx, gy);
}

namespace detail {

/// Known words on each side after substitution and shift, nearest-dot-first.
inline std::pair<Word, Word> rewritten_sides(const ShiftRule& rule) {
    Word left = reversed(rule.replacement.left);
    Word right = rule.replacement.right;
    if (rule.shift > 0) {
        const auto f = static_cast<std::size_t>(rule.shift);
        Word moved(left.begin(), left.begin() + static_cast<long>(f));
        left.erase(left.begin(), left.begin() + static_cast<long>(f));
        Word r = reversed(std::move(moved));
        r.insert(r.end(), right.begin(), right.end());
        right = std::move(r);
    } else if (rule.shift < 0) {
        const auto f = static_cast<std::size_t>(-rule.shift);
        Word moved(right.begin(), right.begin() + static_cast<long>(f));
        right.erase(right.begin(), right.begin() + static_cast<long>(f));
        Word l = reversed(std::move(moved));
        l.insert(l.end(), left.begin(), left.end());
        left = std::move(l);
    }
    return {std::move(left), std::move(right)};
}

/// Axis map v -> psi(after) + W(|after|+1)/W(|before|+1) * (v - psi(before)).
inline std::pair<Rational, Rational> axis_affine(const AxisEncoding& axis, const Word& before, const Word& after) {
    if (axis.refined() && (before.empty() || after.empty()))
        throw Error(ErrorCode::MalformedWord, "a refined axis must keep its state symbol next to the dot");
    const Rational ratio = axis.weight(after.size() + 1) / axis.weight(before.size() + 1);
    return {axis.encode(after) - ratio * axis.encode(before), ratio};
}

} // namespace detail

/// Affine branch equivalent to one rule on the symbologram.
inline AffineMap2D compile_branch(const DoD& dod, const DottedWord& key, const ShiftRule& rule,
                                  const AxisEncoding& gx, const AxisEncoding& gy) {
    if (key.left.size() != dod.alpha_size() || key.right.size() != dod.beta_size())
        throw Error(ErrorCode::MalformedWord, "key '" + key.str() + "' does not fit the DoD");
    const auto [new_left, new_right] = detail::rewritten_sides(rule);
    const auto [ax, lx] = detail::axis_affine(gx, reversed(key.left), new_left);
    const auto [ay, ly] = detail::axis_affine(gy, key.right, new_right);
    return AffineMap2D{ax, ay, lx, ly};
}

struct NdaCell {
    DottedWord label;
    std::optional<ShiftRule> rule;
    std::optional<AffineMap2D> branch;

    bool defined() const noexcept { return branch.has_value(); }
};

/// Rectangular partition of the unit square with one affine branch per defined cell.
class NDA {
  public:
    NDA() = default;
    NDA(DoD dod, AxisEncoding gx, AxisEncoding gy, Partition partition, std::vector<NdaCell> cells)
        : dod_(dod), gx_(std::move(gx)), gy_(std::move(gy)), partition_(std::move(partition)),
          cells_(std::move(cells)) {}

    const DoD& dod() const noexcept { return dod_; }
    const AxisEncoding& gx() const noexcept { return gx_; }
    const AxisEncoding& gy() const noexcept { return gy_; }
    const std::vector<Interval>& x_intervals() const noexcept { return partition_.x.intervals; }
    const std::vector<Interval>& y_intervals() const noexcept { return partition_.y.intervals; }
    const Partition& partition() const noexcept { return partition_; }
    std::size_t m() const noexcept { return partition_.x.size(); }
    std::size_t n() const noexcept { return partition_.y.size(); }

    const NdaCell& cell(std::size_t i, std::size_t j) const { return cells_.at(i * n() + j); }
    const std::vector<NdaCell>& cells() const noexcept { return cells_; }

    std::size_t defined_cells() const {
        return static_cast<std::size_t>(
            std::count_if(cells_.begin(), cells_.end(), [](const NdaCell& c) { return c.defined(); }));
    }

  private:
    DoD dod_;
    AxisEncoding gx_;
    AxisEncoding gy_;
    Partition partition_;
    std::vector<NdaCell> cells_;
};

namespace detail {

inline void spot_check(const NdaCell& c, const DoD& dod, const Interval& ix, const Interval& iy,
                       const AxisEncoding& gx, const AxisEncoding& gy) {
    const AffineMap2D& f = *c.branch;
    const auto [x0, y0] = f(ix.lo, iy.lo);
    const auto [x1, y1] = f(ix.hi, iy.hi);
    if (x0 < 0 || y0 < 0 || x1 > 1 || y1 > 1)
        throw Error(ErrorCode::OutOfRange, "branch of '" + c.label.str() + "' leaves the unit square");
    // One interior sequence, checked against the symbolic shift.
    Word left = reversed(c.label.left);
    left.push_back(gx.tail().symbols().back());
    Word right = c.label.right;
    right.push_back(gy.tail().symbols().back());
    const DottedSequence s(left, right, gx.fill(), gy.fill());
    const auto [sx, sy] = godelize_dotted(s, gx, gy);
    const auto [tx, ty] = godelize_dotted(apply_rule(s, dod, *c.rule), gx, gy);
    if (f(sx, sy) != std::make_pair(tx, ty))
        throw Error(ErrorCode::InvalidShift, "branch of '" + c.label.str() + "' disagrees with the shift");
}

} // namespace detail

inline NDA vs_to_nda(const VersatileShift& vs, const AxisEncoding& gx, const AxisEncoding& gy) {
    Partition part = build_partition(vs, gx, gy);
    const std::size_t m = part.x.size(), n = part.y.size();
    std::vector<NdaCell> cells(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cells[i * n + j].label = DottedWord{reversed(part.x.words[i]), part.y.words[j]};
    for (const auto& [key, rule] : vs.rules()) {
        const auto i = part.x.index_of(reversed(key.left));
        const auto j = part.y.index_of(key.right);
        if (!i || !j)
            throw Error(ErrorCode::MalformedWord, "rule key '" + key.str() + "' is not a cell of the partition");
        NdaCell& c = cells[*i * n + *j];
        c.rule = rule;
        c.branch = compile_branch(vs.dod(), key, rule, gx, gy);
        detail::spot_check(c, vs.dod(), part.x.intervals[*i], part.y.intervals[*j], gx, gy);
    }
    return NDA(vs.dod(), gx, gy, std::move(part), std::move(cells));
}

/// Adds an identity rule for every DoD word that has none.
inline VersatileShift complete_with_identity(const VersatileShift& vs, const AxisEncoding& gx, const AxisEncoding& gy) {
    VersatileShift out = vs;
    const Partition part = build_partition(vs, gx, gy);
    for (const auto& xw : part.x.words) {
        for (const auto& yw : part.y.words) {
            DottedWord key{reversed(xw), yw};
            if (!vs.find(key)) out.add_rule(key, ShiftRule{key, 0});
        }
    }
    return out;
}

/// Cell indices (0-based) of a symbologram point.
inline std::pair<std::size_t, std::size_t> switch_cell(const NDA& nda, const Rational& x, const Rational& y) {
    const auto i = nda.partition().x.locate(x);
    const auto j = nda.partition().y.locate(y);
    if (!i || !j)
        throw Error(ErrorCode::NoCell, "(" + to_fraction_string(x) + ", " + to_fraction_string(y) +
                                           ") lies in no cell");
    return {*i, *j};
}

inline std::pair<Rational, Rational> step_nda(const NDA& nda, const Rational& x, const Rational& y) {
    const auto [i, j] = switch_cell(nda, x, y);
    const NdaCell& c = nda.cell(i, j);
    if (!c.defined()) throw Error(ErrorCode::UndefinedBranch, "no branch for cell '" + c.label.str() + "'");
    return (*c.branch)(x, y);
}

} // namespace shiftnet
