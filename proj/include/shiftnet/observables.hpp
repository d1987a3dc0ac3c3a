#pragma once

#include "shiftnet/error.hpp"
#include "shiftnet/godel.hpp"
#include "shiftnet/interactive.hpp"
#include "shiftnet/rann.hpp"
#include "shiftnet/rational.hpp"
#include "shiftnet/symbolic.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace shiftnet {

using Decimal = boost::multiprecision::cpp_dec_float_50;

/// Mean activation over all units, optionally leaving one unit (the bias) out.
inline Rational amari_mean(const NetworkState& st, std::optional<std::size_t> exclude = std::nullopt) {
    Rational sum = 0;
    std::size_t n = 0;
    for (std::size_t u = 0; u < st.size(); ++u) {
        if (exclude && *exclude == u) continue;
        if (st[u] != 0) sum += st[u];
        ++n;
    }
    return n == 0 ? Rational(0) : sum / Rational(static_cast<long>(n));
}

inline Rational amari_mean(const Network& net, const NetworkState& st, bool include_bias = false) {
    return amari_mean(st, include_bias ? std::nullopt : std::optional<std::size_t>(net.bias()));
}

inline Rational amari_mean(const InteractiveNetwork& net, const NetworkState& st, bool include_bias = false) {
    return amari_mean(st, include_bias ? std::nullopt : std::optional<std::size_t>(net.bias()));
}

/// Sum over i, j of u_i w_ij u_j with w_ij the weight from j to i.
template <class Net>
Rational harmony(const Net& net, const NetworkState& st) {
    Rational sum = 0;
    for (std::size_t to = 0; to < net.size(); ++to) {
        if (st[to] == 0) continue;
        for (const auto& e : net.incoming(to))
            if (st[e.from] != 0) sum += st[to] * e.weight * st[e.from];
    }
    return sum;
}

inline Rational harmony(const std::vector<std::vector<Rational>>& weights, const NetworkState& st) {
    Rational sum = 0;
    for (std::size_t i = 0; i < st.size(); ++i)
        for (std::size_t j = 0; j < st.size(); ++j) sum += st[i] * weights[i][j] * st[j];
    return sum;
}

/// Uniform symbols from the axis's non-state alphabet.
inline Word random_tail(const AxisEncoding& axis, std::size_t length, std::mt19937_64& rng) {
    const Word& symbols = axis.tail().symbols();
    std::uniform_int_distribution<std::size_t> pick(0, symbols.size() - 1);
    Word out;
    out.reserve(length);
    for (std::size_t k = 0; k < length; ++k) out.push_back(symbols[pick(rng)]);
    return out;
}

/// Codes of w_a u.v w_b with random w_a, w_b. The stimulus is used as written
/// (trailing blanks are kept), so it may carry its own separator.
inline std::pair<Code, Code> random_compatible_init(const DottedWord& stimulus, std::size_t tail_length,
                                                    std::mt19937_64& rng, const AxisEncoding& gx,
                                                    const AxisEncoding& gy) {
    Word left = reversed(stimulus.left);
    const Word ta = random_tail(gx, tail_length, rng);
    left.insert(left.end(), ta.begin(), ta.end());
    Word right = stimulus.right;
    const Word tb = random_tail(gy, tail_length, rng);
    right.insert(right.end(), tb.begin(), tb.end());
    return {gx.encode(left), gy.encode(right)};
}

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

inline Decimal to_decimal(const Rational& r) {
    return Decimal(boost::multiprecision::numerator(r).str()) / Decimal(boost::multiprecision::denominator(r).str());
}

struct ErpPoint {
    std::size_t step = 0;
    Rational mean;
    Rational variance; // sample variance, 0 for a single trial
    Decimal std;
};

struct ErpCurve {
    std::string label;
    std::vector<ErpPoint> points;
    std::vector<std::vector<Rational>> trials; // per trial, per step
};

/// Per-step mean and sample standard deviation over trials.
inline std::vector<ErpPoint> aggregate(const std::vector<std::vector<Rational>>& trials) {
    std::vector<ErpPoint> out;
    if (trials.empty()) return out;
    const std::size_t steps = trials.front().size();
    const auto n = static_cast<long>(trials.size());
    for (std::size_t t = 0; t < steps; ++t) {
        ErpPoint p;
        p.step = t;
        Rational sum = 0;
        for (const auto& tr : trials) sum += tr[t];
        p.mean = sum / Rational(n);
        if (n > 1) {
            Rational ss = 0;
            for (const auto& tr : trials) {
                const Rational d = tr[t] - p.mean;
                ss += d * d;
            }
            p.variance = ss / Rational(n - 1);
        }
        p.std = boost::multiprecision::sqrt(to_decimal(p.variance));
        out.push_back(std::move(p));
    }
    return out;
}

struct ErpOptions {
    std::size_t n_trials = 100;
    std::size_t tail_length = 6;
    std::uint64_t seed = 1;
    std::size_t onset = 2;
    std::size_t max_steps = 12;
    bool include_bias = false;
};

/// Trials on a plain network: the stimulus with random tails replaces the
/// MCL at `onset`; before that the network holds the stimulus-free rest code
/// (the tails alone behind a blank).
inline ErpCurve synth_erp(const Network& net, const DottedWord& stimulus, const ErpOptions& opt,
                          std::string label = {}) {
    if (opt.n_trials == 0) throw Error(ErrorCode::OutOfRange, "at least one trial is needed");
    ErpCurve curve;
    curve.label = std::move(label);
    for (std::size_t k = 0; k < opt.n_trials; ++k) {
        auto rng = trial_rng(opt.seed, k);
        const auto [x, y] = random_compatible_init(stimulus, opt.tail_length, rng, net.gx(), net.gy());
        NetworkState st = init_state(net, x, y);
        std::vector<Rational> series{amari_mean(net, st, opt.include_bias)};
        for (std::size_t t = 0; t < opt.max_steps; ++t) {
            try {
                st = macro_step(net, st);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoActiveBranch) throw;
                // a rejected trial rests where it stopped
            }
            series.push_back(amari_mean(net, st, opt.include_bias));
        }
        curve.trials.push_back(std::move(series));
    }
    curve.points = aggregate(curve.trials);
    return curve;
}

/// One trial of an interactive network: tapes rest, with random tails behind a
/// blank on the two stimulus tapes, until the stimulus is pushed in front of the
/// same tails at `onset`.
struct IanTrial {
    std::vector<Rational> means;     // A(t), t = 0..max_steps
    std::vector<NetworkState> states;
    std::vector<TapeWords> tapes;    // symbolic tapes after each pass
    std::vector<PassRecord> passes;  // components active in each pass
};

inline IanTrial run_ian_trial(const InteractiveNetwork& net, const TapeWords& rest, const std::string& x_tape,
                              const std::string& y_tape, const DottedWord& stimulus, std::size_t trial,
                              const ErpOptions& opt) {
    auto rng = trial_rng(opt.seed, trial);
    const Tape& tx = net.tapes()[net.tape(x_tape)];
    const Tape& ty = net.tapes()[net.tape(y_tape)];
    const Word ta = random_tail(tx.encoding, opt.tail_length, rng);
    const Word tb = random_tail(ty.encoding, opt.tail_length, rng);

    auto with_tail = [](Word head, const Symbol& sep, const Word& tail) {
        head.push_back(sep);
        head.insert(head.end(), tail.begin(), tail.end());
        return head;
    };
    TapeWords before = rest;
    before[x_tape] = with_tail(rest.count(x_tape) ? rest.at(x_tape) : Word{}, tx.encoding.fill(), ta);
    before[y_tape] = with_tail(rest.count(y_tape) ? rest.at(y_tape) : Word{}, ty.encoding.fill(), tb);
    TapeWords pushed;
    pushed[x_tape] = with_tail(reversed(stimulus.left), tx.encoding.fill(), ta);
    pushed[y_tape] = with_tail(stimulus.right, ty.encoding.fill(), tb);
    TapeCodes push_codes;
    push_codes[x_tape] = tx.encoding.encode(pushed[x_tape]);
    push_codes[y_tape] = ty.encoding.encode(pushed[y_tape]);

    IanTrial out;
    NetworkState st = init_ian(net, encode_tapes(net, before));
    out.states.push_back(st);
    out.means.push_back(amari_mean(net, st, opt.include_bias));
    out.tapes.push_back(decode_tapes(net, st));
    for (std::size_t t = 0; t < opt.max_steps; ++t) {
        PassRecord rec;
        st = step_ian(net, st, t == opt.onset ? push_codes : TapeCodes{}, &rec);
        out.passes.push_back(std::move(rec));
        out.states.push_back(st);
        out.means.push_back(amari_mean(net, st, opt.include_bias));
        out.tapes.push_back(decode_tapes(net, st));
    }
    return out;
}

inline ErpCurve synth_erp(const InteractiveNetwork& net, const TapeWords& rest, const std::string& x_tape,
                          const std::string& y_tape, const DottedWord& stimulus, const ErpOptions& opt,
                          std::string label = {}) {
    if (opt.n_trials == 0) throw Error(ErrorCode::OutOfRange, "at least one trial is needed");
    ErpCurve curve;
    curve.label = std::move(label);
    for (std::size_t k = 0; k < opt.n_trials; ++k)
        curve.trials.push_back(run_ian_trial(net, rest, x_tape, y_tape, stimulus, k, opt).means);
    curve.points = aggregate(curve.trials);
    return curve;
}

inline std::string decimal_string(const Decimal& d, int digits) {
    return d.str(digits, std::ios_base::fixed);
}

/// CSV rows: step,mean,std,condition
inline void write_erp_csv(std::ostream& out, const std::vector<ErpCurve>& curves, int precision, bool header = true) {
    if (header) out << "step,mean,std,condition\n";
    for (const auto& c : curves)
        for (const auto& p : c.points)
            out << p.step << ',' << to_decimal_string(p.mean, precision) << ',' << decimal_string(p.std, precision)
                << ',' << c.label << '\n';
}

} // namespace shiftnet
