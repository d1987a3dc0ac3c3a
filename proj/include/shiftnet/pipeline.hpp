#pragma once

#include "shiftnet/automata.hpp"
#include "shiftnet/error.hpp"
#include "shiftnet/godel.hpp"
#include "shiftnet/nda.hpp"
#include "shiftnet/rann.hpp"
#include "shiftnet/symbolic.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

namespace shiftnet {

/// A machine with all three compiled stages.
struct CompiledMachine {
    Machine machine;
    VsOptions options;
    VersatileShift vs;
    EncodingPair encodings;
    NDA nda;
    Network network;
};

inline CompiledMachine compile(const Machine& machine, const VsOptions& opts = {},
                               std::optional<EncodingPair> encodings = std::nullopt) {
    EncodingPair enc = encodings ? *encodings : default_encodings(machine);
    VersatileShift vs = to_vs(machine, opts);
    NDA nda = vs_to_nda(vs, enc.x, enc.y);
    Network net = nda_to_rann(nda);
    return CompiledMachine{machine, opts, std::move(vs), std::move(enc), std::move(nda), std::move(net)};
}

struct CommutativityReport {
    bool agree = true;
    std::size_t steps = 0;                  // steps all four stages completed together
    std::optional<std::size_t> divergence;  // step index of the first disagreement
    std::string detail;
    std::string terminal;                   // how the run stopped, if it did
};

namespace detail {

template <class F>
std::optional<ErrorCode> attempt(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        if (is_terminal(e.code())) return e.code();
        throw;
    }
    return std::nullopt;
}

} // namespace detail

/// Runs the symbolic machine, its shift, the NDA and the network side by side
/// and compares them exactly after every step.
inline CommutativityReport check_commutativity(const CompiledMachine& cm, const MachineConfiguration& config,
                                               std::size_t n_steps) {
    CommutativityReport rep;
    MachineConfiguration c = config;
    DottedSequence s = encode_configuration(cm.machine, c);
    auto [x, y] = godelize_dotted(s, cm.encodings.x, cm.encodings.y);
    NetworkState st = init_state(cm.network, x, y);

    auto fail = [&](std::size_t k, std::string why) {
        rep.agree = false;
        rep.divergence = k;
        rep.detail = std::move(why);
        return rep;
    };

    for (std::size_t k = 0; k < n_steps; ++k) {
        MachineConfiguration c2 = c;
        DottedSequence s2 = s;
        std::pair<Rational, Rational> p2{x, y};
        NetworkState st2;
        const auto e_sym = detail::attempt([&] { c2 = step(cm.machine, c); });
        const auto e_vs = detail::attempt([&] { s2 = apply_vs(cm.vs, s); });
        const auto e_nda = detail::attempt([&] { p2 = step_nda(cm.nda, x, y); });
        const auto e_net = detail::attempt([&] { st2 = macro_step(cm.network, st); });

        const bool all_stop = e_sym && e_vs && e_nda && e_net;
        const bool none_stop = !e_sym && !e_vs && !e_nda && !e_net;
        if (all_stop) {
            rep.terminal = std::string(to_string(*e_sym)) + "/" + std::string(to_string(*e_vs));
            return rep;
        }
        if (!none_stop) {
            // A halted machine may be kept as a fixed point by identity branches.
            const bool fixed = e_sym == ErrorCode::Halted && !e_vs && !e_nda && !e_net && s2 == s &&
                               p2 == std::make_pair(x, y) && mcl(cm.network, st2) == p2;
            if (fixed) {
                rep.terminal = "Halted/fixed-point";
                return rep;
            }
            auto name = [](const std::optional<ErrorCode>& e) {
                return e ? std::string(to_string(*e)) : std::string("step");
            };
            return fail(k, "stages disagree on stopping: symbolic=" + name(e_sym) + " vs=" + name(e_vs) +
                               " nda=" + name(e_nda) + " net=" + name(e_net));
        }
        if (encode_configuration(cm.machine, c2) != s2)
            return fail(k, "symbolic " + encode_configuration(cm.machine, c2).str() + " vs shift " + s2.str());
        if (godelize_dotted(s2, cm.encodings.x, cm.encodings.y) != p2)
            return fail(k, "shift " + s2.str() + " does not encode to the NDA point");
        if (mcl(cm.network, st2) != p2) return fail(k, "network MCL differs from the NDA point");
        if (decode_state(cm.network, st2) != s2) return fail(k, "network state decodes to " +
                                                                    decode_state(cm.network, st2).str());
        c = std::move(c2);
        s = std::move(s2);
        x = p2.first;
        y = p2.second;
        st = std::move(st2);
        rep.steps = k + 1;
    }
    return rep;
}

} // namespace shiftnet
