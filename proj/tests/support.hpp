#pragma once

// Random machines and configurations for the property tests.

#include "shiftnet/automata.hpp"
#include "shiftnet/pipeline.hpp"

#include <random>
#include <string>

namespace shiftnet::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline Word names(const std::string& prefix, std::size_t n) {
    Word w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(prefix + std::to_string(i));
    return w;
}

inline Word random_word(Rng& rng, const Word& symbols, std::size_t max_len, std::size_t min_len = 0) {
    Word w(pick(rng, min_len, max_len));
    for (auto& s : w) s = symbols[pick(rng, 0, symbols.size() - 1)];
    return w;
}

inline const Symbol& any_of(Rng& rng, const Word& w) { return w[pick(rng, 0, w.size() - 1)]; }

inline FSM random_fsm(Rng& rng) {
    FSM m;
    m.states = names("q", pick(rng, 1, 5));
    m.input_alphabet = names("a", pick(rng, 1, 3));
    m.start = m.states.front();
    // An end marker keeps finite inputs finite on the y axis.
    m.blank = default_blank;
    for (const auto& q : m.states) {
        if (coin(rng, 0.4)) m.accepting.insert(q);
        for (const auto& a : m.input_alphabet)
            if (coin(rng, 0.85)) m.delta[{q, a}] = any_of(rng, m.states);
    }
    return m;
}

inline PDA random_pda(Rng& rng) {
    PDA m;
    m.states = names("q", pick(rng, 1, 4));
    m.stack_alphabet = names("k", pick(rng, 1, 3));
    m.input_alphabet = names("a", pick(rng, 1, 3));
    m.start = m.states.front();
    Word tops{m.blank};
    tops.insert(tops.end(), m.stack_alphabet.begin(), m.stack_alphabet.end());
    auto action = [&] {
        return PdaAction{any_of(rng, m.states),
                         coin(rng, 0.5) ? std::optional<Symbol>(any_of(rng, m.stack_alphabet)) : std::nullopt};
    };
    for (const auto& q : m.states) {
        if (coin(rng, 0.3)) m.accepting.insert(q);
        for (const auto& top : tops) {
            if (coin(rng, 0.2)) {
                m.delta[{q, "", top}] = action();
                continue;
            }
            for (const auto& a : m.input_alphabet)
                if (coin(rng, 0.75)) m.delta[{q, a, top}] = action();
        }
    }
    m.validate();
    return m;
}

/// Retries until the grammar is LL(1) and free of left recursion.
inline TDR random_tdr(Rng& rng) {
    for (;;) {
        CFG g;
        g.nonterminals = names("N", pick(rng, 1, 3));
        g.terminals = names("t", pick(rng, 1, 3));
        g.start = g.nonterminals.front();
        Word all = g.nonterminals;
        all.insert(all.end(), g.terminals.begin(), g.terminals.end());
        const std::size_t n_rules = pick(rng, 1, 4);
        for (std::size_t r = 0; r < n_rules; ++r)
            g.rules.push_back(CfgRule{r < g.nonterminals.size() ? g.nonterminals[r] : any_of(rng, g.nonterminals),
                                      random_word(rng, all, 3)});
        try {
            return TDR(g);
        } catch (const Error&) {
        }
    }
}

inline TM random_tm(Rng& rng) {
    TM m;
    m.states = names("q", pick(rng, 1, 4));
    m.tape_alphabet = {m.blank};
    const Word in = names("a", pick(rng, 1, 2));
    m.tape_alphabet.insert(m.tape_alphabet.end(), in.begin(), in.end());
    m.input_alphabet = in;
    m.start = m.states.front();
    for (const auto& q : m.states)
        for (const auto& d : m.tape_alphabet)
            if (coin(rng, 0.85))
                m.delta[{q, d}] = TmAction{any_of(rng, m.states), any_of(rng, m.tape_alphabet),
                                           coin(rng, 0.5) ? Move::L : Move::R};
    m.validate();
    return m;
}

inline Machine random_machine(Rng& rng, MachineKind kind) {
    switch (kind) {
    case MachineKind::Fsm: return random_fsm(rng);
    case MachineKind::Pda: return random_pda(rng);
    case MachineKind::Tdr: return random_tdr(rng);
    case MachineKind::Tm: return random_tm(rng);
    }
    return random_fsm(rng);
}

inline MachineConfiguration random_config(Rng& rng, const Machine& machine) {
    return std::visit(
        [&](const auto& m) -> MachineConfiguration {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FSM>) {
                return FsmConfig{any_of(rng, m.states), random_word(rng, m.input_alphabet, 12)};
            } else if constexpr (std::is_same_v<T, PDA>) {
                return PdaConfig{any_of(rng, m.states), random_word(rng, m.stack_alphabet, 4),
                                 random_word(rng, m.input_alphabet, 10)};
            } else if constexpr (std::is_same_v<T, TDR>) {
                Word stack_symbols = m.grammar().nonterminals;
                stack_symbols.insert(stack_symbols.end(), m.grammar().terminals.begin(), m.grammar().terminals.end());
                return TdrConfig{random_word(rng, stack_symbols, 4, 1), random_word(rng, m.grammar().terminals, 8)};
            } else {
                return m.canonical(TmConfig{any_of(rng, m.states), random_word(rng, m.tape_alphabet, 5),
                                            random_word(rng, m.tape_alphabet, 5)});
            }
        },
        machine);
}

inline constexpr MachineKind all_kinds[] = {MachineKind::Fsm, MachineKind::Pda, MachineKind::Tdr, MachineKind::Tm};

} // namespace shiftnet::testing
