#pragma once

#include "shiftnet/error.hpp"
#include "shiftnet/godel.hpp"
#include "shiftnet/symbolic.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

namespace shiftnet {

namespace detail {

inline void require_member(const std::set<Symbol>& set, const Symbol& s, const std::string& what) {
    if (set.count(s) == 0)
        throw Error(ErrorCode::InvalidMachine, what + " '" + s + "' is not declared");
}

inline std::set<Symbol> to_set(const Word& w) { return {w.begin(), w.end()}; }

inline void require_distinct(const Word& w, const std::string& what) {
    if (to_set(w).size() != w.size()) throw Error(ErrorCode::InvalidMachine, what + " has duplicates");
    if (w.empty()) throw Error(ErrorCode::InvalidMachine, what + " must not be empty");
}

inline void require_disjoint(const Word& a, const Word& b, const std::string& what) {
    const auto sb = to_set(b);
    for (const auto& s : a)
        if (sb.count(s) != 0) throw Error(ErrorCode::InvalidMachine, what + " share '" + s + "'");
}

inline Word concat(Word a, const Word& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline Word strip_trailing(Word w, const Symbol& fill) {
    while (!w.empty() && w.back() == fill) w.pop_back();
    return w;
}

} // namespace detail

// ---------------------------------------------------------------- FSM

struct FsmConfig {
    Symbol state;
    Word input;
    friend bool operator==(const FsmConfig&, const FsmConfig&) = default;
};

/// Deterministic finite-state machine. `blank`, when set, marks the end of input.
struct FSM {
    Word states;
    Word input_alphabet;
    Symbol start;
    std::set<Symbol> accepting;
    std::map<std::pair<Symbol, Symbol>, Symbol> delta;
    std::optional<Symbol> blank;

    void validate() const {
        detail::require_distinct(states, "FSM states");
        detail::require_distinct(input_alphabet, "FSM input alphabet");
        detail::require_disjoint(states, input_alphabet, "FSM states and input");
        const auto q = detail::to_set(states), t = detail::to_set(input_alphabet);
        detail::require_member(q, start, "start state");
        for (const auto& s : accepting) detail::require_member(q, s, "accepting state");
        if (blank) {
            if (t.count(*blank) != 0 || q.count(*blank) != 0)
                throw Error(ErrorCode::InvalidMachine, "FSM blank must be a fresh symbol");
        }
        for (const auto& [key, next] : delta) {
            detail::require_member(q, key.first, "state");
            detail::require_member(t, key.second, "input symbol");
            detail::require_member(q, next, "state");
        }
    }

    FsmConfig initial(Word input) const { return FsmConfig{start, std::move(input)}; }
};

inline FsmConfig step_fsm(const FSM& m, const FsmConfig& c) {
    if (c.input.empty()) throw Error(ErrorCode::EmptyInput, "no input left in state " + c.state);
    auto it = m.delta.find({c.state, c.input.front()});
    if (it == m.delta.end())
        throw Error(ErrorCode::UndefinedTransition,
                    "no transition from " + c.state + " on " + c.input.front());
    return FsmConfig{it->second, Word(c.input.begin() + 1, c.input.end())};
}

/// Runs the whole input; false on an undefined transition.
inline bool fsm_accepts(const FSM& m, const Word& input) {
    FsmConfig c = m.initial(input);
    try {
        while (!c.input.empty()) c = step_fsm(m, c);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UndefinedTransition) return false;
        throw;
    }
    return m.accepting.count(c.state) != 0;
}

// ---------------------------------------------------------------- PDA

struct PdaConfig {
    Symbol state;
    Word stack; // top first
    Word input;
    friend bool operator==(const PdaConfig&, const PdaConfig&) = default;
};

struct PdaAction {
    Symbol next;
    std::optional<Symbol> push; // nullopt pops
    friend bool operator==(const PdaAction&, const PdaAction&) = default;
};

/// Deterministic push-down automaton. Input keys use "" for epsilon moves;
/// the blank as a stack key means "stack empty". Accepts by empty stack
/// when `accepting` is empty, otherwise by final state, once input is consumed.
struct PDA {
    Word states;
    Word stack_alphabet;
    Word input_alphabet;
    Symbol start;
    std::set<Symbol> accepting;
    std::map<std::tuple<Symbol, Symbol, Symbol>, PdaAction> delta; // (q, input or "", top)
    Symbol blank = default_blank;

    void validate() const {
        detail::require_distinct(states, "PDA states");
        detail::require_distinct(stack_alphabet, "PDA stack alphabet");
        detail::require_distinct(input_alphabet, "PDA input alphabet");
        detail::require_disjoint(states, stack_alphabet, "PDA states and stack symbols");
        detail::require_disjoint(states, input_alphabet, "PDA states and input symbols");
        const auto q = detail::to_set(states), n = detail::to_set(stack_alphabet),
                   t = detail::to_set(input_alphabet);
        if (q.count(blank) || n.count(blank) || t.count(blank))
            throw Error(ErrorCode::InvalidMachine, "PDA blank must be a fresh symbol");
        detail::require_member(q, start, "start state");
        for (const auto& s : accepting) detail::require_member(q, s, "accepting state");
        for (const auto& [key, action] : delta) {
            const auto& [state, in, top] = key;
            detail::require_member(q, state, "state");
            if (!in.empty()) detail::require_member(t, in, "input symbol");
            if (top != blank) detail::require_member(n, top, "stack symbol");
            detail::require_member(q, action.next, "state");
            if (action.push) detail::require_member(n, *action.push, "stack symbol");
            if (!in.empty() && delta.count({state, "", top}) != 0)
                throw Error(ErrorCode::NondeterministicMachine,
                            "epsilon and input moves overlap at (" + state + ", " + top + ")");
        }
    }

    PdaConfig initial(Word input) const { return PdaConfig{start, {}, std::move(input)}; }

    bool accepted(const PdaConfig& c) const {
        if (!c.input.empty()) return false;
        return accepting.empty() ? c.stack.empty() : accepting.count(c.state) != 0;
    }
};

inline PdaConfig step_pda(const PDA& m, const PdaConfig& c) {
    const Symbol top = c.stack.empty() ? m.blank : c.stack.front();
    const PdaAction* action = nullptr;
    bool consumes = false;
    if (!c.input.empty()) {
        auto it = m.delta.find({c.state, c.input.front(), top});
        if (it != m.delta.end()) {
            action = &it->second;
            consumes = true;
        }
    }
    if (action == nullptr) {
        auto it = m.delta.find({c.state, "", top});
        if (it != m.delta.end()) action = &it->second;
    }
    if (action == nullptr) {
        if (m.accepted(c)) throw Error(ErrorCode::Halted, "PDA accepted in state " + c.state);
        throw Error(ErrorCode::UndefinedTransition, "PDA stuck in state " + c.state);
    }
    PdaConfig out{action->next, c.stack, c.input};
    if (consumes) out.input.erase(out.input.begin());
    if (action->push) {
        out.stack.insert(out.stack.begin(), *action->push);
    } else if (!out.stack.empty()) {
        out.stack.erase(out.stack.begin());
    }
    return out;
}

// ---------------------------------------------------------------- CFG and TDR

struct CfgRule {
    Symbol lhs;
    Word rhs;
    friend bool operator==(const CfgRule&, const CfgRule&) = default;
};

struct CFG {
    Word nonterminals;
    Word terminals;
    std::vector<CfgRule> rules;
    Symbol start;
};

struct TdrConfig {
    Word stack; // top first
    Word input;
    friend bool operator==(const TdrConfig&, const TdrConfig&) = default;
};

/// Single-state top-down recognizer. A nonterminal with several rules picks
/// one by its one-symbol lookahead; the blank stands for end of input.
class TDR {
  public:
    TDR() = default;

    explicit TDR(CFG g, Symbol blank = default_blank) : grammar_(std::move(g)), blank_(std::move(blank)) {
        detail::require_distinct(grammar_.nonterminals, "nonterminals");
        detail::require_distinct(grammar_.terminals, "terminals");
        detail::require_disjoint(grammar_.nonterminals, grammar_.terminals, "nonterminals and terminals");
        n_ = detail::to_set(grammar_.nonterminals);
        t_ = detail::to_set(grammar_.terminals);
        if (n_.count(blank_) || t_.count(blank_))
            throw Error(ErrorCode::InvalidMachine, "TDR blank must be a fresh symbol");
        detail::require_member(n_, grammar_.start, "start symbol");
        for (const auto& r : grammar_.rules) {
            detail::require_member(n_, r.lhs, "rule left-hand side");
            for (const auto& s : r.rhs)
                if (!n_.count(s) && !t_.count(s))
                    throw Error(ErrorCode::InvalidMachine, "rule symbol '" + s + "' is not declared");
        }
        compute_nullable_first();
        check_left_recursion();
        compute_follow();
        build_table();
    }

    const CFG& grammar() const noexcept { return grammar_; }
    const Symbol& blank() const noexcept { return blank_; }
    bool is_nonterminal(const Symbol& s) const { return n_.count(s) != 0; }
    bool is_terminal(const Symbol& s) const { return t_.count(s) != 0; }

    /// Rule chosen for (nonterminal, lookahead), if any.
    const CfgRule* expansion(const Symbol& x, const Symbol& lookahead) const {
        auto it = table_.find({x, lookahead});
        return it == table_.end() ? nullptr : &grammar_.rules[it->second];
    }

    const std::map<std::pair<Symbol, Symbol>, std::size_t>& table() const noexcept { return table_; }

    TdrConfig initial(Word input) const { return TdrConfig{{grammar_.start}, std::move(input)}; }

  private:
    bool nullable_word(const Word& w, std::size_t from = 0) const {
        for (std::size_t i = from; i < w.size(); ++i)
            if (t_.count(w[i]) || !nullable_.count(w[i])) return false;
        return true;
    }

    std::set<Symbol> first_word(const Word& w, std::size_t from = 0) const {
        std::set<Symbol> out;
        for (std::size_t i = from; i < w.size(); ++i) {
            if (t_.count(w[i])) {
                out.insert(w[i]);
                return out;
            }
            const auto& f = first_.at(w[i]);
            out.insert(f.begin(), f.end());
            if (!nullable_.count(w[i])) return out;
        }
        return out;
    }

    void compute_nullable_first() {
        for (const auto& x : grammar_.nonterminals) first_[x];
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& r : grammar_.rules) {
                if (!nullable_.count(r.lhs) && nullable_word(r.rhs)) {
                    nullable_.insert(r.lhs);
                    changed = true;
                }
                for (const auto& s : first_word(r.rhs))
                    if (first_[r.lhs].insert(s).second) changed = true;
            }
        }
    }

    void check_left_recursion() const {
        // X -> Y whenever Y can start a derivation of X.
        std::map<Symbol, std::set<Symbol>> edges;
        for (const auto& r : grammar_.rules) {
            for (const auto& s : r.rhs) {
                if (t_.count(s)) break;
                edges[r.lhs].insert(s);
                if (!nullable_.count(s)) break;
            }
        }
        for (const auto& root : grammar_.nonterminals) {
            std::set<Symbol> seen;
            std::vector<Symbol> todo(edges[root].begin(), edges[root].end());
            while (!todo.empty()) {
                Symbol s = todo.back();
                todo.pop_back();
                if (s == root)
                    throw Error(ErrorCode::LeftRecursiveGrammar, "nonterminal '" + root + "' is left-recursive");
                if (!seen.insert(s).second) continue;
                for (const auto& nx : edges[s]) todo.push_back(nx);
            }
        }
    }

    void compute_follow() {
        for (const auto& x : grammar_.nonterminals) follow_[x];
        follow_[grammar_.start].insert(blank_);
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& r : grammar_.rules) {
                for (std::size_t i = 0; i < r.rhs.size(); ++i) {
                    const Symbol& s = r.rhs[i];
                    if (!n_.count(s)) continue;
                    for (const auto& f : first_word(r.rhs, i + 1))
                        if (follow_[s].insert(f).second) changed = true;
                    if (nullable_word(r.rhs, i + 1))
                        for (const auto& f : Word(follow_[r.lhs].begin(), follow_[r.lhs].end()))
                            if (follow_[s].insert(f).second) changed = true;
                }
            }
        }
    }

    void build_table() {
        std::map<Symbol, std::vector<std::size_t>> by_lhs;
        for (std::size_t i = 0; i < grammar_.rules.size(); ++i) by_lhs[grammar_.rules[i].lhs].push_back(i);
        Word lookaheads = grammar_.terminals;
        lookaheads.push_back(blank_);
        for (const auto& [x, idx] : by_lhs) {
            if (idx.size() == 1) {
                for (const auto& a : lookaheads) table_[{x, a}] = idx.front();
                continue;
            }
            for (std::size_t i : idx) {
                const auto& rhs = grammar_.rules[i].rhs;
                std::set<Symbol> predict = first_word(rhs);
                if (nullable_word(rhs)) predict.insert(follow_[x].begin(), follow_[x].end());
                for (const auto& a : predict) {
                    auto [it, inserted] = table_.emplace(std::make_pair(x, a), i);
                    if (!inserted)
                        throw Error(ErrorCode::AmbiguousGrammar,
                                    "two rules for '" + x + "' predict '" + a + "'");
                }
            }
        }
    }

    CFG grammar_;
    Symbol blank_;
    std::set<Symbol> n_, t_;
    std::set<Symbol> nullable_;
    std::map<Symbol, std::set<Symbol>> first_, follow_;
    std::map<std::pair<Symbol, Symbol>, std::size_t> table_;
};

inline TDR tdr_from_cfg(const CFG& g) { return TDR(g); }

inline TdrConfig step_tdr(const TDR& m, const TdrConfig& c) {
    if (c.stack.empty()) {
        if (c.input.empty()) throw Error(ErrorCode::Halted, "TDR accepted by empty stack");
        throw Error(ErrorCode::UndefinedTransition, "TDR stack empty with input left");
    }
    const Symbol& top = c.stack.front();
    const Symbol lookahead = c.input.empty() ? m.blank() : c.input.front();
    TdrConfig out{Word(c.stack.begin() + 1, c.stack.end()), c.input};
    if (m.is_terminal(top)) {
        if (top != lookahead)
            throw Error(ErrorCode::UndefinedTransition, "TDR expects '" + top + "' but reads '" + lookahead + "'");
        out.input.erase(out.input.begin());
        return out;
    }
    const CfgRule* rule = m.expansion(top, lookahead);
    if (rule == nullptr)
        throw Error(ErrorCode::UndefinedTransition, "no rule for '" + top + "' before '" + lookahead + "'");
    out.stack.insert(out.stack.begin(), rule->rhs.begin(), rule->rhs.end());
    return out;
}

/// Runs until acceptance or rejection; `limit` bounds the step count.
inline bool tdr_accepts(const TDR& m, const Word& input, std::size_t limit = 10000) {
    TdrConfig c = m.initial(input);
    for (std::size_t i = 0; i < limit; ++i) {
        try {
            c = step_tdr(m, c);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Halted) return true;
            if (e.code() == ErrorCode::UndefinedTransition) return false;
            throw;
        }
    }
    throw Error(ErrorCode::MaxStepsExceeded, "TDR did not stop");
}

// ---------------------------------------------------------------- TM

enum class Move { L, R };

struct TmAction {
    Symbol next;
    Symbol write;
    Move move;
    friend bool operator==(const TmAction&, const TmAction&) = default;
};

struct TmConfig {
    Symbol state;
    Word left;  // nearest the head first
    Word right; // right[0] is under the head
    friend bool operator==(const TmConfig&, const TmConfig&) = default;
};

struct TM {
    Word states;
    Word tape_alphabet;
    Word input_alphabet;
    Symbol start;
    Symbol blank = default_blank;
    std::set<Symbol> halting;
    std::map<std::pair<Symbol, Symbol>, TmAction> delta;

    void validate() const {
        detail::require_distinct(states, "TM states");
        detail::require_distinct(tape_alphabet, "TM tape alphabet");
        detail::require_disjoint(states, tape_alphabet, "TM states and tape symbols");
        const auto q = detail::to_set(states), n = detail::to_set(tape_alphabet);
        detail::require_member(n, blank, "blank");
        detail::require_member(q, start, "start state");
        for (const auto& s : input_alphabet) {
            detail::require_member(n, s, "input symbol");
            if (s == blank) throw Error(ErrorCode::InvalidMachine, "input alphabet contains the blank");
        }
        for (const auto& s : halting) detail::require_member(q, s, "halting state");
        for (const auto& [key, action] : delta) {
            detail::require_member(q, key.first, "state");
            detail::require_member(n, key.second, "tape symbol");
            detail::require_member(q, action.next, "state");
            detail::require_member(n, action.write, "tape symbol");
            if (halting.count(key.first))
                throw Error(ErrorCode::InvalidMachine, "halting state " + key.first + " has a transition");
        }
    }

    TmConfig canonical(TmConfig c) const {
        c.left = detail::strip_trailing(std::move(c.left), blank);
        c.right = detail::strip_trailing(std::move(c.right), blank);
        return c;
    }

    TmConfig initial(Word input) const { return canonical(TmConfig{start, {}, std::move(input)}); }
};

inline TmConfig step_tm(const TM& m, const TmConfig& c) {
    if (m.halting.count(c.state)) throw Error(ErrorCode::Halted, "TM halted in " + c.state);
    const Symbol& read = c.right.empty() ? m.blank : c.right.front();
    auto it = m.delta.find({c.state, read});
    if (it == m.delta.end())
        throw Error(ErrorCode::UndefinedTransition, "no transition from " + c.state + " on " + read);
    const TmAction& a = it->second;
    TmConfig out{a.next, c.left, c.right.empty() ? Word{} : Word(c.right.begin() + 1, c.right.end())};
    if (a.move == Move::R) {
        out.left.insert(out.left.begin(), a.write);
    } else {
        out.right.insert(out.right.begin(), a.write);
        const Symbol moved = out.left.empty() ? m.blank : out.left.front();
        if (!out.left.empty()) out.left.erase(out.left.begin());
        out.right.insert(out.right.begin(), moved);
    }
    return m.canonical(std::move(out));
}

// ---------------------------------------------------------------- machine variant

using Machine = std::variant<FSM, PDA, TDR, TM>;
using MachineConfiguration = std::variant<FsmConfig, PdaConfig, TdrConfig, TmConfig>;

enum class MachineKind { Fsm, Pda, Tdr, Tm };

inline MachineKind kind_of(const Machine& m) { return static_cast<MachineKind>(m.index()); }

inline std::string_view to_string(MachineKind k) {
    switch (k) {
    case MachineKind::Fsm: return "fsm";
    case MachineKind::Pda: return "pda";
    case MachineKind::Tdr: return "tdr";
    case MachineKind::Tm: return "tm";
    }
    return "?";
}

/// Compilation switches shared by the VS constructions.
struct VsOptions {
    bool read_only_input = false;   // FSM: re-emit the input symbol instead of consuming it
    bool identity_halting = false;  // TM: halting states become fixed points
};

/// Axis encodings the compiler uses unless the caller supplies its own.
struct EncodingPair {
    AxisEncoding x;
    AxisEncoding y;
};

inline Symbol fsm_left_fill(const FSM& m) { return m.blank.value_or(default_blank); }

inline EncodingPair default_encodings(const Machine& machine) {
    return std::visit(
        [](const auto& m) -> EncodingPair {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FSM>) {
                Word input = m.input_alphabet;
                if (m.blank) input.insert(input.begin(), *m.blank);
                return {AxisEncoding(GammaMap(m.states), GammaMap(Word{fsm_left_fill(m)})),
                        AxisEncoding(GammaMap(input))};
            } else if constexpr (std::is_same_v<T, PDA>) {
                return {AxisEncoding(GammaMap(m.states),
                                     GammaMap(detail::concat(Word{m.blank}, m.stack_alphabet))),
                        AxisEncoding(GammaMap(detail::concat(Word{m.blank}, m.input_alphabet)))};
            } else if constexpr (std::is_same_v<T, TDR>) {
                const auto& g = m.grammar();
                return {AxisEncoding(GammaMap(
                            detail::concat(detail::concat(Word{m.blank()}, g.nonterminals), g.terminals))),
                        AxisEncoding(GammaMap(detail::concat(Word{m.blank()}, g.terminals)))};
            } else {
                Word tape{m.blank};
                for (const auto& s : m.tape_alphabet)
                    if (s != m.blank) tape.push_back(s);
                return {AxisEncoding(GammaMap(m.states), GammaMap(tape)), AxisEncoding(GammaMap(tape))};
            }
        },
        machine);
}

/// All symbols a compiled shift may see, fills included.
inline Alphabet vs_alphabet(const Machine& machine) {
    const EncodingPair enc = default_encodings(machine);
    Word symbols;
    std::set<Symbol> seen;
    auto add = [&](const GammaMap& g) {
        for (const auto& s : g.symbols())
            if (seen.insert(s).second) symbols.push_back(s);
    };
    if (enc.x.head()) add(*enc.x.head());
    add(enc.x.tail());
    add(enc.y.tail());
    return Alphabet(std::move(symbols));
}

inline DottedSequence encode_configuration(const Machine& machine, const MachineConfiguration& config) {
    const EncodingPair enc = default_encodings(machine);
    const Symbol& fl = enc.x.fill();
    const Symbol& fr = enc.y.fill();
    if (machine.index() != config.index())
        throw Error(ErrorCode::MalformedConfiguration, "configuration kind does not match the machine");
    return std::visit(
        [&](const auto& c) -> DottedSequence {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, FsmConfig>) {
                return DottedSequence({c.state}, c.input, fl, fr);
            } else if constexpr (std::is_same_v<T, PdaConfig>) {
                return DottedSequence(detail::concat(Word{c.state}, c.stack), c.input, fl, fr);
            } else if constexpr (std::is_same_v<T, TdrConfig>) {
                return DottedSequence(c.stack, c.input, fl, fr);
            } else {
                return DottedSequence(detail::concat(Word{c.state}, c.left), c.right, fl, fr);
            }
        },
        config);
}

namespace detail {

inline void require_word_over(const Word& w, const std::set<Symbol>& allowed, const std::string& what) {
    for (const auto& s : w)
        if (!allowed.count(s))
            throw Error(ErrorCode::MalformedConfiguration, what + " holds unexpected symbol '" + s + "'");
}

inline const Symbol& leading_state(const DottedSequence& s, const Word& states) {
    if (s.left().empty() || std::find(states.begin(), states.end(), s.left().front()) == states.end())
        throw Error(ErrorCode::MalformedConfiguration, "index -1 of '" + s.str() + "' is not a state");
    return s.left().front();
}

} // namespace detail

inline MachineConfiguration decode_configuration(const Machine& machine, const DottedSequence& s) {
    return std::visit(
        [&](const auto& m) -> MachineConfiguration {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FSM>) {
                const Symbol q = detail::leading_state(s, m.states);
                if (s.left().size() != 1)
                    throw Error(ErrorCode::MalformedConfiguration, "FSM left side holds more than a state");
                detail::require_word_over(s.right(), detail::to_set(m.input_alphabet), "FSM input");
                return FsmConfig{q, s.right()};
            } else if constexpr (std::is_same_v<T, PDA>) {
                const Symbol q = detail::leading_state(s, m.states);
                Word stack(s.left().begin() + 1, s.left().end());
                detail::require_word_over(stack, detail::to_set(m.stack_alphabet), "PDA stack");
                detail::require_word_over(s.right(), detail::to_set(m.input_alphabet), "PDA input");
                return PdaConfig{q, std::move(stack), s.right()};
            } else if constexpr (std::is_same_v<T, TDR>) {
                const auto& g = m.grammar();
                detail::require_word_over(s.left(), detail::to_set(detail::concat(g.nonterminals, g.terminals)),
                                          "TDR stack");
                detail::require_word_over(s.right(), detail::to_set(g.terminals), "TDR input");
                return TdrConfig{s.left(), s.right()};
            } else {
                const Symbol q = detail::leading_state(s, m.states);
                const auto tape = detail::to_set(m.tape_alphabet);
                Word left(s.left().begin() + 1, s.left().end());
                detail::require_word_over(left, tape, "TM tape");
                detail::require_word_over(s.right(), tape, "TM tape");
                return m.canonical(TmConfig{q, std::move(left), s.right()});
            }
        },
        machine);
}

inline MachineConfiguration step(const Machine& machine, const MachineConfiguration& config) {
    if (machine.index() != config.index())
        throw Error(ErrorCode::MalformedConfiguration, "configuration kind does not match the machine");
    switch (machine.index()) {
    case 0: return step_fsm(std::get<FSM>(machine), std::get<FsmConfig>(config));
    case 1: return step_pda(std::get<PDA>(machine), std::get<PdaConfig>(config));
    case 2: return step_tdr(std::get<TDR>(machine), std::get<TdrConfig>(config));
    default: return step_tm(std::get<TM>(machine), std::get<TmConfig>(config));
    }
}

// ---------------------------------------------------------------- VS compilers

inline VersatileShift fsm_to_vs(const FSM& m, const VsOptions& opts = {}) {
    m.validate();
    VersatileShift vs(vs_alphabet(m), DoD(-2, 1));
    for (const auto& [key, next] : m.delta) {
        const auto& [q, d] = key;
        vs.add_rule(DottedWord{{q}, {d}},
                    ShiftRule{DottedWord{{next}, opts.read_only_input ? Word{d} : Word{}}, 0});
    }
    return vs;
}

inline VersatileShift pda_to_vs(const PDA& m) {
    m.validate();
    VersatileShift vs(vs_alphabet(m), DoD(-3, 1));
    const Word index0 = detail::concat(Word{m.blank}, m.input_alphabet);
    for (const auto& [key, action] : m.delta) {
        const auto& [q, in, top] = key;
        const Word left = action.push ? Word{top, *action.push, action.next} : Word{action.next};
        if (!in.empty()) {
            vs.add_rule(DottedWord{{top, q}, {in}}, ShiftRule{DottedWord{left, {}}, 0});
        } else {
            for (const auto& a : index0)
                vs.add_rule(DottedWord{{top, q}, {a}}, ShiftRule{DottedWord{left, {a}}, 0});
        }
    }
    return vs;
}

inline VersatileShift tdr_to_vs(const TDR& m) {
    VersatileShift vs(vs_alphabet(m), DoD(-2, 1));
    for (const auto& a : m.grammar().terminals) vs.add_rule(DottedWord{{a}, {a}}, ShiftRule{DottedWord{}, 0});
    for (const auto& [key, idx] : m.table()) {
        const auto& [x, a] = key;
        // The stack is written bottom-to-top, so rhs[0] ends next to the dot.
        vs.add_rule(DottedWord{{x}, {a}}, ShiftRule{DottedWord{reversed(m.grammar().rules[idx].rhs), {a}}, 0});
    }
    return vs;
}

inline VersatileShift tm_to_vs(const TM& m, const VsOptions& opts = {}) {
    m.validate();
    VersatileShift vs(vs_alphabet(m), DoD(-3, 1));
    for (const auto& [key, action] : m.delta) {
        const auto& [q, d0] = key;
        for (const auto& dm1 : m.tape_alphabet) {
            if (action.move == Move::R)
                vs.add_rule(DottedWord{{dm1, q}, {d0}},
                            ShiftRule{DottedWord{{dm1, action.write}, {action.next}}, -1});
            else
                vs.add_rule(DottedWord{{dm1, q}, {d0}},
                            ShiftRule{DottedWord{{action.next, dm1}, {action.write}}, +1});
        }
    }
    if (opts.identity_halting) {
        for (const auto& h : m.halting)
            for (const auto& dm1 : m.tape_alphabet)
                for (const auto& d0 : m.tape_alphabet)
                    vs.add_rule(DottedWord{{dm1, h}, {d0}}, ShiftRule{DottedWord{{dm1, h}, {d0}}, 0});
    }
    return vs;
}

inline VersatileShift to_vs(const Machine& machine, const VsOptions& opts = {}) {
    switch (machine.index()) {
    case 0: return fsm_to_vs(std::get<FSM>(machine), opts);
    case 1: return pda_to_vs(std::get<PDA>(machine));
    case 2: return tdr_to_vs(std::get<TDR>(machine));
    default: return tm_to_vs(std::get<TM>(machine), opts);
    }
}

} // namespace shiftnet
