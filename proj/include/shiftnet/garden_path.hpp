#pragma once

#include "shiftnet/automata.hpp"
#include "shiftnet/godel.hpp"
#include "shiftnet/interactive.hpp"
#include "shiftnet/nda.hpp"
#include "shiftnet/symbolic.hpp"

#include <string>
#include <utility>
#include <vector>

namespace shiftnet::garden_path {

inline const Symbol blank = default_blank;

inline const Word parse_symbols{blank, "o", "s", "S"};
inline const Word input_symbols{blank, "S", "o", "s"};
inline const Word diagnosis_states{"idle", "parsing", "error"};
inline const Word strategy_states{"s-o", "o-s", "repair"};

inline Alphabet alphabet() {
    Word all{blank, "o", "s", "S"};
    all.insert(all.end(), diagnosis_states.begin(), diagnosis_states.end());
    all.insert(all.end(), strategy_states.begin(), strategy_states.end());
    return Alphabet(all, blank);
}

inline AxisEncoding parse_encoding() { return AxisEncoding(GammaMap(parse_symbols)); }
inline AxisEncoding input_encoding() { return AxisEncoding(GammaMap(input_symbols)); }
inline AxisEncoding diagnosis_encoding() { return AxisEncoding(GammaMap(diagnosis_states), GammaMap(parse_symbols)); }
inline AxisEncoding strategy_encoding() { return AxisEncoding(GammaMap(strategy_states)); }

/// Same rules over a larger alphabet.
inline VersatileShift rebase(const VersatileShift& vs, const Alphabet& a) {
    VersatileShift out(a, vs.dod());
    for (const auto& [key, rule] : vs.rules()) out.add_rule(key, rule);
    return out;
}

inline VersatileShift parser_shift(const Word& rhs) {
    const TDR tdr(CFG{{"S"}, {"s", "o"}, {CfgRule{"S", rhs}}, "S"}, blank);
    return complete_with_identity(rebase(tdr_to_vs(tdr), alphabet()), parse_encoding(), input_encoding());
}

/// Reanalysis: the two topmost parse symbols s, o (top first) become o, s.
inline VersatileShift repair_shift() {
    VersatileShift vs(alphabet(), DoD(-3, 1));
    for (const auto& w : input_symbols)
        vs.add_rule(DottedWord{{"o", "s"}, {w}}, ShiftRule{DottedWord{{"s", "o"}, {w}}, 0});
    return complete_with_identity(vs, parse_encoding(), input_encoding());
}

/// Compares the parse top with the one stored on top of its own stack and
/// stores the new one in its place.
inline VersatileShift diagnosis_shift() {
    VersatileShift vs(alphabet(), DoD(-3, 1));
    for (const auto& prev : parse_symbols)
        for (const auto& q : diagnosis_states)
            for (const auto& cur : parse_symbols) {
                Symbol next = "parsing";
                if (prev == blank && cur == blank) next = "idle";
                else if (prev == cur) next = "error";
                vs.add_rule(DottedWord{{prev, q}, {cur}}, ShiftRule{DottedWord{{cur, next}, {cur}}, 0});
            }
    return vs;
}

inline FSM strategy_fsm() {
    FSM m;
    m.states = strategy_states;
    m.input_alphabet = diagnosis_states;
    m.start = "s-o";
    m.delta = {
        {{"s-o", "idle"}, "s-o"},     {{"o-s", "idle"}, "s-o"},     {{"repair", "idle"}, "s-o"},
        {{"s-o", "parsing"}, "s-o"},  {{"o-s", "parsing"}, "o-s"},  {{"repair", "parsing"}, "o-s"},
        {{"s-o", "error"}, "repair"}, {{"o-s", "error"}, "o-s"},    {{"repair", "error"}, "o-s"},
    };
    return m;
}

inline VersatileShift strategy_shift() {
    VsOptions opts;
    opts.read_only_input = true;
    return rebase(fsm_to_vs(strategy_fsm(), opts), alphabet());
}

inline std::vector<Tape> tapes() {
    return {Tape{"input", input_encoding()}, Tape{"parse", parse_encoding()},
            Tape{"diagnosis", diagnosis_encoding()}, Tape{"strategy", strategy_encoding()}};
}

/// Parser group, then Diagnosis, then Strategy, each between two configuration layers.
inline InteractiveNetwork network() {
    StageSpec parser;
    parser.gate_tape = "strategy";
    parser.components.push_back(ComponentBinding{"s-o", parser_shift({"s", "o"}), "parse", "input", true, true, "s-o"});
    parser.components.push_back(ComponentBinding{"o-s", parser_shift({"o", "s"}), "parse", "input", true, true, "o-s"});
    parser.components.push_back(ComponentBinding{"repair", repair_shift(), "parse", "input", true, true, "repair"});
    StageSpec diagnosis;
    diagnosis.components.push_back(
        ComponentBinding{"diagnosis", diagnosis_shift(), "diagnosis", "parse", true, false, std::nullopt});
    StageSpec strategy;
    strategy.components.push_back(
        ComponentBinding{"strategy", strategy_shift(), "strategy", "diagnosis", true, false, std::nullopt});
    return build_ian(tapes(), {parser, diagnosis, strategy});
}

/// Idle tapes: nothing to parse, diagnosis idle, preferred strategy.
inline TapeWords rest() {
    return {{"input", {}}, {"parse", {}}, {"diagnosis", {"idle"}}, {"strategy", {"s-o"}}};
}

/// Tapes holding a sentence: stack part on the parse tape, the rest as input.
inline TapeWords presented(const DottedWord& sentence) {
    TapeWords t = rest();
    t["parse"] = reversed(sentence.left);
    t["input"] = sentence.right;
    return t;
}

} // namespace shiftnet::garden_path

namespace shiftnet::garden_path {

/// What happened while the network worked through one sentence.
struct ParseSummary {
    bool accepted = false;    // parse and input tapes both emptied
    std::size_t passes = 0;   // passes until then
    std::size_t errors = 0;   // passes ending with the diagnosis in its error state
    std::size_t repairs = 0;  // passes in which the repair component ran
    std::vector<TapeWords> tapes;
};

inline ParseSummary analyze(const InteractiveNetwork& net, const DottedWord& sentence, std::size_t max_passes = 20) {
    ParseSummary out;
    NetworkState st = init_ian(net, encode_tapes(net, presented(sentence)));
    out.tapes.push_back(decode_tapes(net, st));
    for (std::size_t k = 0; k < max_passes; ++k) {
        PassRecord rec;
        st = step_ian(net, st, {}, &rec);
        const TapeWords t = decode_tapes(net, st);
        out.tapes.push_back(t);
        ++out.passes;
        for (const auto& a : rec.active) out.repairs += a == "repair" ? 1 : 0;
        const Word& d = t.at("diagnosis");
        if (!d.empty() && d.front() == "error") ++out.errors;
        if (t.at("parse").empty() && t.at("input").empty()) {
            out.accepted = true;
            break;
        }
    }
    return out;
}

} // namespace shiftnet::garden_path
