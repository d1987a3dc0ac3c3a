#pragma once

#include "shiftnet/automata.hpp"
#include "shiftnet/error.hpp"
#include "shiftnet/godel.hpp"
#include "shiftnet/interactive.hpp"
#include "shiftnet/nda.hpp"
#include "shiftnet/pipeline.hpp"
#include "shiftnet/rann.hpp"
#include "shiftnet/symbolic.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace shiftnet::spec {

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
    friend bool operator==(const Entry& a, const Entry& b) { return a.key == b.key && a.value == b.value; }
};

/// One document of a spec file: ordered `key: value` lines.
struct Section {
    std::vector<Entry> entries;

    std::vector<const Entry*> all(std::string_view key) const {
        std::vector<const Entry*> out;
        for (const auto& e : entries)
            if (e.key == key) out.push_back(&e);
        return out;
    }

    const Entry* find(std::string_view key) const {
        const Entry* hit = nullptr;
        for (const auto& e : entries) {
            if (e.key != key) continue;
            if (hit) throw Error(ErrorCode::SemanticError, "line " + std::to_string(e.line) + ": '" +
                                                               std::string(key) + "' given twice");
            hit = &e;
        }
        return hit;
    }

    const Entry& require(std::string_view key) const {
        const Entry* e = find(key);
        if (!e) throw Error(ErrorCode::SemanticError, "missing '" + std::string(key) + "'");
        return *e;
    }

    friend bool operator==(const Section&, const Section&) = default;
};

struct SpecDocument {
    std::vector<Section> sections;
    friend bool operator==(const SpecDocument&, const SpecDocument&) = default;
};

inline std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::string normalize(std::string_view text) {
    std::string out;
    for (const auto& t : split_ws(text)) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

/// Lines are `key: value`; `#` starts a comment; `---` starts a new document.
inline SpecDocument parse_spec(std::string_view text) {
    SpecDocument doc;
    doc.sections.emplace_back();
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string line(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string trimmed = normalize(line);
        if (trimmed.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (trimmed == "---") {
            doc.sections.emplace_back();
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column 1: expected 'key: value'");
        const std::string key = normalize(line.substr(0, colon));
        if (key.empty() || key.find(' ') != std::string::npos) {
            const auto col = line.find_first_not_of(" \t") + 1;
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                                                   ": malformed key '" + key + "'");
        }
        doc.sections.back().entries.push_back(Entry{key, normalize(line.substr(colon + 1)), line_no});
        if (end == text.size()) break;
    }
    std::erase_if(doc.sections, [](const Section& s) { return s.entries.empty(); });
    return doc;
}

inline std::string render(const SpecDocument& doc) {
    std::string out;
    for (std::size_t s = 0; s < doc.sections.size(); ++s) {
        if (s != 0) out += "---\n";
        for (const auto& e : doc.sections[s].entries) out += e.key + ": " + e.value + "\n";
    }
    return out;
}

// ---------------------------------------------------------------- semantic layer

namespace detail {

[[noreturn]] inline void fail(const Entry& e, const std::string& why) {
    throw Error(ErrorCode::SemanticError, "line " + std::to_string(e.line) + ": " + why);
}

inline Word words(const Section& s, std::string_view key) {
    const Entry* e = s.find(key);
    return e ? split_ws(e->value) : Word{};
}

inline GammaMap gamma_pairs(const Entry& e, std::string_view text) {
    std::vector<std::pair<Symbol, long>> pairs;
    for (const auto& tok : split_ws(text)) {
        const auto eq = tok.rfind('=');
        if (eq == std::string::npos || eq == 0) fail(e, "expected symbol=code, got '" + tok + "'");
        try {
            pairs.emplace_back(tok.substr(0, eq), std::stol(tok.substr(eq + 1)));
        } catch (const std::exception&) {
            fail(e, "bad code in '" + tok + "'");
        }
    }
    try {
        return GammaMap::from_pairs(pairs);
    } catch (const Error& err) {
        fail(e, err.what());
    }
}

/// "a=0 b=1" for a plain axis, "q=0 r=1 | a=0 b=1" for a refined one.
inline AxisEncoding axis_from(const Entry& e, std::string_view text) {
    const auto bar = text.find('|');
    if (bar == std::string_view::npos) return AxisEncoding(gamma_pairs(e, text));
    return AxisEncoding(gamma_pairs(e, text.substr(0, bar)), gamma_pairs(e, text.substr(bar + 1)));
}

inline std::optional<AxisEncoding> axis_override(const Section& s, const std::string& axis) {
    const Entry* plain = s.find("gamma_" + axis);
    const Entry* head = s.find("gamma_" + axis + "_states");
    if (!plain && !head) return std::nullopt;
    if (!plain) fail(*head, "gamma_" + axis + "_states needs gamma_" + axis);
    if (head) return AxisEncoding(gamma_pairs(*head, head->value), gamma_pairs(*plain, plain->value));
    return AxisEncoding(gamma_pairs(*plain, plain->value));
}

inline bool flag(const Section& s, std::string_view key) {
    const Entry* e = s.find(key);
    if (!e) return false;
    if (e->value == "true" || e->value == "yes" || e->value == "identity") return true;
    if (e->value == "false" || e->value == "no") return false;
    fail(*e, "expected true or false");
}

inline std::pair<Word, Word> arrow(const Entry& e) {
    const auto pos = e.value.find("->");
    if (pos == std::string::npos) fail(e, "expected '->'");
    return {split_ws(e.value.substr(0, pos)), split_ws(e.value.substr(pos + 2))};
}

inline FSM fsm_from(const Section& s) {
    FSM m;
    m.states = words(s, "states");
    m.input_alphabet = words(s, "input_alphabet");
    m.start = s.require("start").value;
    for (const auto& q : words(s, "accept")) m.accepting.insert(q);
    if (const Entry* b = s.find("blank")) m.blank = b->value;
    for (const Entry* e : s.all("transition")) {
        auto [lhs, rhs] = arrow(*e);
        if (lhs.size() != 2 || rhs.size() != 1) fail(*e, "FSM transitions read 'q a -> q2'");
        if (!m.delta.emplace(std::make_pair(lhs[0], lhs[1]), rhs[0]).second)
            throw Error(ErrorCode::NondeterministicMachine, "line " + std::to_string(e->line) + ": duplicate transition");
    }
    return m;
}

inline PDA pda_from(const Section& s) {
    PDA m;
    m.states = words(s, "states");
    m.stack_alphabet = words(s, "stack_alphabet");
    m.input_alphabet = words(s, "input_alphabet");
    m.start = s.require("start").value;
    for (const auto& q : words(s, "accept")) m.accepting.insert(q);
    if (const Entry* b = s.find("blank")) m.blank = b->value;
    for (const Entry* e : s.all("transition")) {
        auto [lhs, rhs] = arrow(*e);
        if (lhs.size() != 3) fail(*e, "PDA transitions read 'q a|eps top -> q2 push x|pop'");
        PdaAction action;
        if (rhs.size() == 2 && rhs[1] == "pop") {
            action = PdaAction{rhs[0], std::nullopt};
        } else if (rhs.size() == 3 && rhs[1] == "push") {
            action = PdaAction{rhs[0], rhs[2]};
        } else {
            fail(*e, "PDA transitions end in 'push x' or 'pop'");
        }
        const Symbol in = lhs[1] == "eps" ? Symbol{} : lhs[1];
        if (!m.delta.emplace(std::make_tuple(lhs[0], in, lhs[2]), action).second)
            throw Error(ErrorCode::NondeterministicMachine, "line " + std::to_string(e->line) + ": duplicate transition");
    }
    return m;
}

inline TDR tdr_from(const Section& s) {
    CFG g;
    g.nonterminals = words(s, "nonterminals");
    g.terminals = words(s, "terminals");
    g.start = s.require("start").value;
    for (const Entry* e : s.all("rule")) {
        auto [lhs, rhs] = arrow(*e);
        if (lhs.size() != 1) fail(*e, "grammar rules read 'X -> w'");
        g.rules.push_back(CfgRule{lhs[0], rhs});
    }
    const Entry* b = s.find("blank");
    return TDR(std::move(g), b ? b->value : default_blank);
}

inline TM tm_from(const Section& s) {
    TM m;
    m.states = words(s, "states");
    m.tape_alphabet = words(s, "tape_alphabet");
    m.input_alphabet = words(s, "input_alphabet");
    m.start = s.require("start").value;
    if (const Entry* b = s.find("blank")) m.blank = b->value;
    for (const auto& q : words(s, "halt")) m.halting.insert(q);
    for (const Entry* e : s.all("transition")) {
        auto [lhs, rhs] = arrow(*e);
        if (lhs.size() != 2 || rhs.size() != 3 || (rhs[2] != "L" && rhs[2] != "R"))
            fail(*e, "TM transitions read 'q a -> q2 b L|R'");
        const TmAction action{rhs[0], rhs[1], rhs[2] == "L" ? Move::L : Move::R};
        if (!m.delta.emplace(std::make_pair(lhs[0], lhs[1]), action).second)
            throw Error(ErrorCode::NondeterministicMachine, "line " + std::to_string(e->line) + ": duplicate transition");
    }
    return m;
}

inline VersatileShift vs_from(const Section& s) {
    const Alphabet a(words(s, "alphabet"), s.find("blank") ? std::optional<Symbol>(s.find("blank")->value) : std::nullopt);
    const auto dod_words = split_ws(s.require("dod").value);
    if (dod_words.size() != 2) fail(s.require("dod"), "dod reads 'k_l k_r'");
    VersatileShift vs(a, DoD(std::stoi(dod_words[0]), std::stoi(dod_words[1])));
    for (const Entry* e : s.all("rule")) {
        std::string value = e->value;
        long shift = 0;
        if (const auto at = value.rfind(" shift "); at != std::string::npos) {
            try {
                shift = std::stol(value.substr(at + 7));
            } catch (const std::exception&) {
                fail(*e, "bad shift");
            }
            value.erase(at);
        }
        const auto pos = value.find("->");
        if (pos == std::string::npos) fail(*e, "rules read 'u . v -> u2 . v2 [shift F]'");
        vs.add_rule(DottedWord::parse(value.substr(0, pos), a),
                    ShiftRule{DottedWord::parse(value.substr(pos + 2), a), shift});
    }
    return vs;
}

} // namespace detail

/// A single machine or shift with its three compiled stages.
struct MachineBundle {
    std::string name;
    std::optional<Machine> machine;
    VsOptions options;
    VersatileShift vs;
    EncodingPair encodings;
    NDA nda;
    Network network;
    std::optional<DottedSequence> init;

    CompiledMachine compiled() const {
        if (!machine) throw Error(ErrorCode::SemanticError, "a bare shift has no symbolic machine");
        return CompiledMachine{*machine, options, vs, encodings, nda, network};
    }
};

struct InteractiveBundle {
    std::string name;
    InteractiveNetwork network;
    TapeWords rest;
    std::string x_tape;
    std::string y_tape;
    std::size_t onset = 2;
};

using Compiled = std::variant<MachineBundle, InteractiveBundle>;

namespace detail {

struct Component {
    std::optional<Machine> machine;
    VsOptions options;
    VersatileShift vs;
    std::optional<EncodingPair> encodings;
    bool complete = false;
};

inline Component component_from(const Section& s) {
    Component c;
    const std::string type = s.require("type").value;
    c.options.read_only_input = flag(s, "read_only_input");
    c.options.identity_halting = flag(s, "identity_halting");
    c.complete = flag(s, "complete");
    if (type == "fsm") c.machine = fsm_from(s);
    else if (type == "pda") c.machine = pda_from(s);
    else if (type == "tdr") c.machine = tdr_from(s);
    else if (type == "tm") c.machine = tm_from(s);
    else if (type == "vs") c.vs = vs_from(s);
    else fail(s.require("type"), "unknown type '" + type + "'");
    if (c.machine) c.vs = to_vs(*c.machine, c.options);
    const auto gx = axis_override(s, "x");
    const auto gy = axis_override(s, "y");
    if (c.machine) {
        EncodingPair enc = default_encodings(*c.machine);
        if (gx) {
            if (gx->fill() != enc.x.fill()) fail(*s.find("gamma_x"), "code 0 must stay on '" + enc.x.fill() + "'");
            enc.x = *gx;
        }
        if (gy) {
            if (gy->fill() != enc.y.fill()) fail(*s.find("gamma_y"), "code 0 must stay on '" + enc.y.fill() + "'");
            enc.y = *gy;
        }
        c.encodings = enc;
    } else if (gx && gy) {
        c.encodings = EncodingPair{*gx, *gy};
    }
    return c;
}

inline Alphabet merged(const Alphabet& a, const std::vector<Tape>& tapes) {
    Word all = a.symbols();
    std::set<Symbol> seen(all.begin(), all.end());
    for (const auto& t : tapes) {
        std::vector<const GammaMap*> maps{&t.encoding.tail()};
        if (t.encoding.head()) maps.push_back(&*t.encoding.head());
        for (const GammaMap* g : maps)
            for (const auto& sym : g->symbols())
                if (seen.insert(sym).second) all.push_back(sym);
    }
    return Alphabet(all, a.blank());
}

inline InteractiveBundle interactive_from(const SpecDocument& doc) {
    const Section& top = doc.sections.front();
    TapeWords rest;
    std::string x_tape, y_tape;
    std::size_t onset = 2;
    std::vector<Tape> tapes;
    for (const Entry* e : top.all("tape")) {
        const auto toks = split_ws(e->value);
        if (toks.size() < 2) fail(*e, "tapes read 'name sym=code ...'");
        tapes.push_back(Tape{toks[0], axis_from(*e, e->value.substr(toks[0].size()))});
    }
    std::map<std::string, const Section*> named;
    for (std::size_t i = 1; i < doc.sections.size(); ++i) {
        const Entry& n = doc.sections[i].require("name");
        if (!named.emplace(n.value, &doc.sections[i]).second) fail(n, "component '" + n.value + "' defined twice");
    }
    std::vector<StageSpec> stages;
    std::map<std::string, std::size_t> stage_index;
    for (const Entry* e : top.all("stage")) {
        const auto toks = split_ws(e->value);
        StageSpec st;
        if (toks.size() == 3 && toks[1] == "gate") st.gate_tape = toks[2];
        else if (toks.size() != 1) fail(*e, "stages read 'name [gate tape]'");
        stage_index[toks[0]] = stages.size();
        stages.push_back(std::move(st));
    }
    for (const Entry* e : top.all("component")) {
        const auto toks = split_ws(e->value);
        std::map<std::string, std::string> kv;
        if (toks.empty() || toks.size() % 2 == 0) fail(*e, "components read 'name stage S x T y T writes x|y|xy [gate g]'");
        for (std::size_t i = 1; i + 1 < toks.size(); i += 2) kv[toks[i]] = toks[i + 1];
        for (const char* k : {"stage", "x", "y", "writes"})
            if (!kv.count(k)) fail(*e, std::string("component needs '") + k + "'");
        if (!stage_index.count(kv["stage"])) fail(*e, "unknown stage '" + kv["stage"] + "'");
        if (!named.count(toks[0])) fail(*e, "no document named '" + toks[0] + "'");
        Component c = component_from(*named[toks[0]]);
        ComponentBinding b;
        b.name = toks[0];
        b.x_tape = kv["x"];
        b.y_tape = kv["y"];
        b.writes_x = kv["writes"].find('x') != std::string::npos;
        b.writes_y = kv["writes"].find('y') != std::string::npos;
        if (kv.count("gate")) b.gate = kv["gate"];
        VersatileShift vs = c.vs;
        VersatileShift wide(merged(vs.alphabet(), tapes), vs.dod());
        for (const auto& [key, rule] : vs.rules()) wide.add_rule(key, rule);
        const Tape* tx = nullptr;
        const Tape* ty = nullptr;
        for (const auto& t : tapes) {
            if (t.name == b.x_tape) tx = &t;
            if (t.name == b.y_tape) ty = &t;
        }
        if (!tx || !ty) fail(*e, "unknown tape");
        b.vs = c.complete ? complete_with_identity(wide, tx->encoding, ty->encoding) : wide;
        stages[stage_index[kv["stage"]]].components.push_back(std::move(b));
    }
    for (const Entry* e : top.all("rest")) {
        const auto toks = split_ws(e->value);
        if (toks.empty()) fail(*e, "rest reads 'tape symbols...'");
        rest[toks[0]] = Word(toks.begin() + 1, toks.end());
    }
    if (const Entry* e = top.find("stimulus")) {
        const auto toks = split_ws(e->value);
        if (toks.size() != 2) fail(*e, "stimulus reads 'x-tape y-tape'");
        x_tape = toks[0];
        y_tape = toks[1];
    }
    if (const Entry* e = top.find("onset")) onset = std::stoul(e->value);
    InteractiveBundle out{top.find("name") ? top.find("name")->value : "interactive",
                          build_ian(std::move(tapes), std::move(stages)), std::move(rest), std::move(x_tape),
                          std::move(y_tape), onset};
    for (const auto& t : out.network.tapes()) {
        out.rest[t.name];
        for (const auto& sym : out.rest[t.name])
            if (!t.encoding.tail().contains(sym) && !(t.encoding.head() && t.encoding.head()->contains(sym)))
                throw Error(ErrorCode::SemanticError, "rest symbol '" + sym + "' is not on tape " + t.name);
    }
    if (!out.x_tape.empty()) {
        out.network.tape(out.x_tape);
        out.network.tape(out.y_tape);
    }
    return out;
}

} // namespace detail

inline Compiled compile_spec(const SpecDocument& doc) {
    if (doc.sections.empty()) throw Error(ErrorCode::SemanticError, "empty spec");
    const Section& top = doc.sections.front();
    if (top.require("type").value == "interactive") return detail::interactive_from(doc);
    if (doc.sections.size() != 1) throw Error(ErrorCode::SemanticError, "only interactive specs hold several documents");
    detail::Component c = detail::component_from(top);
    if (!c.encodings) throw Error(ErrorCode::SemanticError, "a bare shift needs gamma_x and gamma_y");
    MachineBundle b;
    b.name = top.find("name") ? top.find("name")->value : std::string(top.require("type").value);
    b.machine = c.machine;
    b.options = c.options;
    b.vs = c.complete ? complete_with_identity(c.vs, c.encodings->x, c.encodings->y) : c.vs;
    b.encodings = *c.encodings;
    b.nda = vs_to_nda(b.vs, b.encodings.x, b.encodings.y);
    b.network = nda_to_rann(b.nda);
    if (const Entry* e = top.find("init")) {
        b.init = DottedSequence::from_written(DottedWord::parse(e->value, b.vs.alphabet()), b.encodings.x.fill(),
                                              b.encodings.y.fill());
    }
    return b;
}

inline Compiled compile_spec(std::string_view text) { return compile_spec(parse_spec(text)); }

// ---------------------------------------------------------------- bundled examples

inline constexpr std::string_view cpg_text = R"(# Four-legged gait generator: walk on <lo>, gallop on <hi>.
type: fsm
name: cpg
states: q1 q2 q3 q4
input_alphabet: <lo> <hi>
start: q1
transition: q1 <lo> -> q3
transition: q2 <lo> -> q4
transition: q3 <lo> -> q2
transition: q4 <lo> -> q1
transition: q1 <hi> -> q2
transition: q2 <hi> -> q3
transition: q3 <hi> -> q4
transition: q4 <hi> -> q1
gamma_x_states: q1=0 q2=1 q3=2 q4=3
gamma_x: _=0
gamma_y: <lo>=0 <hi>=1
init: q1 . <lo>
)";

inline constexpr std::string_view tm_text = R"(# Two-step machine: wq0.ord -> waq1.rd -> wq1.and
type: tm
name: tm
states: q0 q1
tape_alphabet: _ w o r d a n
input_alphabet: w o r d a n
blank: _
start: q0
transition: q0 o -> q1 a R
transition: q1 r -> q1 n L
init: w q0 . o r d
)";

inline std::string garden_path_text() {
    std::string t = R"(# Garden-path parser: two recognizers, a repair shift, diagnosis and strategy.
type: interactive
name: garden-path
tape: input _=0 S=1 o=2 s=3
tape: parse _=0 o=1 s=2 S=3
tape: diagnosis idle=0 parsing=1 error=2 | _=0 o=1 s=2 S=3
tape: strategy s-o=0 o-s=1 repair=2
stage: parser gate strategy
stage: diagnose
stage: control
component: s-o stage parser x parse y input writes xy gate s-o
component: o-s stage parser x parse y input writes xy gate o-s
component: repair stage parser x parse y input writes xy gate repair
component: diagnosis stage diagnose x diagnosis y parse writes x
component: strategy stage control x strategy y diagnosis writes x
rest: diagnosis idle
rest: strategy s-o
stimulus: parse input
onset: 2
---
name: s-o
type: tdr
nonterminals: S
terminals: s o
start: S
rule: S -> s o
complete: true
---
name: o-s
type: tdr
nonterminals: S
terminals: s o
start: S
rule: S -> o s
complete: true
---
name: repair
type: vs
alphabet: _ o s S
dod: -3 1
)";
    for (const char* w : {"_", "S", "o", "s"})
        t += std::string("rule: o s . ") + w + " -> s o . " + w + "\n";
    t += "complete: true\n---\nname: diagnosis\ntype: vs\nalphabet: _ o s S idle parsing error\ndod: -3 1\n";
    const char* parse[] = {"_", "o", "s", "S"};
    for (const char* prev : parse)
        for (const char* q : {"idle", "parsing", "error"})
            for (const char* cur : parse) {
                const std::string p = prev, c = cur;
                const char* next = (p == "_" && c == "_") ? "idle" : (p == c ? "error" : "parsing");
                t += "rule: " + p + " " + q + " . " + c + " -> " + c + " " + next + " . " + c + "\n";
            }
    t += R"(---
name: strategy
type: fsm
states: s-o o-s repair
input_alphabet: idle parsing error
start: s-o
transition: s-o idle -> s-o
transition: o-s idle -> s-o
transition: repair idle -> s-o
transition: s-o parsing -> s-o
transition: o-s parsing -> o-s
transition: repair parsing -> o-s
transition: s-o error -> repair
transition: o-s error -> o-s
transition: repair error -> o-s
read_only_input: true
)";
    return t;
}

inline std::optional<std::string> example_text(std::string_view name) {
    if (name == "cpg") return std::string(cpg_text);
    if (name == "tm") return std::string(tm_text);
    if (name == "garden-path") return garden_path_text();
    return std::nullopt;
}

} // namespace shiftnet::spec
