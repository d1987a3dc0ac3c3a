#include "shiftnet/automata.hpp"
#include "shiftnet/spec_format.hpp"
#include "matchers.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <functional>

using namespace shiftnet;
using testing::has_code;

namespace {

FSM cpg() { return std::get<FSM>(*std::get<spec::MachineBundle>(spec::compile_spec(spec::cpg_text)).machine); }

TM word_tm() {
    TM m;
    m.states = {"q0", "q1"};
    m.tape_alphabet = {"_", "w", "o", "r", "d", "a", "n"};
    m.input_alphabet = {"w", "o", "r", "d", "a", "n"};
    m.start = "q0";
    m.delta[{"q0", "o"}] = TmAction{"q1", "a", Move::R};
    m.delta[{"q1", "r"}] = TmAction{"q1", "n", Move::L};
    return m;
}

CFG brackets() {
    return CFG{{"S"},
               {"(", ")", "[", "]"},
               {CfgRule{"S", {"(", "S", ")"}}, CfgRule{"S", {"[", "S", "]"}}, CfgRule{"S", {}}},
               "S"};
}

Word tokens(std::string_view s) {
    Word w;
    for (char c : s) w.emplace_back(1, c);
    return w;
}

/// Terminal strings reachable by leftmost derivations of at most `depth` rule uses.
std::set<Word> derivable(const CFG& g, std::size_t depth, std::size_t max_len) {
    std::set<Word> out;
    std::set<Symbol> nts(g.nonterminals.begin(), g.nonterminals.end());
    std::function<void(const Word&, std::size_t)> go = [&](const Word& form, std::size_t d) {
        auto it = std::find_if(form.begin(), form.end(), [&](const Symbol& s) { return nts.count(s) != 0; });
        if (it == form.end()) {
            out.insert(form);
            return;
        }
        std::size_t terminals = 0;
        for (const auto& s : form) terminals += nts.count(s) ? 0 : 1;
        if (d == depth || terminals > max_len) return;
        for (const auto& r : g.rules) {
            if (r.lhs != *it) continue;
            Word next(form.begin(), it);
            next.insert(next.end(), r.rhs.begin(), r.rhs.end());
            next.insert(next.end(), it + 1, form.end());
            go(next, d + 1);
        }
    };
    go({g.start}, 0);
    return out;
}

void all_words(const Word& alphabet, std::size_t max_len, const std::function<void(const Word&)>& f) {
    std::vector<Word> layer{{}};
    for (std::size_t len = 0; len <= max_len; ++len) {
        std::vector<Word> next;
        for (const auto& w : layer) {
            f(w);
            if (len == max_len) continue;
            for (const auto& s : alphabet) {
                Word v = w;
                v.push_back(s);
                next.push_back(std::move(v));
            }
        }
        layer = std::move(next);
    }
}

} // namespace

TEST_CASE("CPG transition table") {
    const FSM m = cpg();
    CHECK(step_fsm(m, FsmConfig{"q1", {"<lo>", "<hi>"}}) == FsmConfig{"q3", {"<hi>"}});
    CHECK(step_fsm(m, FsmConfig{"q4", {"<hi>"}}) == FsmConfig{"q1", {}});
    CHECK_THROWS_MATCHES(step_fsm(m, FsmConfig{"q4", {}}), Error, has_code(ErrorCode::EmptyInput));
    CHECK(fsm_to_vs(m).rules().size() == 8);
}

TEST_CASE("configurations as dotted sequences") {
    const FSM m = cpg();
    CHECK(encode_configuration(m, FsmConfig{"q1", {"<lo>", "<hi>"}}).str() == "q1 . <lo> <hi>");
    const TM tm = word_tm();
    CHECK(encode_configuration(tm, TmConfig{"q0", {"w"}, {"o", "r", "d"}}).str() == "w q0 . o r d");
    const TmConfig back = std::get<TmConfig>(
        decode_configuration(tm, encode_configuration(tm, TmConfig{"q0", {"w"}, {"o", "r", "d"}})));
    CHECK(back == TmConfig{"q0", {"w"}, {"o", "r", "d"}});
}

TEST_CASE("encode and decode configurations round trip") {
    testing::Rng rng(5);
    for (auto kind : testing::all_kinds)
        for (int k = 0; k < 40; ++k) {
            const Machine m = testing::random_machine(rng, kind);
            const MachineConfiguration c = testing::random_config(rng, m);
            INFO(to_string(kind) << " " << encode_configuration(m, c).str());
            REQUIRE(decode_configuration(m, encode_configuration(m, c)) == c);
        }
}

TEST_CASE("TM worked trace") {
    const TM m = word_tm();
    const TmConfig c1 = step_tm(m, TmConfig{"q0", {"w"}, {"o", "r", "d"}});
    CHECK(c1 == TmConfig{"q1", {"a", "w"}, {"r", "d"}});
    const TmConfig c2 = step_tm(m, c1);
    CHECK(c2 == TmConfig{"q1", {"w"}, {"a", "n", "d"}});
    CHECK_THROWS_MATCHES(step_tm(m, c2), Error, has_code(ErrorCode::UndefinedTransition));

    const VersatileShift vs = tm_to_vs(m);
    const Alphabet a = vs.alphabet();
    DottedSequence s = DottedSequence::parse("w q0 . o r d", a);
    s = apply_vs(vs, s);
    CHECK(s == DottedSequence::parse("w a q1 . r d", a));
    s = apply_vs(vs, s);
    CHECK(s == DottedSequence::parse("w q1 . a n d", a));
}

TEST_CASE("TM halting states") {
    TM m = word_tm();
    m.states.push_back("h");
    m.halting.insert("h");
    m.delta[{"q1", "a"}] = TmAction{"h", "a", Move::R};
    TmConfig c{"q1", {"w"}, {"a", "n", "d"}};
    c = step_tm(m, c);
    CHECK(c.state == "h");
    CHECK_THROWS_MATCHES(step_tm(m, c), Error, has_code(ErrorCode::Halted));
    VsOptions opts;
    opts.identity_halting = true;
    const VersatileShift vs = tm_to_vs(m, opts);
    const DottedSequence s = encode_configuration(m, c);
    CHECK(apply_vs(vs, s) == s);
    m.delta[{"h", "a"}] = TmAction{"h", "a", Move::R};
    CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("PDA pop and push") {
    PDA m;
    m.states = {"q"};
    m.stack_alphabet = {"A"};
    m.input_alphabet = {"a", "b"};
    m.start = "q";
    m.delta[{"q", "a", "_"}] = PdaAction{"q", "A"};
    m.delta[{"q", "a", "A"}] = PdaAction{"q", "A"};
    m.delta[{"q", "b", "A"}] = PdaAction{"q", std::nullopt};
    const PdaConfig c0 = m.initial({"a", "a", "b", "b"});
    const PdaConfig c1 = step_pda(m, c0);
    CHECK(c1.stack.size() == c0.stack.size() + 1);
    const PdaConfig c2 = step_pda(m, c1);
    const PdaConfig c3 = step_pda(m, c2);
    CHECK(c3.stack.size() == c2.stack.size() - 1);
    const PdaConfig c4 = step_pda(m, c3);
    CHECK(m.accepted(c4));
    CHECK_THROWS_MATCHES(step_pda(m, c4), Error, has_code(ErrorCode::Halted));

    const VersatileShift vs = pda_to_vs(m);
    DottedSequence s = encode_configuration(m, c0);
    for (const PdaConfig& c : {c1, c2, c3, c4}) {
        s = apply_vs(vs, s);
        CHECK(s == encode_configuration(m, c));
    }
}

TEST_CASE("PDA determinism is enforced") {
    PDA m;
    m.states = {"q"};
    m.stack_alphabet = {"A"};
    m.input_alphabet = {"a"};
    m.start = "q";
    m.delta[{"q", "a", "A"}] = PdaAction{"q", "A"};
    m.delta[{"q", "", "A"}] = PdaAction{"q", std::nullopt};
    CHECK_THROWS_MATCHES(m.validate(), Error, has_code(ErrorCode::NondeterministicMachine));
}

TEST_CASE("TDR rules for S -> s o") {
    const TDR m(CFG{{"S"}, {"s", "o"}, {CfgRule{"S", {"s", "o"}}}, "S"});
    const VersatileShift vs = tdr_to_vs(m);
    const Alphabet& a = vs.alphabet();
    // A single rule fires on every lookahead and keeps it.
    for (const char* look : {"s", "o", "_"}) {
        const ShiftRule* r = vs.find(DottedWord{{"S"}, {look}});
        REQUIRE(r != nullptr);
        CHECK(r->replacement == DottedWord{{"o", "s"}, {look}});
    }
    CHECK(vs.find(DottedWord::parse("s.s", a))->replacement == DottedWord{});
    CHECK(vs.find(DottedWord::parse("o.o", a))->replacement == DottedWord{});
    CHECK(vs.rules().size() == 5);
}

TEST_CASE("TDR on the bracket grammar") {
    const TDR m(brackets());
    const TdrConfig c1 = step_tdr(m, m.initial(tokens("[()]")));
    CHECK(c1.stack == tokens("[S]"));
    CHECK(c1.input == tokens("[()]"));
    CHECK(tdr_accepts(m, tokens("[()]")));
    CHECK(tdr_accepts(m, {}));
    CHECK_FALSE(tdr_accepts(m, tokens("[(])")));
    CHECK_FALSE(tdr_accepts(m, tokens("((")));
}

TEST_CASE("TDR agrees with bounded derivations") {
    const CFG g = brackets();
    const TDR m(g);
    const std::set<Word> lang = derivable(g, 5, 8);
    for (const auto& w : lang) CHECK(tdr_accepts(m, w));
    // Every accepted word of length <= 6 has a short derivation (one rule use per pair plus one).
    all_words(g.terminals, 6, [&](const Word& w) {
        if (tdr_accepts(m, w)) CHECK(derivable(g, w.size() / 2 + 1, 6).count(w) == 1);
    });
}

TEST_CASE("TDR agrees with derivations on random grammars") {
    testing::Rng rng(31);
    for (int k = 0; k < 30; ++k) {
        const TDR m = testing::random_tdr(rng);
        const CFG& g = m.grammar();
        for (const auto& w : derivable(g, 5, 6)) {
            bool ok = false;
            try {
                ok = tdr_accepts(m, w, 2000);
            } catch (const Error& e) {
                // Nullable cycles can loop forever; those words are still derivable.
                REQUIRE(e.code() == ErrorCode::MaxStepsExceeded);
                ok = true;
            }
            CHECK(ok);
        }
    }
}

TEST_CASE("grammar checks") {
    CHECK_THROWS_MATCHES(TDR(CFG{{"S"}, {"a"}, {CfgRule{"S", {"S", "a"}}, CfgRule{"S", {"a"}}}, "S"}), Error,
                         has_code(ErrorCode::LeftRecursiveGrammar));
    // Left recursion hidden behind a nullable prefix.
    CHECK_THROWS_MATCHES(TDR(CFG{{"S", "A"},
                                 {"a"},
                                 {CfgRule{"S", {"A", "S", "a"}}, CfgRule{"S", {"a"}}, CfgRule{"A", {}}},
                                 "S"}),
                         Error, has_code(ErrorCode::LeftRecursiveGrammar));
    CHECK_THROWS_MATCHES(TDR(CFG{{"S"}, {"a"}, {CfgRule{"S", {"a"}}, CfgRule{"S", {"a", "a"}}}, "S"}), Error,
                         has_code(ErrorCode::AmbiguousGrammar));
}

TEST_CASE("FSM acceptance through the compiled shift, all words up to length 8") {
    FSM m = cpg();
    m.accepting = {"q1"};
    m.delta.erase({"q3", "<hi>"});
    const VersatileShift vs = fsm_to_vs(m);
    std::size_t n = 0;
    all_words(m.input_alphabet, 8, [&](const Word& w) {
        DottedSequence s = encode_configuration(m, m.initial(w));
        bool stuck = false;
        for (std::size_t k = 0; k < w.size() && !stuck; ++k) {
            try {
                s = apply_vs(vs, s);
            } catch (const Error&) {
                stuck = true;
            }
        }
        const bool accepted = !stuck && m.accepting.count(std::get<FsmConfig>(decode_configuration(m, s)).state);
        REQUIRE(accepted == fsm_accepts(m, w));
        ++n;
    });
    CHECK(n == 511);
}

TEST_CASE("compiled shifts agree with the machines") {
    testing::Rng rng(17);
    for (auto kind : testing::all_kinds) {
        for (int k = 0; k < 25; ++k) {
            const Machine m = testing::random_machine(rng, kind);
            const VersatileShift vs = to_vs(m);
            MachineConfiguration c = testing::random_config(rng, m);
            DottedSequence s = encode_configuration(m, c);
            INFO(to_string(kind) << " from " << s.str());
            for (int t = 0; t < 10; ++t) {
                MachineConfiguration next;
                try {
                    next = step(m, c);
                } catch (const Error& e) {
                    REQUIRE(is_terminal(e.code()));
                    CHECK_THROWS_MATCHES(apply_vs(vs, s), Error, has_code(ErrorCode::NoRule));
                    break;
                }
                s = apply_vs(vs, s);
                REQUIRE(s == encode_configuration(m, next));
                c = next;
            }
        }
    }
}

TEST_CASE("read-only input keeps the FSM symbol") {
    VsOptions opts;
    opts.read_only_input = true;
    const FSM m = cpg();
    const VersatileShift vs = fsm_to_vs(m, opts);
    const DottedSequence s = encode_configuration(m, FsmConfig{"q1", {"<hi>"}});
    CHECK(apply_vs(vs, s) == encode_configuration(m, FsmConfig{"q2", {"<hi>"}}));
}

TEST_CASE("machine validation") {
    FSM m = cpg();
    m.delta[{"q9", "<lo>"}] = "q1";
    CHECK_THROWS_MATCHES(m.validate(), Error, has_code(ErrorCode::InvalidMachine));
    TM t = word_tm();
    t.input_alphabet.push_back("_");
    CHECK_THROWS_MATCHES(t.validate(), Error, has_code(ErrorCode::InvalidMachine));
}
