#include "shiftnet/garden_path.hpp"
#include "shiftnet/spec_format.hpp"
#include "matchers.hpp"

#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

using namespace shiftnet;
using testing::has_code;

namespace {

std::string read(const std::string& name) {
    std::ifstream in(std::string(SHIFTNET_SPEC_DIR) + "/" + name);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorCode code_of(std::string_view text) {
    try {
        spec::compile_spec(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error for:\n" << text);
    return ErrorCode::ParseError;
}

std::string message_of(std::string_view text) {
    try {
        spec::compile_spec(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

constexpr std::string_view tiny_tm = "type: tm\nstates: q\ntape_alphabet: _ a\nblank: _\nstart: q\n";

} // namespace

TEST_CASE("parsing keeps keys, values and order") {
    const auto doc = spec::parse_spec("# comment\na: 1 2   3\n\nb:x # trailing\n---\nc : \n");
    REQUIRE(doc.sections.size() == 2);
    REQUIRE(doc.sections[0].entries.size() == 2);
    CHECK(doc.sections[0].entries[0].key == "a");
    CHECK(doc.sections[0].entries[0].value == "1 2 3");
    CHECK(doc.sections[0].entries[1].value == "x");
    CHECK(doc.sections[0].entries[1].line == 4);
    CHECK(doc.sections[1].entries[0].key == "c");
    CHECK(doc.sections[1].entries[0].value.empty());
}

TEST_CASE("render and parse are inverse") {
    for (const char* name : {"cpg", "tm", "garden-path"}) {
        const auto doc = spec::parse_spec(*spec::example_text(name));
        const std::string text = spec::render(doc);
        CHECK(spec::parse_spec(text) == doc);
        CHECK(spec::render(spec::parse_spec(text)) == text);
    }
}

TEST_CASE("syntax errors carry a position") {
    CHECK_THROWS_MATCHES(spec::parse_spec("a: 1\nstates q1\n"), Error, has_code(ErrorCode::ParseError));
    CHECK_THROWS_WITH(spec::parse_spec("a: 1\nstates q1\n"), Catch::Matchers::ContainsSubstring("line 2, column 1"));
    CHECK_THROWS_WITH(spec::parse_spec("a: 1\n  two words: x\n"), Catch::Matchers::ContainsSubstring("line 2, column 3"));
}

TEST_CASE("semantic errors") {
    CHECK(code_of("") == ErrorCode::SemanticError);
    CHECK(code_of("name: x\n") == ErrorCode::SemanticError);
    CHECK(code_of("type: fsm\ntype: fsm\n") == ErrorCode::SemanticError);
    CHECK(code_of("type: abacus\n") == ErrorCode::SemanticError);
    CHECK(code_of(std::string(tiny_tm) + "---\ntype: tm\n") == ErrorCode::SemanticError);
    CHECK(code_of(std::string(tiny_tm) + "transition: q a -> q a X\n") == ErrorCode::SemanticError);
    CHECK(code_of(std::string(tiny_tm) + "transition: q a q a R\n") == ErrorCode::SemanticError);
    // Machine-level problems keep their own codes.
    CHECK(code_of(std::string(tiny_tm) + "transition: q z -> q a R\n") != ErrorCode::ParseError);
    // A bare shift without encodings, and a rule key that does not fit its window.
    CHECK(code_of("type: vs\nalphabet: _ a\ndod: -2 1\nrule: a . a -> a . a\n") == ErrorCode::SemanticError);
    CHECK(code_of("type: vs\nalphabet: _ a\ndod: -1 1\nrule: a . a -> a . a\n") == ErrorCode::MalformedWord);
    CHECK_THAT(message_of(std::string(tiny_tm) + "transition: q a -> q a X\n"),
               Catch::Matchers::ContainsSubstring("line 6"));
}

TEST_CASE("a one-transition TM compiles and runs") {
    const auto b = std::get<spec::MachineBundle>(
        spec::compile_spec(std::string(tiny_tm) + "transition: q a -> q _ R\ninit: q . a a\n"));
    REQUIRE(b.init);
    CHECK(b.network.size() == unit_count(b.nda.m(), b.nda.n()));
    const auto r = run(b.network, init_state(b.network, godelize_dotted(*b.init, b.encodings.x, b.encodings.y).first,
                                             godelize_dotted(*b.init, b.encodings.x, b.encodings.y).second),
                       Halting::steps(5));
    CHECK(r.outcome == RunOutcome::Rejected);
    CHECK(r.steps() == 2);
}

TEST_CASE("gamma overrides") {
    const std::string base = "type: fsm\nstates: a b\ninput_alphabet: x y\nstart: a\ntransition: a x -> b\n";
    const auto b = std::get<spec::MachineBundle>(spec::compile_spec(base + "gamma_y: x=0 y=1\n"));
    CHECK(b.encodings.y.tail().code("y") == 1);
    // The fill symbol must keep code 0.
    CHECK(code_of(base + "gamma_y: x=1 y=0\n") == ErrorCode::SemanticError);
    CHECK(code_of(base + "gamma_y: x=0 y=2\n") != ErrorCode::ParseError);
}

TEST_CASE("bundled spec files match the built-in examples") {
    CHECK(read("cpg.spec") == spec::cpg_text);
    CHECK(read("tm.spec") == spec::tm_text);
    CHECK(read("garden_path.spec") == spec::garden_path_text());
    CHECK_FALSE(spec::example_text("nope"));
}

TEST_CASE("the garden-path spec builds the library network") {
    const auto b = std::get<spec::InteractiveBundle>(spec::compile_spec(spec::garden_path_text()));
    const InteractiveNetwork lib = garden_path::network();
    REQUIRE(b.network.size() == lib.size());
    REQUIRE(b.network.components().size() == lib.components().size());
    for (std::size_t c = 0; c < lib.components().size(); ++c) {
        const auto& a = b.network.components()[c];
        const auto& l = lib.components()[c];
        INFO(l.binding.name);
        CHECK(a.binding.name == l.binding.name);
        CHECK(a.binding.vs.rules() == l.binding.vs.rules());
        CHECK(a.binding.gate == l.binding.gate);
        CHECK(a.binding.writes_x == l.binding.writes_x);
        CHECK(a.binding.writes_y == l.binding.writes_y);
    }
    for (std::size_t u = 0; u < lib.size(); ++u) REQUIRE(b.network.incoming(u).size() == lib.incoming(u).size());
    CHECK(b.x_tape == "parse");
    CHECK(b.y_tape == "input");
    CHECK(b.onset == 2);
    CHECK(b.rest.at("diagnosis") == Word{"idle"});
}

TEST_CASE("interactive specs are checked") {
    const std::string head = "type: interactive\ntape: a _=0 x=1\ntape: b _=0 x=1\nstage: s\n";
    CHECK(code_of(head + "component: m stage s x a y b writes xy\n") == ErrorCode::SemanticError);
    CHECK(code_of(head + "component: m stage t x a y b writes xy\n---\nname: m\ntype: vs\nalphabet: _ x\ndod: -1 1\n") ==
          ErrorCode::SemanticError);
    CHECK(code_of(head + "rest: a y\n") == ErrorCode::SemanticError);
    CHECK(code_of(head + "tape: a _=0\n") == ErrorCode::InvalidMachine);
}
