#include "shiftnet/godel.hpp"
#include "matchers.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace shiftnet;
using testing::has_code;

namespace {

const GammaMap abc({"_", "a", "b"});
const GammaMap cpg_input({"<lo>", "<hi>"});

Rational q(long n, long d) { return make_rational(n, d); }

} // namespace

TEST_CASE("series oracles") {
    CHECK(godelize({"<hi>"}, cpg_input) == q(1, 2));
    CHECK(godelize({"a", "b", "b", "a"}, abc) == q(52, 81));
    CHECK(godelize({}, abc) == 0);
    // Trailing fill does not change the code.
    CHECK(godelize({"a", "_", "_"}, abc) == q(1, 3));
}

TEST_CASE("refined series") {
    const RefinedGammaMap r{GammaMap({"q0", "q1", "q2"}), GammaMap({"_", "o", "s"})};
    CHECK(godelize_refined({"q1", "s"}, r) == q(1, 3) + q(2, 9));
    const AxisEncoding axis(r);
    CHECK(axis.weight(0) == 1);
    CHECK(axis.weight(1) == q(1, 3));
    CHECK(axis.weight(3) == q(1, 27));
    // Unequal head and tail sizes.
    const AxisEncoding cpg(GammaMap({"q1", "q2", "q3", "q4"}), GammaMap({"_"}));
    CHECK(cpg.encode({"q3"}) == q(1, 2));
    CHECK(cpg.encode({"q3", "_", "_"}) == q(1, 2));
    CHECK(cpg.weight(2) == q(1, 4));
}

TEST_CASE("decoding oracles") {
    CHECK(decode(q(52, 81), abc, 4) == Word{"a", "b", "b", "a"});
    CHECK(decode(q(1, 2), cpg_input, 1) == Word{"<hi>"});
    CHECK(AxisEncoding(abc).decode_all(q(52, 81)) == Word{"a", "b", "b", "a"});
    CHECK_THROWS_MATCHES(decode(q(52, 81), abc, 3), Error, has_code(ErrorCode::NonRepresentable));
    CHECK_THROWS_MATCHES(decode(q(1, 1), abc, 3), Error, has_code(ErrorCode::NonRepresentable));
    CHECK_THROWS_MATCHES(decode(q(-1, 3), abc, 1), Error, has_code(ErrorCode::NonRepresentable));
}

TEST_CASE("a CPG configuration lands on the <hi> half") {
    const AxisEncoding x(GammaMap({"q1", "q2", "q3", "q4"}), GammaMap({"_"}));
    const AxisEncoding y(cpg_input);
    const auto [cx, cy] = godelize_dotted(DottedSequence({"q1"}, {"<hi>", "<lo>"}, "_", "<lo>"), x, y);
    CHECK(cx == 0);
    CHECK(cy >= q(1, 2));
    CHECK(cy == q(1, 2));
}

TEST_CASE("pop and push oracles") {
    CHECK(pop_code(godelize({"a", "b", "b", "a"}, abc), {"a"}, abc) == godelize({"b", "b", "a"}, abc));
    const GammaMap letters({"_", "w", "o", "r", "d"});
    CHECK(push_code(godelize({"r", "d"}, letters), {"o"}, letters) == godelize({"o", "r", "d"}, letters));
    CHECK_THROWS_MATCHES(pop_code(godelize({"b"}, abc), {"a"}, abc), Error, has_code(ErrorCode::DigitMismatch));
}

TEST_CASE("exhaustive round trip, words up to length 6 over three symbols") {
    const AxisEncoding axis(abc);
    std::vector<Word> words{{}};
    std::size_t checked = 0;
    for (std::size_t len = 0; len <= 6; ++len) {
        std::vector<Word> next;
        for (const auto& w : words) {
            const Code c = axis.encode(w);
            REQUIRE(c >= 0);
            REQUIRE(c < 1);
            REQUIRE(axis.decode(c, w.size()) == w);
            ++checked;
            for (const auto& s : abc.symbols()) {
                Word v = w;
                v.push_back(s);
                next.push_back(std::move(v));
            }
        }
        words = std::move(next);
    }
    CHECK(checked == 1093);
}

TEST_CASE("encoding is injective on words without trailing fill") {
    const AxisEncoding axis(abc);
    std::set<Code> seen;
    std::size_t n = 0;
    std::vector<Word> words{{}};
    for (std::size_t len = 0; len <= 5; ++len) {
        std::vector<Word> next;
        for (const auto& w : words) {
            if (w.empty() || w.back() != "_") {
                seen.insert(axis.encode(w));
                ++n;
            }
            for (const auto& s : abc.symbols()) {
                Word v = w;
                v.push_back(s);
                next.push_back(std::move(v));
            }
        }
        words = std::move(next);
    }
    CHECK(seen.size() == n);
}

TEST_CASE("randomized round trips over larger alphabets") {
    testing::Rng rng(2024);
    for (int k = 0; k < 1000; ++k) {
        const Word tail = testing::names("s", testing::pick(rng, 2, 12));
        const bool refined = testing::coin(rng, 0.5);
        const AxisEncoding axis = refined ? AxisEncoding(GammaMap(testing::names("q", testing::pick(rng, 1, 7))),
                                                         GammaMap(tail))
                                          : AxisEncoding(GammaMap(tail));
        Word w = testing::random_word(rng, tail, 14, refined ? 1 : 0);
        if (refined) w[0] = testing::any_of(rng, axis.head()->symbols());
        const Code c = axis.encode(w);
        REQUIRE(axis.decode(c, w.size()) == w);
        // The code lies in the cylinder of each of its prefixes.
        const std::size_t p = testing::pick(rng, 0, w.size());
        REQUIRE(axis.cylinder(Word(w.begin(), w.begin() + static_cast<long>(p))).contains(c));
    }
}

TEST_CASE("pop and push are exact affine inverses") {
    testing::Rng rng(99);
    for (int k = 0; k < 1000; ++k) {
        const GammaMap g(testing::names("s", testing::pick(rng, 2, 9)));
        const Word w = testing::random_word(rng, g.symbols(), 10);
        const Word u = testing::random_word(rng, g.symbols(), 4);
        const Code c = godelize(w, g);
        const Code pushed = push_code(c, u, g);
        Word uw = u;
        uw.insert(uw.end(), w.begin(), w.end());
        REQUIRE(pushed == godelize(uw, g));
        REQUIRE(pop_code(pushed, u, g) == c);
        // The affine form: push is c * g^-r + psi(u).
        const Rational scale = pow_int(Rational(static_cast<long>(g.size())), -static_cast<long>(u.size()));
        REQUIRE(pushed == c * scale + godelize(u, g));
    }
}

TEST_CASE("gamma maps") {
    CHECK(GammaMap::from_pairs({{"b", 1}, {"a", 0}}).symbols() == Word{"a", "b"});
    CHECK_THROWS_AS(GammaMap::from_pairs({{"b", 1}, {"a", 1}}), Error);
    CHECK_THROWS_AS(GammaMap::from_pairs({{"b", 2}, {"a", 0}}), Error);
    CHECK_THROWS_AS(GammaMap({"a", "a"}), Error);
    CHECK(GammaMap::from_alphabet(Alphabet({"x", "_", "y"}, "_")).symbols() == Word{"_", "x", "y"});
    CHECK(abc.fill() == "_");
}

TEST_CASE("cylinders partition the unit interval") {
    const AxisEncoding axis(GammaMap({"q1", "q2"}), GammaMap({"_", "a", "b"}));
    CHECK(axis.word_count(3) == 18);
    Rational total = 0;
    for (const auto& h : axis.head()->symbols())
        for (const auto& t : axis.tail().symbols()) total += axis.cylinder({h, t}).hi - axis.cylinder({h, t}).lo;
    CHECK(total == 1);
    CHECK(axis.cylinder({"q2"}).lo == q(1, 2));
    CHECK(axis.cylinder({"q2"}).hi == 1);
}
