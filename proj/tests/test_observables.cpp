#include "shiftnet/garden_path.hpp"
#include "shiftnet/observables.hpp"
#include "shiftnet/spec_format.hpp"
#include "matchers.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <regex>
#include <sstream>

using namespace shiftnet;
using testing::has_code;

namespace {

Rational q(long n, long d) { return make_rational(n, d); }

const spec::InteractiveBundle& gp() {
    static const auto b = std::get<spec::InteractiveBundle>(spec::compile_spec(*spec::example_text("garden-path")));
    return b;
}

DottedWord stimulus(std::string_view text) { return DottedWord::parse(text, garden_path::alphabet()); }

ErpCurve erp(std::string_view cond, std::size_t trials = 100) {
    ErpOptions opt;
    opt.n_trials = trials;
    opt.tail_length = 6;
    opt.seed = 1;
    opt.onset = gp().onset;
    return synth_erp(gp().network, gp().rest, gp().x_tape, gp().y_tape, stimulus(cond), opt, std::string(cond));
}

} // namespace

TEST_CASE("mean activation oracles") {
    const NetworkState st{0, q(1, 2), 1, 1};
    CHECK(amari_mean(st) == q(5, 8));
    CHECK(amari_mean(st, 3) == q(1, 2));
    CHECK(amari_mean(NetworkState{}) == 0);

    const auto tm = std::get<spec::MachineBundle>(spec::compile_spec(spec::tm_text));
    const NetworkState init = init_state(tm.network, q(1, 3), q(1, 4));
    const auto n = static_cast<long>(tm.network.size());
    CHECK(amari_mean(tm.network, init) == (q(1, 3) + q(1, 4)) / Rational(n - 1));
    CHECK(amari_mean(tm.network, init, true) == (q(1, 3) + q(1, 4) + 1) / Rational(n));
}

TEST_CASE("harmony matches the dense double sum") {
    const auto tm = std::get<spec::MachineBundle>(spec::compile_spec(spec::tm_text));
    const auto dense = tm.network.dense_weights();
    testing::Rng rng(17);
    for (int k = 0; k < 50; ++k) {
        NetworkState st(tm.network.size());
        for (auto& v : st) v = q(static_cast<long>(testing::pick(rng, 0, 20)) - 5, 7);
        REQUIRE(harmony(tm.network, st) == harmony(dense, st));
    }
    // A two-unit oracle: u = (2, 3), w_01 = 5, w_10 = -1.
    CHECK(harmony(std::vector<std::vector<Rational>>{{0, 5}, {-1, 0}}, NetworkState{2, 3}) == 30 - 6);
}

TEST_CASE("random tails keep the stimulus prefix") {
    const auto tm = std::get<spec::MachineBundle>(spec::compile_spec(spec::tm_text));
    const AxisEncoding& gx = tm.encodings.x;
    const AxisEncoding& gy = tm.encodings.y;
    const DottedWord stim = DottedWord::parse("w q0 . o r d", tm.vs.alphabet());
    std::mt19937_64 rng(3);
    const auto exact = random_compatible_init(stim, 0, rng, gx, gy);
    CHECK(exact == std::make_pair(gx.encode(reversed(stim.left)), gy.encode(stim.right)));
    for (int k = 0; k < 200; ++k) {
        const auto [x, y] = random_compatible_init(stim, 6, rng, gx, gy);
        REQUIRE(gx.decode_prefix(x, stim.left.size()) == reversed(stim.left));
        REQUIRE(gy.decode_prefix(y, stim.right.size()) == stim.right);
        REQUIRE(gx.cylinder(reversed(stim.left)).contains(x));
    }
    CHECK(random_tail(gy, 0, rng).empty());
    CHECK(random_tail(gy, 9, rng).size() == 9);
}

TEST_CASE("trial seeds are reproducible and distinct") {
    auto a = trial_rng(1, 0), b = trial_rng(1, 0), c = trial_rng(1, 1);
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
}

TEST_CASE("sample statistics") {
    const auto p = aggregate({{0, 1}, {2, 1}});
    REQUIRE(p.size() == 2);
    CHECK(p[0].mean == 1);
    CHECK(p[0].variance == 2);
    CHECK(abs(p[0].std - sqrt(Decimal(2))) < Decimal("1e-40"));
    CHECK(p[1].variance == 0);
    CHECK(aggregate({{q(1, 3)}}).front().variance == 0);
}

TEST_CASE("ERP: the garden-path condition rises above the preferred one after the repair") {
    const ErpCurve so = erp("S . s o");
    const ErpCurve os = erp("S . o s");
    REQUIRE(so.points.size() == os.points.size());
    REQUIRE(so.trials.size() == 100);

    // The repair happens in the same pass on every trial.
    ErpOptions one;
    one.tail_length = 6;
    one.onset = gp().onset;
    const IanTrial t = run_ian_trial(gp().network, gp().rest, gp().x_tape, gp().y_tape, stimulus("S . o s"), 0, one);
    std::size_t repair = 0;
    for (std::size_t k = 0; k < t.passes.size(); ++k)
        for (const auto& a : t.passes[k].active)
            if (a == "repair" && repair == 0) repair = k + 1;
    CHECK(repair == 5);

    std::size_t end = repair;
    while (end < os.points.size() && os.points[end].mean > so.points[end].mean) ++end;
    CHECK(end - repair >= 3);

    // Before the stimulus both conditions rest at the same level, and both return to it.
    const Rational rest = so.points[1].mean;
    CHECK(os.points[1].mean == rest);
    CHECK(so.points.back().mean == rest);
    CHECK(os.points.back().mean == rest);
    CHECK(so.points[3].mean > rest);
    CHECK(os.points[3].mean > rest);
}

TEST_CASE("ERP inputs are checked") {
    ErpOptions none;
    none.n_trials = 0;
    CHECK_THROWS_MATCHES(
        synth_erp(gp().network, gp().rest, gp().x_tape, gp().y_tape, stimulus("S . s o"), none),
        Error, has_code(ErrorCode::OutOfRange));
}

TEST_CASE("ERP CSV layout") {
    std::ostringstream out;
    write_erp_csv(out, {erp("S . s o", 3)}, 4);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "step,mean,std,condition");
    const std::regex row(R"(\d+,-?\d+\.\d{4},\d+\.\d{4},S \. s o)");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        INFO(line);
        CHECK(std::regex_match(line, row));
        ++rows;
    }
    CHECK(rows == 13);
}
