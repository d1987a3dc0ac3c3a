// Command-line front end: compile, run, trace and check machines, and
// synthesize ERP curves for interactive networks.

#include "shiftnet/observables.hpp"
#include "shiftnet/pipeline.hpp"
#include "shiftnet/spec_format.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace shiftnet;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, Rejected = 1, Divergence = 2, InputError = 3, Internal = 4 };

struct Options {
    std::string spec_path;
    std::string example_name;
    std::string init;
    std::size_t steps = 0;
    std::string halting = "fixed-point";
    std::uint64_t seed = 1;
    std::size_t trials = 100;
    std::size_t tail_length = 6;
    std::string ramp;
    std::string out;
    int precision = 12;
    std::string conditions;
    bool summary = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Output goes to --out when given, to stdout otherwise.
class Sink {
  public:
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw Error(ErrorCode::ParseError, "cannot write " + path);
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

Rational parse_number(const std::string& text) {
    // "3", "-1/4" or "0.25"; decimals become exact fractions
    std::string t = text;
    std::string den = "1";
    if (const auto dot = t.find('.'); dot != std::string::npos) {
        den += std::string(t.size() - dot - 1, '0');
        t.erase(dot, 1);
    } else if (const auto slash = t.find('/'); slash != std::string::npos) {
        den = t.substr(slash + 1);
        t.erase(slash);
    }
    const auto digits = [](const std::string& d, bool sign) {
        const std::size_t start = sign && !d.empty() && d[0] == '-' ? 1 : 0;
        return d.size() > start && d.find_first_not_of("0123456789", start) == std::string::npos;
    };
    if (!digits(t, true) || !digits(den, false) || den.find_first_not_of('0') == std::string::npos)
        throw Error(ErrorCode::ParseError, "not a number: '" + text + "'");
    return Rational(t + "/" + den);
}

std::vector<Rational> parse_ramp(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw Error(ErrorCode::ParseError, "--stimulus-ramp reads lo:hi:n");
    const Rational lo = parse_number(parts[0]);
    const Rational hi = parse_number(parts[1]);
    const long n = std::stol(parts[2]);
    if (n < 1) throw Error(ErrorCode::ParseError, "--stimulus-ramp needs n >= 1");
    std::vector<Rational> out;
    for (long k = 0; k < n; ++k) out.push_back(n == 1 ? lo : lo + (hi - lo) * Rational(k) / Rational(n - 1));
    return out;
}

std::string num(const Rational& r, int precision) { return to_decimal_string(r, precision); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

Alphabet tape_alphabet(const InteractiveNetwork& net) {
    Word all;
    std::set<Symbol> seen;
    for (const auto& t : net.tapes()) {
        std::vector<const GammaMap*> maps{&t.encoding.tail()};
        if (t.encoding.head()) maps.push_back(&*t.encoding.head());
        for (const GammaMap* g : maps)
            for (const auto& s : g->symbols())
                if (seen.insert(s).second) all.push_back(s);
    }
    return Alphabet(all);
}

std::string tapes_str(const TapeWords& t) {
    std::string out;
    for (const auto& [name, w] : t) {
        if (!out.empty()) out += " | ";
        out += name + "=" + join(w);
    }
    return out;
}

DottedSequence machine_init(const spec::MachineBundle& b, const Options& o) {
    if (!o.init.empty())
        return DottedSequence::from_written(DottedWord::parse(o.init, b.vs.alphabet()), b.encodings.x.fill(),
                                            b.encodings.y.fill());
    if (b.init) return *b.init;
    throw Error(ErrorCode::MalformedConfiguration, "no initial configuration: give --init or an init: line");
}

Halting parse_halting(const Options& o, const Alphabet& a) {
    const std::size_t cap = o.steps ? o.steps : 100;
    if (o.halting == "fixed-point") return Halting::fixed_point(cap);
    if (o.halting == "max") return Halting::steps(cap);
    if (o.halting.rfind("predicate:", 0) == 0) return Halting::cell(DottedWord::parse(o.halting.substr(10), a), cap);
    throw Error(ErrorCode::ParseError, "--halting is fixed-point, max or predicate:<label>");
}

json rational_json(const Rational& r) { return to_fraction_string(r); }

json bundle_json(const spec::MachineBundle& b) {
    json vs;
    vs["dod"] = {b.vs.dod().k_l, b.vs.dod().k_r};
    vs["rules"] = json::array();
    for (const auto& [key, rule] : b.vs.rules())
        vs["rules"].push_back({{"key", key.str()}, {"replacement", rule.replacement.str()}, {"shift", rule.shift}});
    json nda;
    nda["m"] = b.nda.m();
    nda["n"] = b.nda.n();
    for (const auto& iv : b.nda.x_intervals()) nda["x_intervals"].push_back({rational_json(iv.lo), rational_json(iv.hi)});
    for (const auto& iv : b.nda.y_intervals()) nda["y_intervals"].push_back({rational_json(iv.lo), rational_json(iv.hi)});
    nda["cells"] = json::array();
    for (std::size_t i = 0; i < b.nda.m(); ++i)
        for (std::size_t j = 0; j < b.nda.n(); ++j) {
            const NdaCell& c = b.nda.cell(i, j);
            json cell{{"i", i}, {"j", j}, {"label", c.label.str()}, {"defined", c.defined()}};
            if (c.defined())
                cell["branch"] = {{"a_x", rational_json(c.branch->a_x)}, {"a_y", rational_json(c.branch->a_y)},
                                  {"lambda_x", rational_json(c.branch->lambda_x)},
                                  {"lambda_y", rational_json(c.branch->lambda_y)}};
            nda["cells"].push_back(cell);
        }
    json net;
    net["units"] = b.network.size();
    net["h"] = rational_json(b.network.h());
    net["layers"] = json::array();
    for (const auto& u : b.network.units())
        net["layers"].push_back({{"id", u.id}, {"layer", std::string(to_string(u.layer))}, {"i", u.i}, {"j", u.j}});
    net["weights"] = json::array();
    for (std::size_t to = 0; to < b.network.size(); ++to)
        for (const auto& e : b.network.incoming(to))
            net["weights"].push_back({{"to", to}, {"from", e.from}, {"w", rational_json(e.weight)}});
    return {{"name", b.name}, {"vs", vs}, {"nda", nda}, {"network", net}};
}

json bundle_json(const spec::InteractiveBundle& b) {
    const auto& net = b.network;
    json out{{"name", b.name}, {"units", net.size()}, {"h", rational_json(net.h())}, {"layers", net.layers()}};
    for (const auto& t : net.tapes()) out["tapes"].push_back(t.name);
    for (const auto& c : net.components())
        out["components"].push_back({{"name", c.binding.name},
                                     {"stage", c.stage},
                                     {"x_tape", c.binding.x_tape},
                                     {"y_tape", c.binding.y_tape},
                                     {"gate", c.binding.gate ? json(*c.binding.gate) : json(nullptr)},
                                     {"m", c.m()},
                                     {"n", c.n()},
                                     {"defined_cells", c.nda.defined_cells()}});
    out["weights"] = json::array();
    for (std::size_t to = 0; to < net.size(); ++to)
        for (const auto& e : net.incoming(to))
            out["weights"].push_back({{"to", to}, {"from", e.from}, {"w", rational_json(e.weight)}});
    return out;
}

int cmd_example(const Options& o) {
    const auto text = spec::example_text(o.example_name);
    if (!text) throw Error(ErrorCode::ParseError, "unknown example '" + o.example_name + "' (cpg, tm, garden-path)");
    Sink sink(o.out);
    sink.out() << *text;
    return Ok;
}

int cmd_compile(const Options& o) {
    const auto compiled = spec::compile_spec(read_file(o.spec_path));
    Sink sink(o.out);
    std::visit(
        [&](const auto& b) {
            if (!o.summary) {
                sink.out() << bundle_json(b).dump(2) << '\n';
                return;
            }
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, spec::MachineBundle>) {
                sink.out() << "name: " << b.name << "\nrules: " << b.vs.rules().size() << "\ncells: " << b.nda.m()
                           << " x " << b.nda.n() << " (" << b.nda.defined_cells() << " defined)\nunits: "
                           << b.network.size() << "\nh: " << to_fraction_string(b.network.h()) << '\n';
            } else {
                sink.out() << "name: " << b.name << "\ntapes: " << b.network.tapes().size()
                           << "\ncomponents: " << b.network.components().size() << "\nunits: " << b.network.size()
                           << "\nh: " << to_fraction_string(b.network.h()) << '\n';
            }
        },
        compiled);
    return Ok;
}

int run_machine(const spec::MachineBundle& b, const Options& o, Sink& sink) {
    const DottedSequence init = machine_init(b, o);
    const auto [x0, y0] = godelize_dotted(init, b.encodings.x, b.encodings.y);
    const NetworkState st0 = init_state(b.network, x0, y0);
    if (!o.ramp.empty()) {
        // c_y is clamped to the k-th ramp value before macro step k. A clamped
        // y of 1 has no finite decoding, so only the state is reported.
        const std::vector<Rational> ramp = parse_ramp(o.ramp);
        const RunResult r = run(b.network, st0, Halting::steps(ramp.size()), [&](std::size_t k) {
            MclOverride ov;
            ov.y = ramp.at(k);
            return ov;
        });
        const std::size_t head = b.encodings.x.refined() ? 1 : 0;
        sink.out() << "step,stimulus,x,y,state\n";
        for (std::size_t k = 0; k < r.states.size(); ++k) {
            const auto [x, y] = mcl(b.network, r.states[k]);
            const Word q = b.encodings.x.decode_prefix(x, head);
            sink.out() << k << ',' << (k == 0 ? std::string() : num(ramp[k - 1], o.precision)) << ','
                       << num(x, o.precision) << ',' << num(y, o.precision) << ',' << join(q) << '\n';
        }
        return r.outcome == RunOutcome::Rejected ? Rejected : Ok;
    }
    const RunResult r = run(b.network, st0, parse_halting(o, b.vs.alphabet()));
    sink.out() << "step,x,y,configuration\n";
    for (std::size_t k = 0; k < r.states.size(); ++k) {
        const auto [x, y] = mcl(b.network, r.states[k]);
        sink.out() << k << ',' << num(x, o.precision) << ',' << num(y, o.precision) << ','
                   << csv_field(decode_state(b.network, r.states[k]).str()) << '\n';
    }
    std::cerr << "outcome: " << to_string(r.outcome) << (r.message.empty() ? "" : " (" + r.message + ")") << '\n';
    return r.outcome == RunOutcome::Rejected ? Rejected : Ok;
}

int run_interactive(const spec::InteractiveBundle& b, const Options& o, Sink& sink) {
    if (o.init.empty()) throw Error(ErrorCode::MalformedConfiguration, "give the stimulus with --init");
    ErpOptions opt;
    opt.n_trials = 1;
    opt.tail_length = 0;
    opt.onset = b.onset;
    opt.max_steps = o.steps ? o.steps : 12;
    const DottedWord stim = DottedWord::parse(o.init, tape_alphabet(b.network));
    const IanTrial t = run_ian_trial(b.network, b.rest, b.x_tape, b.y_tape, stim, 0, opt);
    sink.out() << "step,mean,active,tapes\n";
    for (std::size_t k = 0; k < t.means.size(); ++k) {
        std::string active;
        if (k > 0)
            for (const auto& a : t.passes[k - 1].active) active += (active.empty() ? "" : " ") + a;
        sink.out() << k << ',' << num(t.means[k], o.precision) << ',' << csv_field(active) << ','
                   << csv_field(tapes_str(t.tapes[k])) << '\n';
    }
    return Ok;
}

int cmd_run(const Options& o) {
    const auto compiled = spec::compile_spec(read_file(o.spec_path));
    Sink sink(o.out);
    if (const auto* m = std::get_if<spec::MachineBundle>(&compiled)) return run_machine(*m, o, sink);
    return run_interactive(std::get<spec::InteractiveBundle>(compiled), o, sink);
}

int cmd_trace(const Options& o) {
    const auto compiled = spec::compile_spec(read_file(o.spec_path));
    Sink sink(o.out);
    auto row = [&](std::size_t step, const std::string& stage, std::size_t unit, std::string_view layer,
                   const Rational& v) {
        sink.out() << step << ',' << stage << ',' << unit << ',' << layer << ',' << to_fraction_string(v) << ','
                   << num(v, o.precision) << '\n';
    };
    sink.out() << "macro_step,stage,unit,layer,fraction,decimal\n";
    if (const auto* b = std::get_if<spec::MachineBundle>(&compiled)) {
        const DottedSequence init = machine_init(*b, o);
        const auto [x0, y0] = godelize_dotted(init, b->encodings.x, b->encodings.y);
        const RunResult r = run(b->network, init_state(b->network, x0, y0), Halting::steps(o.steps ? o.steps : 10),
                                {}, true);
        for (std::size_t u = 0; u < b->network.size(); ++u)
            row(0, "init", u, to_string(b->network.units()[u].layer), r.states[0][u]);
        static const char* names[] = {"bsl", "ltl", "mcl"};
        for (std::size_t k = 0; k < r.stages.size(); ++k)
            for (std::size_t s = 0; s < 3; ++s)
                for (std::size_t u = 0; u < b->network.size(); ++u)
                    row(k + 1, names[s], u, to_string(b->network.units()[u].layer), r.stages[k][s][u]);
        return r.outcome == RunOutcome::Rejected ? Rejected : Ok;
    }
    const auto& b = std::get<spec::InteractiveBundle>(compiled);
    if (o.init.empty()) throw Error(ErrorCode::MalformedConfiguration, "give the stimulus with --init");
    ErpOptions opt;
    opt.n_trials = 1;
    opt.tail_length = 0;
    opt.onset = b.onset;
    opt.max_steps = o.steps ? o.steps : 12;
    const IanTrial t = run_ian_trial(b.network, b.rest, b.x_tape, b.y_tape,
                                     DottedWord::parse(o.init, tape_alphabet(b.network)), 0, opt);
    for (std::size_t k = 0; k < t.states.size(); ++k)
        for (std::size_t u = 0; u < b.network.size(); ++u)
            row(k, "pass", u, to_string(b.network.units()[u].layer), t.states[k][u]);
    return Ok;
}

int cmd_check(const Options& o) {
    const auto compiled = spec::compile_spec(read_file(o.spec_path));
    const std::size_t steps = o.steps ? o.steps : 10;
    Sink sink(o.out);
    if (const auto* b = std::get_if<spec::MachineBundle>(&compiled)) {
        const CompiledMachine cm = b->compiled();
        const MachineConfiguration config = decode_configuration(cm.machine, machine_init(*b, o));
        const CommutativityReport rep = check_commutativity(cm, config, steps);
        sink.out() << (rep.agree ? "agree" : "diverge") << " steps=" << rep.steps;
        if (!rep.terminal.empty()) sink.out() << " stopped=" << rep.terminal;
        if (rep.divergence) sink.out() << " at=" << *rep.divergence << " " << rep.detail;
        sink.out() << '\n';
        return rep.agree ? Ok : Divergence;
    }
    // Interactive: every network pass must match the symbolic pass.
    const auto& b = std::get<spec::InteractiveBundle>(compiled);
    if (o.init.empty()) throw Error(ErrorCode::MalformedConfiguration, "give the stimulus with --init");
    const DottedWord stim = DottedWord::parse(o.init, tape_alphabet(b.network));
    TapeWords words = b.rest;
    words[b.x_tape] = reversed(stim.left);
    words[b.y_tape] = stim.right;
    NetworkState st = init_ian(b.network, encode_tapes(b.network, words));
    for (std::size_t k = 0; k < steps; ++k) {
        const TapeWords expect = symbolic_pass(b.network, words);
        st = step_ian(b.network, st);
        const TapeWords got = decode_tapes(b.network, st);
        if (got != expect) {
            sink.out() << "diverge steps=" << k << " at=" << k << " network " << tapes_str(got) << " symbolic "
                       << tapes_str(expect) << '\n';
            return Divergence;
        }
        words = expect;
    }
    sink.out() << "agree steps=" << steps << '\n';
    return Ok;
}

int cmd_erp(const Options& o) {
    const auto compiled = spec::compile_spec(read_file(o.spec_path));
    ErpOptions opt;
    opt.n_trials = o.trials;
    opt.tail_length = o.tail_length;
    opt.seed = o.seed;
    if (o.steps) opt.max_steps = o.steps;
    std::vector<std::string> conditions;
    std::stringstream ss(o.conditions);
    for (std::string c; std::getline(ss, c, ',');)
        if (!spec::normalize(c).empty()) conditions.push_back(spec::normalize(c));
    if (conditions.empty()) throw Error(ErrorCode::ParseError, "--conditions lists at least one stimulus");
    std::vector<ErpCurve> curves;
    if (const auto* b = std::get_if<spec::InteractiveBundle>(&compiled)) {
        opt.onset = b->onset;
        for (const auto& c : conditions)
            curves.push_back(synth_erp(b->network, b->rest, b->x_tape, b->y_tape,
                                       DottedWord::parse(c, tape_alphabet(b->network)), opt, c));
    } else {
        const auto& m = std::get<spec::MachineBundle>(compiled);
        for (const auto& c : conditions)
            curves.push_back(synth_erp(m.network, DottedWord::parse(c, m.vs.alphabet()), opt, c));
    }
    Sink sink(o.out);
    write_erp_csv(sink.out(), curves, o.precision);
    return Ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compile symbolic machines into rational-weight recurrent networks"};
    app.require_subcommand(1);
    Options o;

    auto spec_arg = [&](CLI::App* c) { c->add_option("spec", o.spec_path, "Spec file")->required(); };
    auto out_arg = [&](CLI::App* c) { c->add_option("--out", o.out, "Write output to this file"); };

    auto* example = app.add_subcommand("example", "Print a bundled spec (cpg, tm, garden-path)");
    example->add_option("name", o.example_name)->required();
    out_arg(example);

    auto* compile = app.add_subcommand("compile", "Compile a spec and emit the JSON bundle");
    spec_arg(compile);
    out_arg(compile);
    compile->add_flag("--summary", o.summary, "Print sizes only");

    auto* run_cmd = app.add_subcommand("run", "Run the network and print the MCL per step");
    spec_arg(run_cmd);
    out_arg(run_cmd);
    run_cmd->add_option("--init", o.init, "Initial dotted sequence or stimulus");
    run_cmd->add_option("--steps", o.steps, "Step cap");
    run_cmd->add_option("--halting", o.halting, "fixed-point, max or predicate:<label>");
    run_cmd->add_option("--stimulus-ramp", o.ramp, "Clamp c_y to lo:hi:n evenly spaced values");
    run_cmd->add_option("--precision", o.precision, "Decimal digits");

    auto* trace = app.add_subcommand("trace", "Per-unit activations at every stage");
    spec_arg(trace);
    out_arg(trace);
    trace->add_option("--init", o.init, "Initial dotted sequence or stimulus");
    trace->add_option("--steps", o.steps, "Macro steps");
    trace->add_option("--precision", o.precision, "Decimal digits");

    auto* check = app.add_subcommand("check", "Compare symbolic, shift, NDA and network runs");
    spec_arg(check);
    out_arg(check);
    check->add_option("--init", o.init, "Initial dotted sequence or stimulus");
    check->add_option("--steps", o.steps, "Steps to compare");

    auto* erp = app.add_subcommand("erp", "Synthetic ERP curves (mean activation over trials)");
    spec_arg(erp);
    out_arg(erp);
    erp->add_option("--conditions", o.conditions, "Comma-separated stimuli, e.g. 'S . s o,S . o s'")->required();
    erp->add_option("--trials", o.trials, "Trials per condition");
    erp->add_option("--seed", o.seed, "Random seed");
    erp->add_option("--tail-length", o.tail_length, "Random tail length per side");
    erp->add_option("--steps", o.steps, "Steps per trial");
    erp->add_option("--precision", o.precision, "Decimal digits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Ok : InputError;
    }

    try {
        if (*example) return cmd_example(o);
        if (*compile) return cmd_compile(o);
        if (*run_cmd) return cmd_run(o);
        if (*trace) return cmd_trace(o);
        if (*check) return cmd_check(o);
        if (*erp) return cmd_erp(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return InputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return Internal;
    }
    return Internal;
}
