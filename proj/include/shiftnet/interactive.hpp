#pragma once

#include "shiftnet/error.hpp"
#include "shiftnet/godel.hpp"
#include "shiftnet/nda.hpp"
#include "shiftnet/rann.hpp"
#include "shiftnet/symbolic.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace shiftnet {

/// One coupled sub-sequence: a one-sided word with its own code.
struct Tape {
    std::string name;
    AxisEncoding encoding;
};

/// A shift acting on (x tape . y tape). Sides not listed as written are read only.
struct ComponentBinding {
    std::string name;
    VersatileShift vs;
    std::string x_tape;
    std::string y_tape;
    bool writes_x = true;
    bool writes_y = true;
    std::optional<Symbol> gate; // leading symbol of the stage's gate tape that enables it
};

/// Components placed between two consecutive configuration layers.
struct StageSpec {
    std::vector<ComponentBinding> components;
    std::optional<std::string> gate_tape;
};

enum class IanLayer { Cl, Meta, BslX, BslY, LtlX, LtlY, Bias };

inline std::string_view to_string(IanLayer l) {
    switch (l) {
    case IanLayer::Cl: return "CL";
    case IanLayer::Meta: return "META";
    case IanLayer::BslX: return "BSL_x";
    case IanLayer::BslY: return "BSL_y";
    case IanLayer::LtlX: return "LTL_x";
    case IanLayer::LtlY: return "LTL_y";
    case IanLayer::Bias: return "BIAS";
    }
    return "?";
}

struct IanUnit {
    IanLayer layer = IanLayer::Bias;
    Activation activation = Activation::Constant;
    std::size_t owner = 0; // CL index, stage index (meta) or component index
    std::size_t i = 0;
    std::size_t j = 0;
};

/// Tape contents per tape name, each word nearest the dot first.
using TapeWords = std::map<std::string, Word>;
using TapeCodes = std::map<std::string, Rational>;

/// Chained configuration layers CL_0..CL_k with component networks in between
/// and an identity projection CL_k -> CL_0.
class InteractiveNetwork {
  public:
    struct Component {
        ComponentBinding binding;
        NDA nda;
        std::size_t stage = 0;
        std::size_t x = 0, y = 0; // tape indices
        std::optional<std::size_t> gate_index;
        std::size_t bsl_x0 = 0, bsl_y0 = 0, ltl0 = 0;

        std::size_t m() const { return nda.m(); }
        std::size_t n() const { return nda.n(); }
        std::size_t bsl_x(std::size_t i) const { return bsl_x0 + i; }
        std::size_t bsl_y(std::size_t j) const { return bsl_y0 + j; }
        std::size_t ltl_x(std::size_t i, std::size_t j) const { return ltl0 + 2 * (i * n() + j); }
        std::size_t ltl_y(std::size_t i, std::size_t j) const { return ltl_x(i, j) + 1; }
    };

    struct Stage {
        std::vector<std::size_t> components;
        std::optional<std::size_t> gate_tape;
        AxisPartition gates; // gate-tape cylinders of the leading symbol
        std::size_t meta0 = 0;
    };

    InteractiveNetwork(std::vector<Tape> tapes, std::vector<StageSpec> stages) : tapes_(std::move(tapes)) {
        std::set<std::string> names;
        for (std::size_t t = 0; t < tapes_.size(); ++t) {
            if (!names.insert(tapes_[t].name).second)
                throw Error(ErrorCode::InvalidMachine, "tape '" + tapes_[t].name + "' declared twice");
            tape_index_[tapes_[t].name] = t;
        }
        if (stages.empty()) throw Error(ErrorCode::InvalidMachine, "an interactive network needs a stage");

        // Compile components and check writer discipline.
        for (std::size_t s = 0; s < stages.size(); ++s) {
            Stage st;
            if (stages[s].gate_tape) st.gate_tape = tape(*stages[s].gate_tape);
            std::map<std::size_t, std::vector<std::size_t>> writers;
            std::set<Symbol> gate_symbols;
            for (auto& b : stages[s].components) {
                Component c;
                c.stage = s;
                c.x = tape(b.x_tape);
                c.y = tape(b.y_tape);
                c.nda = vs_to_nda(b.vs, tapes_[c.x].encoding, tapes_[c.y].encoding);
                check_read_only(b, c.nda);
                if (b.gate) {
                    if (!st.gate_tape)
                        throw Error(ErrorCode::InvalidMachine, "component '" + b.name + "' is gated but its stage has no gate tape");
                    if (!gate_symbols.insert(*b.gate).second)
                        throw Error(ErrorCode::UngatedOverlap, "gate '" + *b.gate + "' enables two components");
                }
                const std::size_t idx = components_.size();
                if (b.writes_x) writers[c.x].push_back(idx);
                if (b.writes_y) writers[c.y].push_back(idx);
                c.binding = std::move(b);
                components_.push_back(std::move(c));
                st.components.push_back(idx);
            }
            for (const auto& [t, ws] : writers) {
                if (ws.size() < 2) continue;
                for (std::size_t w : ws)
                    if (!components_[w].binding.gate)
                        throw Error(ErrorCode::WriteConflict, "tape '" + tapes_[t].name + "' has several writers in stage " +
                                                                  std::to_string(s));
            }
            if (st.gate_tape) {
                st.gates = partition_axis(tapes_[*st.gate_tape].encoding, 1);
                for (std::size_t ci : st.components) {
                    Component& c = components_[ci];
                    if (!c.binding.gate) continue;
                    c.gate_index = st.gates.index_of(Word{*c.binding.gate});
                    if (!c.gate_index)
                        throw Error(ErrorCode::InvalidMachine, "gate symbol '" + *c.binding.gate + "' is not on the gate tape");
                }
                for (const auto& w : st.gates.words)
                    if (!gate_symbols.count(w.front()))
                        throw Error(ErrorCode::UngatedOverlap, "gate symbol '" + w.front() + "' enables no component");
            }
            stages_.push_back(std::move(st));
        }

        compute_h();
        build_units();
    }

    const std::vector<Tape>& tapes() const noexcept { return tapes_; }
    const std::vector<Stage>& stages() const noexcept { return stages_; }
    const std::vector<Component>& components() const noexcept { return components_; }
    const std::vector<IanUnit>& units() const noexcept { return units_; }
    const std::vector<Edge>& incoming(std::size_t u) const { return incoming_.at(u); }
    const Rational& h() const noexcept { return h_; }
    std::size_t size() const noexcept { return units_.size(); }
    std::size_t layers() const noexcept { return stages_.size() + 1; }
    std::size_t bias() const noexcept { return units_.size() - 1; }

    std::size_t tape(const std::string& name) const {
        auto it = tape_index_.find(name);
        if (it == tape_index_.end()) throw Error(ErrorCode::InvalidMachine, "unknown tape '" + name + "'");
        return it->second;
    }

    std::size_t cl_unit(std::size_t layer, std::size_t t) const { return layer * tapes_.size() + t; }

    const Component& component(const std::string& name) const {
        for (const auto& c : components_)
            if (c.binding.name == name) return c;
        throw Error(ErrorCode::InvalidMachine, "unknown component '" + name + "'");
    }

    Rational weight(std::size_t to, std::size_t from) const {
        for (const auto& e : incoming_.at(to))
            if (e.from == from) return e.weight;
        return 0;
    }

  private:
    static void check_read_only(const ComponentBinding& b, const NDA& nda) {
        for (const auto& c : nda.cells()) {
            if (!c.defined()) continue;
            const AffineMap2D& f = *c.branch;
            if ((!b.writes_x && (f.a_x != 0 || f.lambda_x != 1)) || (!b.writes_y && (f.a_y != 0 || f.lambda_y != 1)))
                throw Error(ErrorCode::WriteConflict,
                            "component '" + b.name + "' rewrites a read-only tape in cell '" + c.label.str() + "'");
        }
    }

    void compute_h() {
        Rational bound = 0;
        bool any = false;
        for (const auto& c : components_) {
            for (const auto& cell : c.nda.cells()) {
                if (!cell.defined()) continue;
                const AffineMap2D& f = *cell.branch;
                for (const Rational& v : {f.a_x + f.lambda_x, f.a_y + f.lambda_y}) {
                    if (!any || v > bound) bound = v;
                    any = true;
                }
            }
        }
        h_ = any && bound > 0 ? Rational(2) * bound : Rational(2);
    }

    std::size_t add_unit(IanUnit u) {
        units_.push_back(u);
        incoming_.emplace_back();
        return units_.size() - 1;
    }

    void connect(std::size_t from, std::size_t to, const Rational& w) { incoming_[to].push_back(Edge{from, w}); }

    void build_units() {
        const std::size_t T = tapes_.size();
        for (std::size_t l = 0; l < layers(); ++l)
            for (std::size_t t = 0; t < T; ++t) add_unit(IanUnit{IanLayer::Cl, Activation::Ramp, l, t, 0});
        for (std::size_t s = 0; s < stages_.size(); ++s) {
            Stage& st = stages_[s];
            st.meta0 = units_.size();
            if (st.gate_tape)
                for (std::size_t g = 0; g < st.gates.size(); ++g) add_unit(IanUnit{IanLayer::Meta, Activation::Heaviside, s, g, 0});
            for (std::size_t ci : st.components) {
                Component& c = components_[ci];
                c.bsl_x0 = units_.size();
                for (std::size_t i = 0; i < c.m(); ++i) add_unit(IanUnit{IanLayer::BslX, Activation::Heaviside, ci, i, 0});
                c.bsl_y0 = units_.size();
                for (std::size_t j = 0; j < c.n(); ++j) add_unit(IanUnit{IanLayer::BslY, Activation::Heaviside, ci, j, 0});
                c.ltl0 = units_.size();
                for (std::size_t i = 0; i < c.m(); ++i)
                    for (std::size_t j = 0; j < c.n(); ++j) {
                        add_unit(IanUnit{IanLayer::LtlX, Activation::Ramp, ci, i, j});
                        add_unit(IanUnit{IanLayer::LtlY, Activation::Ramp, ci, i, j});
                    }
            }
        }
        const std::size_t b = add_unit(IanUnit{IanLayer::Bias, Activation::Constant, 0, 0, 0});
        const Rational half = h_ / 2;

        for (std::size_t s = 0; s < stages_.size(); ++s) {
            const Stage& st = stages_[s];
            if (st.gate_tape) {
                for (std::size_t g = 0; g < st.gates.size(); ++g) {
                    connect(cl_unit(s, *st.gate_tape), st.meta0 + g, 1);
                    if (st.gates.intervals[g].lo != 0) connect(b, st.meta0 + g, -st.gates.intervals[g].lo);
                }
            }
            std::set<std::size_t> written;
            for (std::size_t ci : st.components) {
                const Component& c = components_[ci];
                if (c.binding.writes_x) written.insert(c.x);
                if (c.binding.writes_y) written.insert(c.y);
                for (std::size_t i = 0; i < c.m(); ++i) {
                    connect(cl_unit(s, c.x), c.bsl_x(i), 1);
                    const Rational& xi = c.nda.x_intervals()[i].lo;
                    if (xi != 0) connect(b, c.bsl_x(i), -xi);
                }
                for (std::size_t j = 0; j < c.n(); ++j) {
                    connect(cl_unit(s, c.y), c.bsl_y(j), 1);
                    const Rational& eta = c.nda.y_intervals()[j].lo;
                    if (eta != 0) connect(b, c.bsl_y(j), -eta);
                }
                for (std::size_t i = 0; i < c.m(); ++i) {
                    for (std::size_t j = 0; j < c.n(); ++j) {
                        const NdaCell& cell = c.nda.cell(i, j);
                        for (int k = 0; k < 2; ++k) {
                            const std::size_t t = k == 0 ? c.ltl_x(i, j) : c.ltl_y(i, j);
                            const std::size_t tape_idx = k == 0 ? c.x : c.y;
                            const bool writes = k == 0 ? c.binding.writes_x : c.binding.writes_y;
                            if (writes) connect(t, cl_unit(s + 1, tape_idx), 1);
                            if (!cell.defined()) continue;
                            const AffineMap2D& f = *cell.branch;
                            connect(cl_unit(s, tape_idx), t, k == 0 ? f.lambda_x : f.lambda_y);
                            Rational bias_w = (k == 0 ? f.a_x : f.a_y) - h_;
                            if (c.gate_index) bias_w -= half;
                            connect(b, t, bias_w);
                            connect(c.bsl_x(i), t, half);
                            if (i + 1 < c.m()) connect(c.bsl_x(i + 1), t, -half);
                            connect(c.bsl_y(j), t, half);
                            if (j + 1 < c.n()) connect(c.bsl_y(j + 1), t, -half);
                            if (c.gate_index) {
                                connect(st.meta0 + *c.gate_index, t, half);
                                if (*c.gate_index + 1 < st.gates.size()) connect(st.meta0 + *c.gate_index + 1, t, -half);
                            }
                        }
                    }
                }
            }
            for (std::size_t t = 0; t < T; ++t)
                if (!written.count(t)) connect(cl_unit(s, t), cl_unit(s + 1, t), 1);
        }
        for (std::size_t t = 0; t < T; ++t) connect(cl_unit(stages_.size(), t), cl_unit(0, t), 1);
    }

    std::vector<Tape> tapes_;
    std::map<std::string, std::size_t> tape_index_;
    std::vector<Stage> stages_;
    std::vector<Component> components_;
    std::vector<IanUnit> units_;
    std::vector<std::vector<Edge>> incoming_;
    Rational h_ = 2;
};

inline InteractiveNetwork build_ian(std::vector<Tape> tapes, std::vector<StageSpec> stages) {
    return InteractiveNetwork(std::move(tapes), std::move(stages));
}

inline NetworkState init_ian(const InteractiveNetwork& net, const TapeCodes& codes) {
    NetworkState st(net.size(), Rational(0));
    for (const auto& [name, code] : codes) {
        if (code < 0 || code > 1) throw Error(ErrorCode::OutOfRange, "code for tape '" + name + "' outside [0,1]");
        st[net.cl_unit(0, net.tape(name))] = code;
    }
    st[net.bias()] = 1;
    return st;
}

inline TapeCodes encode_tapes(const InteractiveNetwork& net, const TapeWords& words) {
    TapeCodes out;
    for (const auto& t : net.tapes()) {
        auto it = words.find(t.name);
        out[t.name] = it == words.end() ? Rational(0) : t.encoding.encode(it->second);
    }
    return out;
}

inline TapeCodes tape_codes(const InteractiveNetwork& net, const NetworkState& st) {
    TapeCodes out;
    for (std::size_t t = 0; t < net.tapes().size(); ++t) out[net.tapes()[t].name] = st[net.cl_unit(0, t)];
    return out;
}

inline TapeWords decode_tapes(const InteractiveNetwork& net, const NetworkState& st) {
    TapeWords out;
    for (std::size_t t = 0; t < net.tapes().size(); ++t)
        out[net.tapes()[t].name] = net.tapes()[t].encoding.decode_all(st[net.cl_unit(0, t)]);
    return out;
}

/// Which components ran in one pass.
struct PassRecord {
    std::vector<std::string> active;
};

namespace detail {

inline Rational ian_input(const InteractiveNetwork& net, const NetworkState& st, std::size_t u) {
    Rational sum = 0;
    for (const auto& e : net.incoming(u)) {
        const Rational& a = st[e.from];
        if (a != 0) sum += e.weight * a;
    }
    return sum;
}

inline void ian_eval(const InteractiveNetwork& net, NetworkState& st, std::size_t u) {
    st[u] = activate(net.units()[u].activation, ian_input(net, st, u));
}

} // namespace detail

/// One pass CL_0 -> ... -> CL_k -> CL_0. Overrides replace CL_0 codes first.
inline NetworkState step_ian(const InteractiveNetwork& net, const NetworkState& state, const TapeCodes& overrides = {},
                             PassRecord* record = nullptr) {
    NetworkState st = state;
    for (const auto& [name, code] : overrides) st[net.cl_unit(0, net.tape(name))] = code;
    for (std::size_t t = 0; t < net.tapes().size(); ++t) {
        const Rational& v = st[net.cl_unit(0, t)];
        if (v < 0 || v > 1) throw Error(ErrorCode::OutOfRange, "tape '" + net.tapes()[t].name + "' code outside [0,1]");
    }
    for (std::size_t s = 0; s < net.stages().size(); ++s) {
        const auto& stage = net.stages()[s];
        std::optional<std::size_t> gate;
        if (stage.gate_tape) {
            for (std::size_t g = 0; g < stage.gates.size(); ++g) {
                detail::ian_eval(net, st, stage.meta0 + g);
                if (st[stage.meta0 + g] != 0) gate = g;
            }
        }
        std::map<std::size_t, std::string> writer;
        for (std::size_t ci : stage.components) {
            const auto& c = net.components()[ci];
            for (std::size_t i = 0; i < c.m(); ++i) detail::ian_eval(net, st, c.bsl_x(i));
            for (std::size_t j = 0; j < c.n(); ++j) detail::ian_eval(net, st, c.bsl_y(j));
            const bool enabled = !c.gate_index || c.gate_index == gate;
            if (enabled) {
                std::size_t si = 0, sj = 0;
                for (std::size_t i = 0; i < c.m(); ++i)
                    if (st[c.bsl_x(i)] != 0) si = i;
                for (std::size_t j = 0; j < c.n(); ++j)
                    if (st[c.bsl_y(j)] != 0) sj = j;
                if (!c.nda.cell(si, sj).defined())
                    throw Error(ErrorCode::NoActiveBranch, "component '" + c.binding.name + "' reached undefined cell '" +
                                                               c.nda.cell(si, sj).label.str() + "'");
                for (std::size_t t : {c.x, c.y}) {
                    const bool writes = t == c.x ? c.binding.writes_x : c.binding.writes_y;
                    if (!writes) continue;
                    auto [it, fresh] = writer.emplace(t, c.binding.name);
                    if (!fresh && it->second != c.binding.name)
                        throw Error(ErrorCode::WriteConflict, "tape '" + net.tapes()[t].name + "' written by '" +
                                                                  it->second + "' and '" + c.binding.name + "'");
                }
                if (record) record->active.push_back(c.binding.name);
            }
            for (std::size_t i = 0; i < c.m(); ++i)
                for (std::size_t j = 0; j < c.n(); ++j) {
                    detail::ian_eval(net, st, c.ltl_x(i, j));
                    detail::ian_eval(net, st, c.ltl_y(i, j));
                }
        }
        for (std::size_t t = 0; t < net.tapes().size(); ++t) detail::ian_eval(net, st, net.cl_unit(s + 1, t));
    }
    for (std::size_t t = 0; t < net.tapes().size(); ++t) detail::ian_eval(net, st, net.cl_unit(0, t));
    return st;
}

/// The same pass carried out on symbol words, component by component.
inline TapeWords symbolic_pass(const InteractiveNetwork& net, const TapeWords& words, PassRecord* record = nullptr) {
    TapeWords cur = words;
    for (const auto& t : net.tapes()) cur[t.name];
    for (const auto& stage : net.stages()) {
        std::optional<Symbol> gate;
        if (stage.gate_tape) {
            const auto& t = net.tapes()[*stage.gate_tape];
            const Word& w = cur[t.name];
            gate = w.empty() ? t.encoding.map_at(1).fill() : w.front();
        }
        TapeWords next = cur;
        for (std::size_t ci : stage.components) {
            const auto& c = net.components()[ci];
            if (c.binding.gate && c.binding.gate != gate) continue;
            const Tape& tx = net.tapes()[c.x];
            const Tape& ty = net.tapes()[c.y];
            const DottedSequence s(cur[tx.name], cur[ty.name], tx.encoding.fill(), ty.encoding.fill());
            const DottedSequence out = apply_vs(c.binding.vs, s);
            if (c.binding.writes_x) next[tx.name] = out.left();
            if (c.binding.writes_y) next[ty.name] = out.right();
            if (record) record->active.push_back(c.binding.name);
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace shiftnet
