#pragma once

#include "shiftnet/error.hpp"
#include "shiftnet/godel.hpp"
#include "shiftnet/nda.hpp"
#include "shiftnet/rational.hpp"
#include "shiftnet/symbolic.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shiftnet {

enum class Layer { MclX, MclY, BslX, BslY, LtlX, LtlY, Bias };
enum class Activation { Heaviside, Ramp, Constant };

inline std::string_view to_string(Layer l) {
    switch (l) {
    case Layer::MclX: return "MCL_x";
    case Layer::MclY: return "MCL_y";
    case Layer::BslX: return "BSL_x";
    case Layer::BslY: return "BSL_y";
    case Layer::LtlX: return "LTL_x";
    case Layer::LtlY: return "LTL_y";
    case Layer::Bias: return "BIAS";
    }
    return "?";
}

struct Unit {
    std::size_t id = 0;
    Layer layer = Layer::Bias;
    Activation activation = Activation::Constant;
    std::size_t i = 0; // interval index for BSL, row for LTL
    std::size_t j = 0; // column for LTL
};

struct Edge {
    std::size_t from = 0;
    Rational weight;
};

inline Rational heaviside(const Rational& v) { return v >= 0 ? Rational(1) : Rational(0); }
inline Rational ramp(const Rational& v) { return v > 0 ? v : Rational(0); }

using NetworkState = std::vector<Rational>;

/// Three-layer recurrent network compiled from an NDA. Weights are stored
/// sparsely per target unit; weight(to, from) reads the dense view.
class Network {
  public:
    Network() = default;

    explicit Network(const NDA& nda) : gx_(nda.gx()), gy_(nda.gy()), m_(nda.m()), n_(nda.n()) {
        for (const auto& c : nda.cells()) {
            labels_.push_back(c.label);
            defined_.push_back(c.defined());
        }
        Rational bound = 0;
        bool any = false;
        for (const auto& c : nda.cells()) {
            if (!c.defined()) continue;
            const AffineMap2D& f = *c.branch;
            for (const Rational& v : {f.a_x + f.lambda_x, f.a_y + f.lambda_y}) {
                if (!any || v > bound) bound = v;
                any = true;
            }
        }
        h_ = any && bound > 0 ? Rational(2) * bound : Rational(2);

        const std::size_t total = 2 + m_ + n_ + 2 * m_ * n_ + 1;
        units_.resize(total);
        incoming_.resize(total);
        for (std::size_t u = 0; u < total; ++u) units_[u].id = u;
        units_[mcl_x()] = Unit{mcl_x(), Layer::MclX, Activation::Ramp, 0, 0};
        units_[mcl_y()] = Unit{mcl_y(), Layer::MclY, Activation::Ramp, 0, 0};
        units_[bias()] = Unit{bias(), Layer::Bias, Activation::Constant, 0, 0};
        const Rational half = h_ / 2;

        for (std::size_t i = 0; i < m_; ++i) {
            units_[bsl_x(i)] = Unit{bsl_x(i), Layer::BslX, Activation::Heaviside, i, 0};
            connect(mcl_x(), bsl_x(i), 1);
            const Rational& xi = nda.x_intervals()[i].lo;
            if (xi != 0) connect(bias(), bsl_x(i), -xi);
        }
        for (std::size_t j = 0; j < n_; ++j) {
            units_[bsl_y(j)] = Unit{bsl_y(j), Layer::BslY, Activation::Heaviside, j, 0};
            connect(mcl_y(), bsl_y(j), 1);
            const Rational& eta = nda.y_intervals()[j].lo;
            if (eta != 0) connect(bias(), bsl_y(j), -eta);
        }
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const NdaCell& c = nda.cell(i, j);
                for (int k = 0; k < 2; ++k) {
                    const std::size_t t = k == 0 ? ltl_x(i, j) : ltl_y(i, j);
                    units_[t] = Unit{t, k == 0 ? Layer::LtlX : Layer::LtlY, Activation::Ramp, i, j};
                    connect(t, k == 0 ? mcl_x() : mcl_y(), 1);
                    if (!c.defined()) continue; // zero-weight placeholder
                    const AffineMap2D& f = *c.branch;
                    connect(k == 0 ? mcl_x() : mcl_y(), t, k == 0 ? f.lambda_x : f.lambda_y);
                    connect(bias(), t, (k == 0 ? f.a_x : f.a_y) - h_);
                    connect(bsl_x(i), t, half);
                    if (i + 1 < m_) connect(bsl_x(i + 1), t, -half);
                    connect(bsl_y(j), t, half);
                    if (j + 1 < n_) connect(bsl_y(j + 1), t, -half);
                }
            }
        }
    }

    std::size_t m() const noexcept { return m_; }
    std::size_t n() const noexcept { return n_; }
    const Rational& h() const noexcept { return h_; }
    std::size_t size() const noexcept { return units_.size(); }
    const std::vector<Unit>& units() const noexcept { return units_; }
    const std::vector<Edge>& incoming(std::size_t unit) const { return incoming_.at(unit); }
    const AxisEncoding& gx() const noexcept { return gx_; }
    const AxisEncoding& gy() const noexcept { return gy_; }

    std::size_t mcl_x() const noexcept { return 0; }
    std::size_t mcl_y() const noexcept { return 1; }
    std::size_t bsl_x(std::size_t i) const noexcept { return 2 + i; }
    std::size_t bsl_y(std::size_t j) const noexcept { return 2 + m_ + j; }
    std::size_t ltl_x(std::size_t i, std::size_t j) const noexcept { return 2 + m_ + n_ + 2 * (i * n_ + j); }
    std::size_t ltl_y(std::size_t i, std::size_t j) const noexcept { return ltl_x(i, j) + 1; }
    std::size_t bias() const noexcept { return units_.size() - 1; }

    bool cell_defined(std::size_t i, std::size_t j) const { return defined_.at(i * n_ + j); }
    const DottedWord& cell_label(std::size_t i, std::size_t j) const { return labels_.at(i * n_ + j); }

    Rational weight(std::size_t to, std::size_t from) const {
        for (const auto& e : incoming_.at(to))
            if (e.from == from) return e.weight;
        return 0;
    }

    std::vector<std::vector<Rational>> dense_weights() const {
        std::vector<std::vector<Rational>> w(size(), std::vector<Rational>(size(), Rational(0)));
        for (std::size_t to = 0; to < size(); ++to)
            for (const auto& e : incoming_[to]) w[to][e.from] = e.weight;
        return w;
    }

  private:
    void connect(std::size_t from, std::size_t to, const Rational& w) { incoming_[to].push_back(Edge{from, w}); }

    AxisEncoding gx_, gy_;
    std::size_t m_ = 0, n_ = 0;
    Rational h_ = 2;
    std::vector<Unit> units_;
    std::vector<std::vector<Edge>> incoming_;
    std::vector<DottedWord> labels_;
    std::vector<bool> defined_;
};

inline Network nda_to_rann(const NDA& nda) { return Network(nda); }

/// Unit count for n_alpha left words and n_beta right words.
inline std::size_t unit_count(std::size_t n_alpha, std::size_t n_beta) {
    return 2 + n_alpha + n_beta + 2 * n_alpha * n_beta + 1;
}

inline NetworkState init_state(const Network& net, const Rational& x, const Rational& y) {
    if (x < 0 || x > 1 || y < 0 || y > 1)
        throw Error(ErrorCode::OutOfRange, "initial code outside the unit square");
    NetworkState st(net.size(), Rational(0));
    st[net.mcl_x()] = x;
    st[net.mcl_y()] = y;
    st[net.bias()] = 1;
    return st;
}

inline Rational net_input(const Network& net, const NetworkState& st, std::size_t unit) {
    Rational sum = 0;
    for (const auto& e : net.incoming(unit)) {
        const Rational& a = st[e.from];
        if (a != 0) sum += e.weight * a;
    }
    return sum;
}

inline Rational activate(Activation f, const Rational& v) {
    switch (f) {
    case Activation::Heaviside: return heaviside(v);
    case Activation::Ramp: return ramp(v);
    case Activation::Constant: return 1;
    }
    return 0;
}

/// Replacement values for the two MCL units before a step.
struct MclOverride {
    std::optional<Rational> x;
    std::optional<Rational> y;
};

/// Selected cell from the BSL pattern (largest active index per axis).
inline std::pair<std::size_t, std::size_t> selected_cell(const Network& net, const NetworkState& st) {
    std::size_t i = 0, j = 0;
    bool fx = false, fy = false;
    for (std::size_t k = 0; k < net.m(); ++k)
        if (st[net.bsl_x(k)] != 0) i = k, fx = true;
    for (std::size_t k = 0; k < net.n(); ++k)
        if (st[net.bsl_y(k)] != 0) j = k, fy = true;
    if (!fx || !fy) throw Error(ErrorCode::OutOfRange, "no branch-selection unit is active");
    return {i, j};
}

/// Lateral BSL input reaching the LTL pair of cell (i, j).
inline Rational gating_input(const Network& net, const NetworkState& st, std::size_t i, std::size_t j) {
    const Rational half = net.h() / 2;
    Rational sum = half * st[net.bsl_x(i)] + half * st[net.bsl_y(j)];
    if (i + 1 < net.m()) sum -= half * st[net.bsl_x(i + 1)];
    if (j + 1 < net.n()) sum -= half * st[net.bsl_y(j + 1)];
    return sum;
}

/// States after the BSL, LTL and MCL stages of one macro step.
using StageStates = std::array<NetworkState, 3>;

inline StageStates macro_step_stages(const Network& net, const NetworkState& st, const MclOverride& ov = {}) {
    NetworkState cur = st;
    if (ov.x) cur[net.mcl_x()] = *ov.x;
    if (ov.y) cur[net.mcl_y()] = *ov.y;
    for (std::size_t k : {net.mcl_x(), net.mcl_y()})
        if (cur[k] < 0 || cur[k] > 1) throw Error(ErrorCode::OutOfRange, "MCL activation outside [0,1]");

    StageStates out;
    for (std::size_t i = 0; i < net.m(); ++i) cur[net.bsl_x(i)] = heaviside(net_input(net, cur, net.bsl_x(i)));
    for (std::size_t j = 0; j < net.n(); ++j) cur[net.bsl_y(j)] = heaviside(net_input(net, cur, net.bsl_y(j)));
    out[0] = cur;
    const auto [si, sj] = selected_cell(net, cur);
    if (!net.cell_defined(si, sj))
        throw Error(ErrorCode::NoActiveBranch, "undefined cell '" + net.cell_label(si, sj).str() + "' selected");

    for (std::size_t i = 0; i < net.m(); ++i) {
        for (std::size_t j = 0; j < net.n(); ++j) {
            cur[net.ltl_x(i, j)] = ramp(net_input(net, cur, net.ltl_x(i, j)));
            cur[net.ltl_y(i, j)] = ramp(net_input(net, cur, net.ltl_y(i, j)));
        }
    }
    out[1] = cur;
    const Rational x = ramp(net_input(net, cur, net.mcl_x()));
    const Rational y = ramp(net_input(net, cur, net.mcl_y()));
    cur[net.mcl_x()] = x;
    cur[net.mcl_y()] = y;
    out[2] = std::move(cur);
    return out;
}

inline NetworkState macro_step(const Network& net, const NetworkState& st, const MclOverride& ov = {}) {
    return macro_step_stages(net, st, ov)[2];
}

inline std::pair<Rational, Rational> mcl(const Network& net, const NetworkState& st) {
    return {st[net.mcl_x()], st[net.mcl_y()]};
}

/// Reads the symbolic configuration back from the MCL.
inline DottedSequence decode_state(const Network& net, const NetworkState& st) {
    return DottedSequence(net.gx().decode_all(st[net.mcl_x()]), net.gy().decode_all(st[net.mcl_y()]),
                          net.gx().fill(), net.gy().fill());
}

enum class HaltingMode { FixedPoint, Predicate, MaxSteps };

enum class RunOutcome { FixedPoint, Predicate, StepLimit, Rejected, StepLimitExceeded };

inline std::string_view to_string(RunOutcome o) {
    switch (o) {
    case RunOutcome::FixedPoint: return "fixed-point";
    case RunOutcome::Predicate: return "predicate";
    case RunOutcome::StepLimit: return "step-limit";
    case RunOutcome::Rejected: return "rejected";
    case RunOutcome::StepLimitExceeded: return "step-limit-exceeded";
    }
    return "?";
}

struct Halting {
    HaltingMode mode = HaltingMode::MaxSteps;
    std::size_t max_steps = 100;
    std::function<bool(const Network&, const NetworkState&)> predicate;

    static Halting fixed_point(std::size_t cap = 10000) { return {HaltingMode::FixedPoint, cap, {}}; }
    static Halting steps(std::size_t n) { return {HaltingMode::MaxSteps, n, {}}; }

    /// Stops once the MCL lies in the cell with this DoD label.
    static Halting cell(DottedWord label, std::size_t cap = 10000) {
        return {HaltingMode::Predicate, cap, [label = std::move(label)](const Network& net, const NetworkState& st) {
                    const auto x = net.gx().decode_prefix(st[net.mcl_x()], label.left.size());
                    const auto y = net.gy().decode_prefix(st[net.mcl_y()], label.right.size());
                    return reversed(x) == label.left && y == label.right;
                }};
    }
};

struct RunResult {
    std::vector<NetworkState> states; // states[0] is the initial state
    std::vector<StageStates> stages;  // stages[k] produced states[k+1]
    RunOutcome outcome = RunOutcome::StepLimit;
    std::string message;

    std::size_t steps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
};

using OverrideSchedule = std::function<MclOverride(std::size_t step)>;

inline RunResult run(const Network& net, const NetworkState& init, const Halting& halting,
                     const OverrideSchedule& schedule = {}, bool record_stages = false) {
    RunResult r;
    r.states.push_back(init);
    for (std::size_t k = 0;; ++k) {
        const NetworkState& cur = r.states.back();
        if (halting.mode == HaltingMode::Predicate && halting.predicate(net, cur)) {
            r.outcome = RunOutcome::Predicate;
            return r;
        }
        if (k >= halting.max_steps) {
            r.outcome = halting.mode == HaltingMode::MaxSteps ? RunOutcome::StepLimit : RunOutcome::StepLimitExceeded;
            return r;
        }
        const MclOverride ov = schedule ? schedule(k) : MclOverride{};
        StageStates st;
        try {
            st = macro_step_stages(net, cur, ov);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoActiveBranch) throw;
            r.outcome = RunOutcome::Rejected;
            r.message = e.what();
            return r;
        }
        const bool fixed = st[2][net.mcl_x()] == (ov.x ? *ov.x : cur[net.mcl_x()]) &&
                           st[2][net.mcl_y()] == (ov.y ? *ov.y : cur[net.mcl_y()]);
        if (record_stages) r.stages.push_back(st);
        r.states.push_back(std::move(st[2]));
        if (halting.mode == HaltingMode::FixedPoint && fixed) {
            r.outcome = RunOutcome::FixedPoint;
            return r;
        }
    }
}

} // namespace shiftnet
