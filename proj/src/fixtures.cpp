#include "qslkit/fixtures.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace qslkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::map<std::string, DiscreteSpectrum> make_builtins() {
    std::map<std::string, DiscreteSpectrum> out;
    out.emplace("a", DiscreteSpectrum::build({{0, 0.5}, {1, 0.5}}, "a"));

    std::vector<Level> uniform;
    for (int j = 0; j < 2048; ++j) uniform.push_back({double(j), 1.0 / 2048.0});
    out.emplace("b", DiscreteSpectrum::build(std::move(uniform), "b"));

    // Published results for this state were computed on the raw 1/j amplitudes
    // without normalizing, so the weights are kept as given.
    std::vector<Level> inv_sq;
    for (int j = 1; j <= 2048; ++j) inv_sq.push_back({double(j), 1.0 / (double(j) * j)});
    out.emplace("c", DiscreteSpectrum::build_raw(std::move(inv_sq), "c"));

    out.emplace("d", DiscreteSpectrum::build({{0, 0.1}, {1, 0.9}}, "d"));
    out.emplace("e", DiscreteSpectrum::build({{0, 0.3}, {1, 0.6}, {2, 0.1}}, "e"));
    out.emplace("f", DiscreteSpectrum::build({{0, 0.3}, {1, 0.6}, {kPi, 0.1}}, "f"));
    out.emplace("g",
                DiscreteSpectrum::build({{0, 0.4}, {1, 0.45}, {2 * kPi, 0.15}}, "g"));
    return out;
}

const std::map<std::string, DiscreteSpectrum>& builtins() {
    static const std::map<std::string, DiscreteSpectrum> table = make_builtins();
    return table;
}

}  // namespace

const DiscreteSpectrum& builtin_state(const std::string& id) {
    const auto& table = builtins();
    const auto it = table.find(id);
    if (it == table.end()) throw ValidationError("unknown builtin state '" + id + "'");
    return it->second;
}

std::vector<std::string> builtin_state_ids() {
    std::vector<std::string> out;
    for (const auto& [id, st] : builtins()) out.push_back(id);
    return out;
}

const std::vector<ReferenceRow>& reference_table() {
    static const std::vector<ReferenceRow> rows = [] {
        auto cell = [](double v, double p = 0.0, double th = 0.0) {
            return ReferenceCell{v, p, th, false};
        };
        const ReferenceCell div{kInf, 0.0, 0.0, true};
        std::vector<ReferenceRow> t;
        t.push_back({"a", 0.0, cell(3.1416), cell(3.1416), cell(3.1416, 1.78),
                     cell(3.1416, 1.2e-5), cell(3.1416, 8.8e-4, -5.6e-4)});
        t.push_back({"b", 0.0, cell(2.66e-3), cell(1.53e-3), cell(1.88e-3, 2.00),
                     cell(2.84e-3, 1.36), cell(2.84e-3, 1.36, 0.00)});
        t.push_back({"c", 0.0, cell(0.0353), cell(0.2181), cell(0.4166, 0.46),
                     cell(0.3961, 0.44), cell(0.4166, 0.42, -0.28)});
        t.push_back({"d", 0.1, cell(4.9021), cell(1.5432), cell(2.1437, 2.00),
                     cell(12.4204, 1.00), cell(12.4204, 1.00, 0.00)});
        t.push_back({"e", 0.19, cell(2.2994), cell(1.5397), cell(1.8485, 2.00), div, div});
        t.push_back({"e", 0.20, cell(2.2824), cell(1.5183), cell(1.8268, 2.00),
                     cell(3.1416, 1.3e-5), cell(3.1416, 1.3e-5, 2.9e-6)});
        t.push_back({"f", 0.20, cell(1.5800), cell(1.3287), cell(1.4586, 1.75),
                     cell(2.5970, 1.2e-5), cell(2.5970, 1.0e-5, 2.2e-6)});
        t.push_back({"g", 0.00, cell(0.7461), cell(1.1281), cell(1.1795, 0.67),
                     cell(1.3401, 0.46), cell(1.3410, 0.46, 0.03)});
        t.push_back({"g", 0.15, cell(0.6746), cell(0.9342), cell(0.9323, 0.89),
                     cell(1.0211, 0.73), cell(1.0221, 0.74, -0.04)});
        t.push_back({"g", 0.35, cell(0.5762), cell(0.6932), cell(0.6641, 1.12),
                     cell(0.7525, 1.02), cell(0.7577, 1.00, -0.10)});
        t.push_back({"g", 0.99, cell(0.0672), cell(0.0099), cell(2.7e-14, 0.19),
                     cell(0.0674, 1.99), cell(0.0674, 1.99, 0.00)});
        return t;
    }();
    return rows;
}

ComputedRow compute_row(const ReferenceRow& ref) {
    const auto start = std::chrono::steady_clock::now();
    const DiscreteSpectrum& state = builtin_state(ref.state_id);
    const double eps = ref.sqrt_epsilon * ref.sqrt_epsilon;
    ComputedRow out;
    out.state_id = ref.state_id;
    out.sqrt_epsilon = ref.sqrt_epsilon;
    out.mt = mt_bound(state, eps);
    out.ml = ml_bound(state, eps);
    out.lz = optimize_p(BoundKind::LZ, state, eps);
    out.lc = optimize_p(BoundKind::LC, state, eps);
    out.cz = optimize_p(BoundKind::CZ, state, eps);
    out.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    return out;
}

std::vector<ComputedRow> compute_table() {
    std::vector<ComputedRow> out;
    for (const ReferenceRow& ref : reference_table()) out.push_back(compute_row(ref));
    return out;
}

namespace {

// One reference cell against one computed result; optimized cells also check
// p_opt (with the flat-curve tie rule and the small-p/limit acceptance).
CellCheck check_cell(const std::string& label, const DiscreteSpectrum& state, double eps,
                     const ReferenceCell& ref, const BoundResult& got, bool optimized) {
    CellCheck out;
    out.label = label;
    out.computed = got.value;
    out.reference = ref.value;
    if (ref.divergent) {
        out.pass = got.divergent;
        out.note = got.divergent ? "divergent as published" : "expected divergent";
        return out;
    }
    if (got.divergent) {
        out.pass = false;
        out.note = "computed divergent (" + got.reason + ") but published value is finite";
        return out;
    }
    out.rel_dev = std::abs(got.value - ref.value) / std::abs(ref.value);
    out.pass = out.rel_dev <= 5e-3;
    if (!out.pass) {
        out.note = "value outside 5e-3 relative";
        return out;
    }
    if (!optimized) return out;

    const double p_got = got.p_used.value_or(0.0);
    if (ref.p_opt <= 1e-3) {
        // Published exponent below the p floor: the small-p/limit path must
        // have produced the value.
        if (p_got <= 1e-2) {
            out.note = "small-p path";
        } else {
            // A flat bound-vs-p curve can also reproduce the value at large p.
            out.pass = false;
            out.note = "published p_opt tiny but optimizer stayed at large p";
        }
        return out;
    }
    if (ref.p_opt >= 0.1) {
        if (std::abs(p_got - ref.p_opt) <= 0.05) return out;
        // Tie rule: accept when the bound at the published p matches the
        // optimum (flat curve, p_opt ill-defined).
        double at_ref = std::numeric_limits<double>::quiet_NaN();
        try {
            if (label.find("lz") != std::string::npos) {
                at_ref = lz_bound(state, eps, ref.p_opt).value;
            } else if (label.find("lc") != std::string::npos) {
                at_ref = lc_bound(state, eps, ref.p_opt).value;
            } else {
                at_ref = cz_bound_fixed_p(state, eps, ref.p_opt).value;
            }
        } catch (const std::exception&) {
        }
        if (std::abs(at_ref - got.value) <= 1e-9 * std::max(std::abs(got.value), 1e-30)) {
            out.note = "p_opt tie (flat curve)";
            return out;
        }
        out.pass = false;
        out.note = "p_opt outside +-0.05";
    }
    return out;
}

}  // namespace

TableCheck check_table(const std::vector<ComputedRow>& rows) {
    TableCheck out;
    const auto& refs = reference_table();
    for (const ComputedRow& row : rows) {
        const ReferenceRow* ref = nullptr;
        for (const ReferenceRow& r : refs) {
            if (r.state_id == row.state_id && r.sqrt_epsilon == row.sqrt_epsilon) {
                ref = &r;
                break;
            }
        }
        if (!ref) continue;
        const DiscreteSpectrum& state = builtin_state(row.state_id);
        const double eps = row.sqrt_epsilon * row.sqrt_epsilon;
        const std::string tag = "(" + row.state_id + ", " + std::to_string(row.sqrt_epsilon) + ") ";
        out.cells.push_back(check_cell(tag + "mt", state, eps, ref->mt, row.mt, false));
        out.cells.push_back(check_cell(tag + "ml", state, eps, ref->ml, row.ml, false));
        out.cells.push_back(check_cell(tag + "lz", state, eps, ref->lz, row.lz, true));
        out.cells.push_back(check_cell(tag + "lc", state, eps, ref->lc, row.lc, true));
        out.cells.push_back(check_cell(tag + "cz", state, eps, ref->cz, row.cz, true));
    }
    for (const CellCheck& c : out.cells) {
        if (!c.pass) {
            ++out.failures;
        } else if (!c.note.starts_with("divergent")) {
            out.max_rel_dev = std::max(out.max_rel_dev, c.rel_dev);
        }
    }
    return out;
}

}  // namespace qslkit
