#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qslkit/fixtures.hpp"
#include "qslkit/saturation.hpp"
#include "qslkit/scalar_kernel.hpp"

namespace {

using nlohmann::json;
using namespace qslkit;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCheck = 4;
constexpr int kExitSaturability = 5;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

DiscreteSpectrum load_state(const std::string& path, const std::string& builtin) {
    if (!builtin.empty()) return builtin_state(builtin);
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open state file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("malformed JSON in '" + path + "': " + e.what());
    }
    if (doc.contains("density")) {
        throw ValidationError(
            "continuous spectra carry no discrete bounds; this command needs a "
            "\"levels\" state");
    }
    if (!doc.contains("levels") || !doc["levels"].is_array()) {
        throw ValidationError("state JSON must contain a \"levels\" array");
    }
    std::vector<Level> levels;
    for (const auto& entry : doc["levels"]) {
        if (!entry.contains("energy") || !entry.contains("weight") ||
            !entry["energy"].is_number() || !entry["weight"].is_number()) {
            throw ValidationError("each level needs numeric \"energy\" and \"weight\"");
        }
        levels.push_back({entry["energy"].get<double>(), entry["weight"].get<double>()});
    }
    std::string name = doc.value("name", "");
    return DiscreteSpectrum::build(std::move(levels), std::move(name));
}

json value_field(const BoundResult& r) {
    if (r.divergent) return json("inf");
    return json(r.value);
}

json record_json(const BoundResult& r, double wall_ms) {
    json rec;
    rec["kind"] = bound_kind_name(r.kind);
    rec["value"] = value_field(r);
    rec["divergent"] = r.divergent;
    rec["p_opt"] = r.p_used ? json(*r.p_used) : json(nullptr);
    rec["theta_opt"] = r.theta_used ? json(*r.theta_used) : json(nullptr);
    rec["e_r_opt"] = r.e_r_used ? json(*r.e_r_used) : json(nullptr);
    rec["wall_time_ms"] = wall_ms;
    if (r.divergent) rec["reason"] = r.reason;
    return rec;
}

std::string csv_value(const BoundResult& r) {
    return r.divergent ? "inf" : fmt17(r.value);
}

std::string csv_opt(const std::optional<double>& v) {
    return v ? fmt17(*v) : "";
}

void print_records(const std::vector<std::pair<BoundResult, double>>& records,
                   const std::string& format) {
    if (format == "json") {
        json arr = json::array();
        for (const auto& [r, ms] : records) arr.push_back(record_json(r, ms));
        std::cout << arr.dump(2) << "\n";
    } else if (format == "csv") {
        std::cout << "kind,value,divergent,p_opt,theta_opt,e_r_opt,wall_time_ms\n";
        for (const auto& [r, ms] : records) {
            std::cout << bound_kind_name(r.kind) << ',' << csv_value(r) << ','
                      << (r.divergent ? "true" : "false") << ',' << csv_opt(r.p_used)
                      << ',' << csv_opt(r.theta_used) << ',' << csv_opt(r.e_r_used)
                      << ',' << fmt6(ms) << "\n";
        }
    } else {
        for (const auto& [r, ms] : records) {
            std::printf("%-7s %-14s", bound_kind_name(r.kind),
                        r.divergent ? "inf" : fmt6(r.value).c_str());
            if (r.p_used) std::printf("  p=%-10s", fmt6(*r.p_used).c_str());
            if (r.theta_used) std::printf("  theta=%-10s", fmt6(*r.theta_used).c_str());
            if (r.e_r_used) std::printf("  E_r=%-10s", fmt6(*r.e_r_used).c_str());
            if (r.divergent) std::printf("  (%s)", r.reason.c_str());
            std::printf("\n");
        }
    }
}

struct CommonOpts {
    std::string state_path;
    std::string builtin;
    std::string bound = "all";
    std::optional<double> p;
    bool optimize = false;
    double sqrt_fidelity = 0.0;
    std::optional<double> theta;
    std::string format = "pretty";
    double horizon = 50.0;
    double scale = 1.0;
    double e_r = 0.0;
    bool check = false;
};

BoundResult eval_one(const std::string& kind, const DiscreteSpectrum& state, double eps,
                     const CommonOpts& opt) {
    const bool fixed = opt.p.has_value();
    if (kind == "mt") return mt_bound(state, eps);
    if (kind == "ml") return ml_bound(state, eps);
    if (kind == "dualml") return dual_ml_bound(state, eps);
    if (kind == "chau") return lc_bound(state, eps, 1.0);
    if (kind == "lz") {
        return fixed ? lz_bound(state, eps, *opt.p)
                     : optimize_p(BoundKind::LZ, state, eps);
    }
    if (kind == "lc") {
        return fixed ? lc_bound(state, eps, *opt.p)
                     : optimize_p(BoundKind::LC, state, eps);
    }
    if (kind == "cz") {
        if (fixed && opt.theta) {
            // Diagnostic path: fixed (p, theta), E_r from the moment profile.
            const MomentProfile prof = e_r_opt(state, *opt.p);
            const Moments m = moments(state, *opt.p, prof.e_r_opt);
            const TangentPair tp = phi_pair(*opt.p, *opt.theta);
            const double mu_plus = m.abs_moment > 0 ? m.plus_moment / m.abs_moment : 0.0;
            const double denom = mu_plus * tp.a_plus + (1.0 - mu_plus) * tp.a_minus;
            BoundResult r;
            r.kind = BoundKind::CZ;
            r.p_used = *opt.p;
            r.theta_used = *opt.theta;
            r.e_r_used = prof.e_r_opt;
            const double numer = std::cos(*opt.theta) - std::sqrt(eps);
            r.value = std::pow(std::max(numer, 0.0) / (denom * m.abs_moment), 1.0 / *opt.p);
            return r;
        }
        return fixed ? cz_bound_fixed_p(state, eps, *opt.p)
                     : optimize_p(BoundKind::CZ, state, eps);
    }
    throw ValidationError("unknown bound '" + kind + "'");
}

int run_compute(const CommonOpts& opt) {
    const DiscreteSpectrum state = load_state(opt.state_path, opt.builtin);
    const double eps = opt.sqrt_fidelity * opt.sqrt_fidelity;
    std::vector<std::string> kinds;
    if (opt.bound == "all") {
        kinds = {"mt", "ml", "dualml", "lz", "lc", "cz"};
    } else {
        kinds = {opt.bound};
    }
    std::vector<std::pair<BoundResult, double>> records;
    for (const std::string& k : kinds) {
        const auto start = std::chrono::steady_clock::now();
        BoundResult r = eval_one(k, state, eps, opt);
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        records.emplace_back(std::move(r), ms);
    }
    print_records(records, opt.format);
    return kExitOk;
}

int run_table(const CommonOpts& opt) {
    const std::vector<ComputedRow> rows = compute_table();
    if (opt.format == "json") {
        json arr = json::array();
        for (const ComputedRow& row : rows) {
            json rec;
            rec["case"] = row.state_id;
            rec["sqrt_epsilon"] = row.sqrt_epsilon;
            rec["mt"] = record_json(row.mt, 0.0);
            rec["ml"] = record_json(row.ml, 0.0);
            rec["lz"] = record_json(row.lz, 0.0);
            rec["lc"] = record_json(row.lc, 0.0);
            rec["cz"] = record_json(row.cz, 0.0);
            rec["wall_time_ms"] = row.wall_time_ms;
            arr.push_back(rec);
        }
        std::cout << arr.dump(2) << "\n";
    } else if (opt.format == "csv") {
        std::cout << "case,sqrt_epsilon,mt,ml,lz,lz_p,lc,lc_p,cz,cz_p,cz_theta\n";
        for (const ComputedRow& row : rows) {
            std::cout << row.state_id << ',' << fmt17(row.sqrt_epsilon) << ','
                      << csv_value(row.mt) << ',' << csv_value(row.ml) << ','
                      << csv_value(row.lz) << ',' << csv_opt(row.lz.p_used) << ','
                      << csv_value(row.lc) << ',' << csv_opt(row.lc.p_used) << ','
                      << csv_value(row.cz) << ',' << csv_opt(row.cz.p_used) << ','
                      << csv_opt(row.cz.theta_used) << "\n";
        }
    } else {
        std::printf("%-5s %-6s %-11s %-11s %-11s %-7s %-11s %-7s %-11s %-7s %-9s\n",
                    "case", "se", "MT", "ML", "LZ", "p", "LC", "p", "CZ", "p", "theta");
        for (const ComputedRow& row : rows) {
            auto v = [&](const BoundResult& r) {
                return r.divergent ? std::string("inf") : fmt6(r.value);
            };
            auto pv = [&](const BoundResult& r) {
                return r.p_used ? fmt6(*r.p_used) : std::string("-");
            };
            std::printf("%-5s %-6s %-11s %-11s %-11s %-7s %-11s %-7s %-11s %-7s %-9s\n",
                        row.state_id.c_str(), fmt6(row.sqrt_epsilon).c_str(),
                        v(row.mt).c_str(), v(row.ml).c_str(), v(row.lz).c_str(),
                        pv(row.lz).c_str(), v(row.lc).c_str(), pv(row.lc).c_str(),
                        v(row.cz).c_str(), pv(row.cz).c_str(),
                        row.cz.theta_used ? fmt6(*row.cz.theta_used).c_str() : "-");
        }
    }
    if (!opt.check) return kExitOk;

    const TableCheck check = check_table(rows);
    for (const CellCheck& c : check.cells) {
        if (!c.pass) {
            std::printf("CHECK FAIL %-18s computed=%s reference=%s %s\n", c.label.c_str(),
                        fmt6(c.computed).c_str(), fmt6(c.reference).c_str(),
                        c.note.c_str());
        }
    }
    std::printf("check: %d of %zu cells failed, max relative deviation %s\n",
                check.failures, check.cells.size(), fmt6(check.max_rel_dev).c_str());
    return check.failures == 0 ? kExitOk : kExitCheck;
}

int run_saturate(const CommonOpts& opt) {
    if (!opt.p) throw ValidationError("saturate requires --p");
    if (!(*opt.p > 0.0 && *opt.p <= 2.0)) throw ValidationError("--p outside (0, 2]");
    const double eps = opt.sqrt_fidelity * opt.sqrt_fidelity;
    const double theta = opt.theta.value_or(0.0);
    SaturatingTriple triple;
    try {
        triple = saturating_state(*opt.p, eps, theta, opt.e_r, opt.scale);
    } catch (const SaturabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSaturability;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSaturability;
    }
    // State JSON, with numbers at 17 significant digits for exact re-parsing.
    std::ostringstream body;
    body << "{\n  \"name\": \"saturating-triple\",\n  \"levels\": [\n";
    const std::vector<std::pair<double, double>> levels = {
        {triple.e_minus, triple.w_minus}, {triple.e_r, triple.w_r},
        {triple.e_plus, triple.w_plus}};
    for (std::size_t i = 0; i < levels.size(); ++i) {
        body << "    {\"energy\": " << fmt17(levels[i].first)
             << ", \"weight\": " << fmt17(levels[i].second) << "}"
             << (i + 1 < levels.size() ? ",\n" : "\n");
    }
    body << "  ],\n  \"predicted_tau\": " << fmt17(triple.predicted_tau) << "\n}\n";
    std::cout << body.str();
    return kExitOk;
}

int run_verify(const CommonOpts& opt) {
    const DiscreteSpectrum state = load_state(opt.state_path, opt.builtin);
    const double eps = opt.sqrt_fidelity * opt.sqrt_fidelity;
    const OracleResult oracle = evolution_time(state, eps, opt.horizon);
    if (!oracle.tau_first) {
        std::printf("oracle: no crossing within horizon %s (min fidelity %s)\n",
                    fmt6(opt.horizon).c_str(), fmt6(oracle.achieved_fidelity).c_str());
    } else {
        std::printf("oracle: tau = %s (fidelity %s)\n", fmt17(*oracle.tau_first).c_str(),
                    fmt6(oracle.achieved_fidelity).c_str());
    }
    CommonOpts sub = opt;
    sub.p.reset();
    bool ok = true;
    for (const std::string& k : {"mt", "ml", "dualml", "lz", "lc", "cz"}) {
        const BoundResult r = eval_one(k, state, eps, sub);
        bool dominated = true;
        if (oracle.tau_first) {
            dominated = r.divergent ? false : r.value <= *oracle.tau_first + 1e-9;
        }
        ok = ok && dominated;
        std::printf("%-7s %-14s %s\n", bound_kind_name(r.kind),
                    r.divergent ? "inf" : fmt6(r.value).c_str(),
                    dominated ? "<= tau" : "VIOLATION");
    }
    return ok ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum speed limit bound toolkit"};
    app.require_subcommand(1);
    CommonOpts opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--state", opt.state_path, "state JSON file");
        cmd->add_option("--builtin", opt.builtin, "builtin state id (a-g)");
        cmd->add_option("--sqrt-fidelity", opt.sqrt_fidelity, "sqrt(epsilon) in [0,1]")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--format", opt.format, "json|csv|pretty")
            ->check(CLI::IsMember({"json", "csv", "pretty"}));
    };

    CLI::App* compute = app.add_subcommand("compute", "evaluate bounds on a state");
    add_common(compute);
    compute->add_option("--bound", opt.bound, "mt|ml|dualml|lz|lc|chau|cz|all")
        ->check(CLI::IsMember({"mt", "ml", "dualml", "lz", "lc", "chau", "cz", "all"}));
    double p_value = 0.0;
    CLI::Option* p_opt = compute->add_option("--p", p_value, "fixed exponent");
    CLI::Option* opt_flag = compute->add_flag("--optimize-p", opt.optimize, "optimize over p");
    p_opt->excludes(opt_flag);
    compute->add_option("--theta", [&opt](const CLI::results_t& res) {
        opt.theta = std::stod(res[0]);
        return true;
    }, "fixed theta for CZ diagnostics");

    CLI::App* table = app.add_subcommand("table", "reproduce the reference table");
    add_common(table);
    table->add_flag("--check", opt.check, "compare against embedded reference values");

    CLI::App* saturate = app.add_subcommand("saturate", "construct a bound-saturating state");
    add_common(saturate);
    CLI::Option* sp = saturate->add_option("--p", p_value, "exponent");
    saturate->add_option("--theta", [&opt](const CLI::results_t& res) {
        opt.theta = std::stod(res[0]);
        return true;
    }, "tangency angle (default 0)");
    saturate->add_option("--e-r", opt.e_r, "reference energy");
    saturate->add_option("--scale", opt.scale, "energy unit of the triple");

    CLI::App* verify = app.add_subcommand("verify", "oracle vs bounds dominance check");
    add_common(verify);
    verify->add_option("--horizon", opt.horizon, "oracle search horizon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (p_opt->count() > 0 || sp->count() > 0) opt.p = p_value;

    try {
        if (compute->parsed()) return run_compute(opt);
        if (table->parsed()) return run_table(opt);
        if (saturate->parsed()) return run_saturate(opt);
        if (verify->parsed()) return run_verify(opt);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SaturabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSaturability;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const QuadratureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
