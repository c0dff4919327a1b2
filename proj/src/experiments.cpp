#include "approxop/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "approxop/errors.hpp"
#include "approxop/summation.hpp"

namespace approxop {

namespace {

using nlohmann::json;
using Cell = ReportTable::Cell;

constexpr double kGapTolerance = 1e-12;
constexpr double kBoundSlack = 1e-10;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += "\"";
    return out;
}

std::string cell_text(const Cell& c, bool json_mode) {
    if (std::holds_alternative<std::monostate>(c)) return json_mode ? "null" : "";
    if (const double* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return json_mode ? "null" : "nan";
        return fmt17(*d);
    }
    if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const bool* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    const std::string& s = std::get<std::string>(c);
    return json_mode ? json_escape(s) : csv_escape(s);
}

Cell num(double x) { return Cell(x); }
Cell num(std::int64_t x) { return Cell(x); }
Cell num(int x) { return Cell(static_cast<std::int64_t>(x)); }
Cell txt(std::string s) { return Cell(std::move(s)); }
Cell flag(bool b) { return Cell(b); }
Cell none() { return Cell(std::monostate{}); }

double vec_norm_diff(std::span<const double> a, std::span<const double> b) {
    NeumaierSum s;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s.add(d * d);
    }
    return std::sqrt(s.value());
}

EvalReport run_engine(const ExperimentSpec& spec, const MappingDescriptor& F,
                      const SequencePoint& t, int n) {
    OperatorConfig cfg{spec.family, n, spec.anchor, ClosedForm{}};
    switch (spec.strategy) {
        case StrategyChoice::Auto:
            cfg.strategy = Enumerate{spec.budget};  // budget hint for the fallback chain
            return auto_eval(F, t, cfg, spec.samples, spec.seed.value_or(0));
        case StrategyChoice::ClosedForm: return closed_form_eval(F, t, cfg);
        case StrategyChoice::Rank:
            cfg.strategy = RankFactor{};
            return rank_eval(F, t, cfg);
        case StrategyChoice::Enumerate:
            cfg.strategy = Enumerate{spec.budget};
            return enumerate_eval(F, t, cfg);
        case StrategyChoice::MonteCarlo:
            cfg.strategy = MonteCarlo{spec.samples, spec.seed.value_or(0)};
            return mc_eval(F, t, cfg);
    }
    throw SpecError("unknown strategy");
}

const MappingDescriptor& required_function(const ExperimentSpec& spec) {
    if (!spec.function) throw SpecError("this command requires a \"function\" field");
    return *spec.function;
}

const SequencePoint& required_point(const ExperimentSpec& spec) {
    if (!spec.point) throw SpecError("this command requires a \"point\" field");
    return *spec.point;
}

std::vector<double> default_t_grid(const KernelFamily& family) {
    switch (family.kind()) {
        case FamilyKind::Bernstein: return {0.0, 0.25, 0.5, 0.75, 1.0};
        case FamilyKind::GaussWeierstrass: return {-1.0, 0.0, 0.5, 1.5};
        default: return {0.0, 0.5, 1.0, 2.0};
    }
}

std::string point_pair_json(const SequencePoint& a, const SequencePoint& b) {
    json j;
    j["t"] = to_json(a);
    j["u"] = to_json(b);
    return j.dump();
}

}  // namespace

Command command_from_name(const std::string& name) {
    if (name == "evaluate") return Command::Evaluate;
    if (name == "converge") return Command::Converge;
    if (name == "bounds") return Command::Bounds;
    if (name == "lipschitz") return Command::Lipschitz;
    if (name == "convexity") return Command::Convexity;
    if (name == "counterexample") return Command::Counterexample;
    if (name == "family-check") return Command::FamilyCheck;
    throw SpecError("unknown command \"" + name + "\"");
}

const char* to_string(Command c) {
    switch (c) {
        case Command::Evaluate: return "evaluate";
        case Command::Converge: return "converge";
        case Command::Bounds: return "bounds";
        case Command::Lipschitz: return "lipschitz";
        case Command::Convexity: return "convexity";
        case Command::Counterexample: return "counterexample";
        case Command::FamilyCheck: return "family-check";
    }
    return "?";
}

StrategyChoice strategy_from_name(const std::string& name) {
    if (name == "auto") return StrategyChoice::Auto;
    if (name == "closed-form") return StrategyChoice::ClosedForm;
    if (name == "rank") return StrategyChoice::Rank;
    if (name == "enumerate") return StrategyChoice::Enumerate;
    if (name == "monte-carlo") return StrategyChoice::MonteCarlo;
    throw SpecError("unknown strategy \"" + name + "\"");
}

void ExperimentSpec::validate() const {
    if (n_list.empty()) throw SpecError("n_list must be nonempty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) throw SpecError("n_list entries must be >= 1");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw SpecError("n_list must be ascending");
    }
    if (strategy == StrategyChoice::MonteCarlo && !seed)
        throw SpecError("monte-carlo strategy requires a seed");
    if (strategy == StrategyChoice::MonteCarlo && samples < 2)
        throw SpecError("monte-carlo strategy requires samples >= 2");
    if (fixed_delta && !(*fixed_delta > 0.0)) throw SpecError("delta must be positive");
}

ExperimentSpec spec_from_json(const json& config) {
    if (!config.is_object()) throw SpecError("config must be a JSON object");
    ExperimentSpec spec;
    try {
        if (config.contains("command"))
            spec.command = command_from_name(config.at("command").get<std::string>());
        if (config.contains("function"))
            spec.function = descriptor_from_json(config.at("function"));
        if (config.contains("point")) spec.point = point_from_json(config.at("point"));
        if (config.contains("n_list")) spec.n_list = config.at("n_list").get<std::vector<int>>();
        if (config.contains("family"))
            spec.family = family_from_name(config.at("family").get<std::string>());
        if (config.contains("anchor")) spec.anchor = point_from_json(config.at("anchor"));
        if (config.contains("strategy"))
            spec.strategy = strategy_from_name(config.at("strategy").get<std::string>());
        if (config.contains("budget")) spec.budget = config.at("budget").get<std::uint64_t>();
        if (config.contains("samples")) spec.samples = config.at("samples").get<std::uint64_t>();
        if (config.contains("seed")) spec.seed = config.at("seed").get<std::uint64_t>();
        if (config.contains("delta")) spec.fixed_delta = config.at("delta").get<double>();
        if (config.contains("radius")) spec.radius = config.at("radius").get<double>();
        if (config.contains("omega")) {
            const std::string w = config.at("omega").get<std::string>();
            if (w == "empirical") spec.empirical_omega = true;
            else if (w != "closed") throw SpecError("omega must be \"closed\" or \"empirical\"");
        }
        if (config.contains("lipschitz_m"))
            spec.lipschitz_m = config.at("lipschitz_m").get<double>();
        if (config.contains("pairs")) spec.pairs = config.at("pairs").get<std::size_t>();
        if (config.contains("triples")) spec.triples = config.at("triples").get<std::size_t>();
        if (config.contains("axis")) spec.axis = config.at("axis").get<std::size_t>();
        if (config.contains("t_grid"))
            spec.t_grid = config.at("t_grid").get<std::vector<double>>();
        if (config.contains("output")) {
            const json& out = config.at("output");
            if (out.contains("path")) spec.out_path = out.at("path").get<std::string>();
            if (out.contains("format")) {
                const std::string f = out.at("format").get<std::string>();
                if (f == "csv") spec.format = OutputFormat::Csv;
                else if (f == "json") spec.format = OutputFormat::Json;
                else throw SpecError("format must be csv or json");
            }
        }
    } catch (const json::exception& e) {
        throw SpecError(std::string("config: ") + e.what());
    }
    return spec;
}

std::string to_csv(const ReportTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ",";
        out += csv_escape(table.columns[c]);
    }
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += cell_text(row[c], false);
        }
        out += "\n";
    }
    return out;
}

std::string to_json_text(const ReportTable& table) {
    std::string out = "{\n  \"columns\": [";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ", ";
        out += json_escape(table.columns[c]);
    }
    out += "],\n  \"rows\": [\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += "    {";
        for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
            if (c) out += ", ";
            out += json_escape(table.columns[c]);
            out += ": ";
            out += cell_text(table.rows[r][c], true);
        }
        out += r + 1 < table.rows.size() ? "},\n" : "}\n";
    }
    out += "  ]\n}\n";
    return out;
}

ExperimentResult cmd_evaluate(const ExperimentSpec& spec) {
    spec.validate();
    const MappingDescriptor& F = required_function(spec);
    const SequencePoint& t = required_point(spec);
    const std::size_t dim = F.codomain_dim();

    ExperimentResult result;
    result.table.columns = {"n"};
    for (std::size_t k = 1; k <= dim; ++k)
        result.table.columns.push_back("v" + std::to_string(k));
    result.table.columns.insert(result.table.columns.end(), {"std_error", "engine"});

    for (int n : spec.n_list) {
        const EvalReport eval = run_engine(spec, F, t, n);
        std::vector<Cell> row{num(n)};
        for (double v : eval.value) row.push_back(num(v));
        row.push_back(eval.std_error ? num(*eval.std_error) : none());
        row.push_back(txt(eval.engine));
        result.table.rows.push_back(std::move(row));
    }
    return result;
}

ExperimentResult cmd_converge(const ExperimentSpec& spec) {
    spec.validate();
    const MappingDescriptor& F = required_function(spec);
    if (!F.scalar_registered() || F.codomain_dim() != 1)
        throw SpecError("converge requires a registered scalar function");
    const SequencePoint& t = required_point(spec);
    const double exact = evaluate_scalar(F, t);

    ExperimentResult result;
    result.table.columns = {"n", "error", "prediction", "std_error", "engine"};
    for (int n : spec.n_list) {
        const EvalReport eval = run_engine(spec, F, t, n);
        OperatorConfig cfg{spec.family, n, spec.anchor, ClosedForm{}};
        const double prediction = closed_form_eval(F, t, cfg).scalar() - exact;
        result.table.rows.push_back({num(n), num(eval.value[0] - exact), num(prediction),
                                     eval.std_error ? num(*eval.std_error) : none(),
                                     txt(eval.engine)});
    }
    return result;
}

ExperimentResult cmd_bounds(const ExperimentSpec& spec) {
    spec.validate();
    const MappingDescriptor& F = required_function(spec);
    const SequencePoint& t = required_point(spec);
    const std::size_t dim = F.codomain_dim();
    const ModulusFn omega =
        spec.empirical_omega
            ? empirical_modulus_fn(F, std::max<std::size_t>(spec.pairs, 100), spec.seed.value_or(0))
            : modulus_of(F, spec.radius);

    ExperimentResult result;
    result.table.columns = {"n"};
    for (std::size_t k = 1; k <= dim; ++k)
        result.table.columns.push_back("v" + std::to_string(k));
    result.table.columns.insert(result.table.columns.end(),
                                {"std_error", "engine", "bound", "gamma_sq", "omega", "provenance",
                                 "delta", "actual_error", "certifying", "pass"});

    const std::vector<double> exact = evaluate(F, t);
    for (int n : spec.n_list) {
        const EvalReport eval = run_engine(spec, F, t, n);
        const double actual = vec_norm_diff(eval.value, exact);
        const double gamma = gamma_sq(t, n, spec.family, spec.anchor);
        const double delta = spec.fixed_delta ? *spec.fixed_delta : std::sqrt(gamma);

        Modulus w;
        std::optional<double> bound;
        if (delta > 0.0) {
            w = omega(delta);
            if (w.known()) bound = w.value * (1.0 + gamma / (delta * delta));
        } else {
            w = omega(1.0);
            w.value = 0.0;  // interpolation point: gamma = 0 forces zero error
            if (w.known()) bound = 0.0;
        }
        const bool certifying = bound.has_value() && w.certifying();
        const bool pass = !certifying || actual <= *bound + kBoundSlack;
        if (!pass) {
            result.violation = true;
            result.message = "bound violated at n = " + std::to_string(n) + ": actual " +
                             fmt17(actual) + " > bound " + fmt17(*bound);
        }

        std::vector<Cell> row{num(n)};
        for (double v : eval.value) row.push_back(num(v));
        row.push_back(eval.std_error ? num(*eval.std_error) : none());
        row.push_back(txt(eval.engine));
        row.push_back(bound ? num(*bound) : none());
        row.push_back(num(gamma));
        row.push_back(w.known() ? num(w.value) : none());
        row.push_back(txt(to_string(w.provenance)));
        row.push_back(num(delta));
        row.push_back(num(actual));
        row.push_back(flag(certifying));
        row.push_back(flag(pass));
        result.table.rows.push_back(std::move(row));
    }
    return result;
}

ExperimentResult cmd_lipschitz(const ExperimentSpec& spec) {
    spec.validate();
    const MappingDescriptor& F = required_function(spec);
    const int max_n = spec.n_list.back();
    const std::size_t head_len =
        std::max<std::size_t>(F.effective_span(), static_cast<std::size_t>(max_n)) + 2;

    ExperimentResult result;
    result.table.columns = {"n", "max_ratio", "allowed", "pairs", "pass", "witness"};

    for (int n : spec.n_list) {
        std::mt19937_64 rng(spec.seed.value_or(0) + static_cast<std::uint64_t>(n));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double max_ratio = 0.0;
        SequencePoint worst_t, worst_u;
        std::size_t used = 0;
        for (std::size_t p = 0; p < spec.pairs; ++p) {
            const SequencePoint a = random_gamma_point(rng, head_len, p % 3 == 0);
            SequencePoint b;
            if (p % 2 == 0) {
                b = random_gamma_point(rng, head_len, p % 3 == 0);
            } else {
                // nearby pair: small perturbation stresses the local ratio
                std::vector<double> head(head_len);
                const double step = 0.02 + 0.3 * unif(rng);
                for (std::size_t k = 0; k < head_len; ++k)
                    head[k] = std::clamp(a.coord(k + 1) + step * (2.0 * unif(rng) - 1.0), 0.0, 1.0);
                b = SequencePoint::gamma(std::move(head), a.tail().is_zero() ? Tail::zero()
                                                                             : a.tail());
            }
            const double dist = distance(a, b);
            if (dist < 1e-9) continue;
            const EvalReport ea = run_engine(spec, F, a, n);
            const EvalReport eb = run_engine(spec, F, b, n);
            const double ratio = vec_norm_diff(ea.value, eb.value) / dist;
            ++used;
            if (ratio > max_ratio) {
                max_ratio = ratio;
                worst_t = a;
                worst_u = b;
            }
        }
        const double allowed = std::sqrt(static_cast<double>(n)) * spec.lipschitz_m + 1e-9;
        const bool pass = max_ratio <= allowed;
        if (!pass) {
            result.violation = true;
            result.message = "lipschitz ratio " + fmt17(max_ratio) + " exceeds sqrt(n) M = " +
                             fmt17(allowed) + " at n = " + std::to_string(n);
        }
        result.table.rows.push_back({num(n), num(max_ratio), num(allowed),
                                     num(static_cast<std::int64_t>(used)), flag(pass),
                                     txt(point_pair_json(worst_t, worst_u))});
    }
    return result;
}

ExperimentResult cmd_convexity(const ExperimentSpec& spec) {
    spec.validate();
    const MappingDescriptor& F = required_function(spec);
    if (F.codomain_dim() != 1) throw SpecError("convexity requires a scalar function");

    ExperimentResult result;
    result.table.columns = {"n", "axis", "checked", "violations", "pass", "witness"};

    for (int n : spec.n_list) {
        std::vector<std::size_t> axes;
        if (spec.axis) {
            axes = {*spec.axis};
        } else {
            for (int a = 1; a <= std::min(n, 4); ++a) axes.push_back(static_cast<std::size_t>(a));
        }
        for (std::size_t axis : axes) {
            std::mt19937_64 rng(spec.seed.value_or(0) + 1000 * static_cast<std::uint64_t>(n) + axis);
            auto G = [&](const SequencePoint& p) { return run_engine(spec, F, p, n).value[0]; };
            const std::size_t head_len =
                std::max(F.effective_span(), static_cast<std::size_t>(n)) + 2;
            const ConvexityReport report =
                convexity_probe(G, axis, spec.triples, rng, head_len);
            const bool pass = report.ok();
            std::string witness;
            if (!pass) {
                result.violation = true;
                const auto& v = report.violations.front();
                json w;
                w["base"] = to_json(v.base);
                w["axis"] = v.axis;
                w["a"] = v.a;
                w["b"] = v.b;
                w["lambda"] = v.lambda;
                w["lhs"] = v.lhs;
                w["rhs"] = v.rhs;
                witness = w.dump();
                result.message = "convexity violated at n = " + std::to_string(n) + ", axis " +
                                 std::to_string(axis);
            }
            result.table.rows.push_back({num(n), num(static_cast<std::int64_t>(axis)),
                                         num(static_cast<std::int64_t>(report.checked)),
                                         num(static_cast<std::int64_t>(report.violations.size())),
                                         flag(pass), pass ? none() : txt(witness)});
        }
    }
    return result;
}

ExperimentResult cmd_counterexample(const ExperimentSpec& spec) {
    spec.validate();
    const SequencePoint& pattern = required_point(spec);
    const MappingDescriptor fbar = MappingDescriptor::fbar();

    ExperimentResult result;
    result.table.columns = {"n", "gap4", "gap5", "gap4_enum", "gap5_enum", "pass"};

    for (int n : spec.n_list) {
        // t-bar: n leading ones, then the supplied tail pattern
        std::vector<double> head(static_cast<std::size_t>(n), 1.0);
        head.insert(head.end(), pattern.head().begin(), pattern.head().end());
        const SequencePoint tbar = SequencePoint::gamma(std::move(head), pattern.tail());

        OperatorConfig cfg{spec.family, n, spec.anchor, ClosedForm{}};
        const double f_at = evaluate_scalar(fbar, tbar);
        const double gap4 = f_at - closed_form_eval(fbar, tbar, cfg).scalar();
        const double gap5 = closed_form_eval(fbar, tbar, cfg.with_n(n + 1)).scalar() -
                            closed_form_eval(fbar, tbar, cfg).scalar();

        Cell gap4_enum = none();
        Cell gap5_enum = none();
        bool enum_ok = true;
        const OperatorConfig ecfg = cfg.with_strategy(Enumerate{spec.budget});
        if (index_count(n) <= boost::multiprecision::cpp_int(spec.budget)) {
            const double g4 = f_at - enumerate_eval(fbar, tbar, ecfg).scalar();
            gap4_enum = num(g4);
            enum_ok = enum_ok && g4 >= -kGapTolerance;
            if (index_count(n + 1) <= boost::multiprecision::cpp_int(spec.budget)) {
                const double g5 = enumerate_eval(fbar, tbar, ecfg.with_n(n + 1)).scalar() -
                                  enumerate_eval(fbar, tbar, ecfg).scalar();
                gap5_enum = num(g5);
                enum_ok = enum_ok && g5 >= -kGapTolerance;
            }
        }

        const bool pass = gap4 >= -kGapTolerance && gap5 >= -kGapTolerance && enum_ok;
        if (!pass) {
            result.violation = true;
            result.message = "counterexample gap went negative at n = " + std::to_string(n);
        }
        result.table.rows.push_back(
            {num(n), num(gap4), num(gap5), gap4_enum, gap5_enum, flag(pass)});
    }
    return result;
}

ExperimentResult cmd_family_check(const ExperimentSpec& spec) {
    spec.validate();
    const std::vector<double> grid = spec.t_grid.empty() ? default_t_grid(spec.family) : spec.t_grid;
    const FamilyCheckReport report = family_check(spec.family, spec.n_list, grid);

    ExperimentResult result;
    result.table.columns = {"n",        "m0_err",   "m1_err",      "m2_err", "coeff_e2",
                            "coeff_e1", "coeff_const", "flagged", "pass"};

    for (std::size_t i = 0; i < spec.n_list.size(); ++i) {
        const int n = spec.n_list[i];
        double m0 = 0.0, m1 = 0.0, m2 = 0.0;
        bool pass = true;
        for (const auto& id : report.identities) {
            if (id.n != n) continue;
            m0 = std::max(m0, id.m0_err);
            m1 = std::max(m1, id.m1_err);
            m2 = std::max(m2, id.m2_vs_closed);
        }
        if (m0 > 1e-10 || m1 > 1e-10 || m2 > 1e-8) pass = false;
        const auto& fit = report.fits[i];
        result.table.rows.push_back({num(n), num(m0), num(m1), num(m2),
                                     std::isnan(fit.coeff_e2) ? none() : num(fit.coeff_e2),
                                     std::isnan(fit.coeff_e1) ? none() : num(fit.coeff_e1),
                                     std::isnan(fit.coeff_const) ? none() : num(fit.coeff_const),
                                     flag(report.flagged_const_residual), flag(pass)});
        if (!pass) {
            result.violation = true;
            result.message = "family identities violated at n = " + std::to_string(n);
        }
    }
    if (!result.violation && report.flagged_const_residual)
        result.message = std::string(spec.family.name()) +
                         ": constant second-moment residual on the order of 1/n (flagged)";
    return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    switch (spec.command) {
        case Command::Evaluate: return cmd_evaluate(spec);
        case Command::Converge: return cmd_converge(spec);
        case Command::Bounds: return cmd_bounds(spec);
        case Command::Lipschitz: return cmd_lipschitz(spec);
        case Command::Convexity: return cmd_convexity(spec);
        case Command::Counterexample: return cmd_counterexample(spec);
        case Command::FamilyCheck: return cmd_family_check(spec);
    }
    throw SpecError("unknown command");
}

std::string render(const ExperimentSpec& spec, const ReportTable& table) {
    return spec.format == OutputFormat::Csv ? to_csv(table) : to_json_text(table);
}

}  // namespace approxop
