#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "approxop/bounds.hpp"
#include "approxop/diag_operator.hpp"
#include "approxop/serialization.hpp"

namespace approxop {

enum class Command { Evaluate, Converge, Bounds, Lipschitz, Convexity, Counterexample, FamilyCheck };
enum class StrategyChoice { Auto, ClosedForm, Rank, Enumerate, MonteCarlo };
enum class OutputFormat { Csv, Json };

Command command_from_name(const std::string& name);
const char* to_string(Command c);
StrategyChoice strategy_from_name(const std::string& name);

/// One experiment: command, inputs, engine knobs, output target. Parsed from
/// a JSON config document; CLI flags override individual fields.
struct ExperimentSpec {
    Command command = Command::Evaluate;
    std::optional<MappingDescriptor> function;
    std::optional<SequencePoint> point;
    std::vector<int> n_list;
    KernelFamily family = KernelFamily::bernstein();
    SequencePoint anchor;
    StrategyChoice strategy = StrategyChoice::Auto;
    std::uint64_t budget = Enumerate{}.budget;
    std::uint64_t samples = 100'000;
    std::optional<std::uint64_t> seed;
    std::optional<double> fixed_delta;   // absent: delta = sqrt(gamma) policy
    std::optional<double> radius;        // norm bound for NormSq/PsiSq moduli
    bool empirical_omega = false;        // bounds: sampled lower-bound modulus
    double lipschitz_m = 1.0;
    std::size_t pairs = 1000;            // lipschitz sampling
    std::size_t triples = 200;           // convexity sampling per axis
    std::optional<std::size_t> axis;     // convexity: fixed axis (default 1..n)
    std::vector<double> t_grid;          // family-check grid (default per family)
    std::optional<std::string> out_path; // default stdout
    OutputFormat format = OutputFormat::Csv;

    /// Throws SpecError on invariant violations (empty/descending n_list,
    /// Monte Carlo without seed, missing function/point).
    void validate() const;
};

ExperimentSpec spec_from_json(const nlohmann::json& config);

/// Tabular result with typed cells; rendered to CSV or JSON with identical
/// numeric formatting (17 significant digits).
struct ReportTable {
    using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string to_csv(const ReportTable& table);
std::string to_json_text(const ReportTable& table);

struct ExperimentResult {
    ReportTable table;
    bool violation = false;   // a checked property failed (CLI exit code 4)
    std::string message;      // human-readable summary / violation detail
};

ExperimentResult cmd_evaluate(const ExperimentSpec& spec);
ExperimentResult cmd_converge(const ExperimentSpec& spec);
ExperimentResult cmd_bounds(const ExperimentSpec& spec);
ExperimentResult cmd_lipschitz(const ExperimentSpec& spec);
ExperimentResult cmd_convexity(const ExperimentSpec& spec);
ExperimentResult cmd_counterexample(const ExperimentSpec& spec);
ExperimentResult cmd_family_check(const ExperimentSpec& spec);

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Render per spec.format and write to spec.out_path (or return only).
std::string render(const ExperimentSpec& spec, const ReportTable& table);

}  // namespace approxop
