#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "approxop/function_model.hpp"
#include "approxop/kernels1d.hpp"
#include "approxop/sequence_space.hpp"

namespace approxop {

/// Evaluation strategies for the diagonal operator L_n.
struct Enumerate {
    std::uint64_t budget = 10'000'000;  // max term count (n+1)^n
};
struct ClosedForm {};
struct RankFactor {
    double tol = 1e-10;  // tolerance handed to the 1-D lifts
};
struct MonteCarlo {
    std::uint64_t samples = 10'000;
    std::uint64_t seed = 0;
};
using Strategy = std::variant<Enumerate, ClosedForm, RankFactor, MonteCarlo>;

/// Everything needed to evaluate L_n(F): the 1-D family, the index n (which
/// is also the sampled dimension), the anchor sequence s substituted beyond
/// coordinate n (default zero, the paper-parity choice), and the engine.
struct OperatorConfig {
    KernelFamily family = KernelFamily::bernstein();
    int n = 1;
    SequencePoint anchor;  // zero point by default
    Strategy strategy = ClosedForm{};

    OperatorConfig with_n(int new_n) const {
        OperatorConfig c = *this;
        c.n = new_n;
        return c;
    }
    OperatorConfig with_strategy(Strategy s) const {
        OperatorConfig c = *this;
        c.strategy = std::move(s);
        return c;
    }
};

struct EvalReport {
    std::vector<double> value;
    std::optional<double> std_error;  // present iff engine == "monte-carlo"
    std::uint64_t terms_or_samples = 0;
    std::string engine;

    double scalar() const { return value.at(0); }
};

/// |A_n| = (n+1)^n, exactly.
boost::multiprecision::cpp_int index_count(int n);

/// Exact sum over the full grid A_n (Bernstein only): compensated
/// accumulation in deterministic lexicographic order. Throws
/// FeasibilityError when (n+1)^n exceeds the budget.
EvalReport enumerate_eval(const MappingDescriptor& F, const SequencePoint& t,
                          const OperatorConfig& config);

/// Exact evaluation via the family moments for the registered scalar forms
/// (optionally tensored). Throws StrategyError for other forms.
EvalReport closed_form_eval(const MappingDescriptor& F, const SequencePoint& t,
                            const OperatorConfig& config);

/// Factorized evaluation of rank-structured mappings: a product of 1-D lifts
/// per term instead of a full grid sum.
EvalReport rank_eval(const MappingDescriptor& F, const SequencePoint& t,
                     const OperatorConfig& config);

/// Monte Carlo estimate: i.i.d. grid points drawn coordinate-wise from
/// mu_n(.;t_j). Reproducible given the seed (fixed batch split, independent
/// of threading).
EvalReport mc_eval(const MappingDescriptor& F, const SequencePoint& t,
                   const OperatorConfig& config);

/// Dispatch on config.strategy.
EvalReport evaluate_operator(const MappingDescriptor& F, const SequencePoint& t,
                             const OperatorConfig& config);

/// Fallback order closed-form -> rank -> enumerate -> monte-carlo; used by the
/// CLI "auto" strategy. mc_samples/mc_seed apply only if Monte Carlo is
/// reached.
EvalReport auto_eval(const MappingDescriptor& F, const SequencePoint& t,
                     const OperatorConfig& config, std::uint64_t mc_samples = 100'000,
                     std::uint64_t mc_seed = 0);

/// Finite-dimensional product operator L_{n,k} applied to a scalar function
/// on I^k. Enumerate is Bernstein-only; Monte Carlo works for every family.
double product_eval_k(const std::function<double(std::span<const double>)>& f,
                      std::span<const double> t, const KernelFamily& family, int n,
                      const Strategy& strategy);

}  // namespace approxop
