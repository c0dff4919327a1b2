#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "approxop/diag_operator.hpp"
#include "approxop/function_model.hpp"
#include "approxop/sequence_space.hpp"

namespace approxop {

/// How to pick the delta in the modulus bound: a fixed value, or the
/// variance-matching choice delta = sqrt(gamma_n^2(t)) which yields the
/// two-omega form of the estimate.
struct FixedDelta {
    double delta;
};
struct SqrtGamma {};
using DeltaPolicy = std::variant<FixedDelta, SqrtGamma>;

using ModulusFn = std::function<Modulus(double)>;

/// Modulus accessor of a registered form (closed forms; Unknown for rank/
/// black-box mappings).
ModulusFn modulus_of(const MappingDescriptor& F, std::optional<double> radius = {});

/// Accessor producing sampled lower-bound moduli (never certifies a bound).
ModulusFn empirical_modulus_fn(const MappingDescriptor& F, std::size_t sample_count,
                               std::uint64_t seed);

struct BoundReport {
    double gamma_sq = 0.0;
    double delta = 0.0;
    Modulus omega;                            // value at delta + provenance
    std::optional<double> bound;              // absent when omega is Unknown
    std::optional<double> actual_error;       // ||L_n(F)(t) - F(t)||, when computed
    std::optional<double> actual_std_error;   // present when actual came from MC
    int n = 0;
    SequencePoint point;

    /// True when the bound is a mathematical guarantee (exact or upper omega).
    bool certifying() const { return bound.has_value() && omega.certifying(); }
};

/// gamma_n^2(t) = L_n(psi_t^2)(t), by closed form. For Bernstein with zero
/// anchor this equals tail_sq(t, n) + sum_{j<=n} (t_j - t_j^2)/n exactly.
double gamma_sq(const SequencePoint& t, int n, const KernelFamily& family,
                const SequencePoint& anchor = {});

/// The modulus estimate ||L_n(F)(t) - F(t)|| <= omega(delta) (1 + gamma^2/delta^2).
BoundReport ucb_bound(const ModulusFn& omega, const SequencePoint& t, int n, double delta,
                      const KernelFamily& family, const SequencePoint& anchor = {});

/// The coarser two-omega form 2 omega(sqrt(tail + ||t||/sqrt(n) + ||t||^2/n))
/// (Bernstein, zero anchor); uses only tail_sq, the norm, and n.
BoundReport ucb_bound_relaxed(const ModulusFn& omega, const SequencePoint& t, int n);

/// The sqrt argument of the relaxed bound (exported for the monotonicity
/// property: it dominates sqrt(gamma^2)).
double relaxed_delta(const SequencePoint& t, int n);

/// Abstract estimate ||F(t)|| |S_n(1)(t) - 1| + omega(delta) [S_n(1)(t) +
/// gamma^2/delta^2]. All five built-in families have S_n(1) = 1, collapsing
/// the first term. Returns NaN if the modulus is Unknown.
double general_bound(double S_n_one, double gamma_sq, double norm_F_t, const ModulusFn& omega,
                     double delta);

/// Joins an engine evaluation of the actual error with the modulus bound
/// under the given delta policy. The engine is the best exact one available
/// (closed form / rank / enumeration), falling back to Monte Carlo; an
/// explicit MonteCarlo strategy in the config is honored.
BoundReport bound_vs_actual(const MappingDescriptor& F, const SequencePoint& t,
                            const OperatorConfig& config, const DeltaPolicy& policy,
                            std::optional<double> radius = {},
                            std::optional<ModulusFn> omega_override = {});

}  // namespace approxop
