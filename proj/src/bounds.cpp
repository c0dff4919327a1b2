#include "approxop/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "approxop/summation.hpp"

namespace approxop {

namespace {

double vec_norm_diff(std::span<const double> a, std::span<const double> b) {
    NeumaierSum s;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s.add(d * d);
    }
    return std::sqrt(s.value());
}

}  // namespace

ModulusFn modulus_of(const MappingDescriptor& F, std::optional<double> radius) {
    return [F, radius](double delta) { return modulus(F, delta, radius); };
}

ModulusFn empirical_modulus_fn(const MappingDescriptor& F, std::size_t sample_count,
                               std::uint64_t seed) {
    return [F, sample_count, seed](double delta) {
        std::mt19937_64 rng(seed);
        return Modulus{empirical_modulus(F, delta, sample_count, rng),
                       OmegaProvenance::EmpiricalLower};
    };
}

double gamma_sq(const SequencePoint& t, int n, const KernelFamily& family,
                const SequencePoint& anchor) {
    OperatorConfig config{family, n, anchor, ClosedForm{}};
    return closed_form_eval(MappingDescriptor::psi_sq(t), t, config).scalar();
}

BoundReport ucb_bound(const ModulusFn& omega, const SequencePoint& t, int n, double delta,
                      const KernelFamily& family, const SequencePoint& anchor) {
    if (!(delta > 0.0)) throw std::domain_error("ucb_bound requires delta > 0");
    BoundReport report;
    report.n = n;
    report.point = t;
    report.gamma_sq = gamma_sq(t, n, family, anchor);
    report.delta = delta;
    report.omega = omega(delta);
    if (report.omega.known())
        report.bound = report.omega.value * (1.0 + report.gamma_sq / (delta * delta));
    return report;
}

double relaxed_delta(const SequencePoint& t, int n) {
    const double norm = std::sqrt(t.norm_sq());
    const double arg_sq =
        t.tail_sq(static_cast<std::size_t>(n)) + norm / std::sqrt(static_cast<double>(n)) +
        norm * norm / static_cast<double>(n);
    return std::sqrt(arg_sq);
}

BoundReport ucb_bound_relaxed(const ModulusFn& omega, const SequencePoint& t, int n) {
    BoundReport report;
    report.n = n;
    report.point = t;
    report.gamma_sq = gamma_sq(t, n, KernelFamily::bernstein(), SequencePoint{});
    report.delta = relaxed_delta(t, n);
    if (report.delta == 0.0) {
        // t = 0 and empty tail: the operator interpolates exactly
        report.omega = omega(1.0);
        report.omega.value = 0.0;
        report.bound = 0.0;
        return report;
    }
    report.omega = omega(report.delta);
    if (report.omega.known()) report.bound = 2.0 * report.omega.value;
    return report;
}

double general_bound(double S_n_one, double gamma_sq, double norm_F_t, const ModulusFn& omega,
                     double delta) {
    if (!(S_n_one >= 0.0)) throw std::domain_error("general_bound requires S_n(1) >= 0");
    if (!(delta > 0.0)) throw std::domain_error("general_bound requires delta > 0");
    const Modulus w = omega(delta);
    if (!w.known()) return std::numeric_limits<double>::quiet_NaN();
    return norm_F_t * std::abs(S_n_one - 1.0) +
           w.value * (S_n_one + gamma_sq / (delta * delta));
}

BoundReport bound_vs_actual(const MappingDescriptor& F, const SequencePoint& t,
                            const OperatorConfig& config, const DeltaPolicy& policy,
                            std::optional<double> radius, std::optional<ModulusFn> omega_override) {
    const ModulusFn omega = omega_override ? *omega_override : modulus_of(F, radius);

    BoundReport report;
    report.n = config.n;
    report.point = t;
    report.gamma_sq = gamma_sq(t, config.n, config.family, config.anchor);
    report.delta = std::holds_alternative<FixedDelta>(policy)
                       ? std::get<FixedDelta>(policy).delta
                       : std::sqrt(report.gamma_sq);

    if (report.delta > 0.0) {
        report.omega = omega(report.delta);
        if (report.omega.known())
            report.bound =
                report.omega.value * (1.0 + report.gamma_sq / (report.delta * report.delta));
    } else if (report.gamma_sq == 0.0) {
        // delta = sqrt(gamma) at an interpolation point: zero error, zero bound
        report.omega = omega(1.0);
        report.omega.value = 0.0;
        if (report.omega.known()) report.bound = 0.0;
    } else {
        throw std::domain_error("fixed delta policy requires delta > 0");
    }

    const EvalReport eval = std::holds_alternative<MonteCarlo>(config.strategy)
                                ? mc_eval(F, t, config)
                                : auto_eval(F, t, config);
    const std::vector<double> exact = evaluate(F, t);
    report.actual_error = vec_norm_diff(eval.value, exact);
    report.actual_std_error = eval.std_error;
    return report;
}

}  // namespace approxop
