#include "approxop/diag_operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "approxop/errors.hpp"
#include "approxop/summation.hpp"

namespace approxop {

namespace {

using boost::multiprecision::cpp_int;

// Deterministic seed split: batch k of a run uses the (k+1)-th splitmix64
// output of the run seed, so results do not depend on how batches are
// scheduled.
std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kMcBatch = 4096;

void validate_config(const OperatorConfig& config) {
    if (config.n < 1) throw std::domain_error("operator index n must be >= 1");
    const Interval dom = config.family.domain();
    const SequencePoint& s = config.anchor;
    for (double x : s.head())
        if (!dom.contains(x)) throw std::domain_error("anchor coordinate outside the family domain");
    if (!s.tail().is_zero()) {
        const double cr = s.tail().c * s.tail().r;
        if (!dom.contains(cr) || !dom.contains(cr * s.tail().r) || !dom.contains(0.0))
            throw std::domain_error("anchor tail leaves the family domain");
    }
}

std::uint64_t checked_term_count(int n, std::uint64_t budget, const char* what) {
    const cpp_int count = index_count(n);
    if (count > cpp_int(budget))
        throw FeasibilityError(std::string(what) + " infeasible: index_count(" +
                               std::to_string(n) + ") = (n+1)^n = " + count.str() +
                               " exceeds budget " + std::to_string(budget) +
                               "; use closed-form, rank, or monte-carlo");
    return count.convert_to<std::uint64_t>();
}

// basis weight tables W[j][h] = psi_{n,h}(t_j), one row per coordinate
std::vector<std::vector<double>> basis_tables(int n, std::span<const double> coords) {
    std::vector<std::vector<double>> tables(coords.size());
    for (std::size_t j = 0; j < coords.size(); ++j)
        tables[j] = bernstein_basis_row(n, coords[j]).weights;
    return tables;
}

}  // namespace

cpp_int index_count(int n) {
    if (n < 1) throw std::domain_error("index_count requires n >= 1");
    return boost::multiprecision::pow(cpp_int(n + 1), static_cast<unsigned>(n));
}

EvalReport enumerate_eval(const MappingDescriptor& F, const SequencePoint& t,
                          const OperatorConfig& config) {
    validate_config(config);
    if (config.family.kind() != FamilyKind::Bernstein)
        throw StrategyError("enumeration is defined for the Bernstein family only");
    const Enumerate* opts = std::get_if<Enumerate>(&config.strategy);
    const std::uint64_t budget = opts ? opts->budget : Enumerate{}.budget;
    const int n = config.n;
    const std::uint64_t total = checked_term_count(n, budget, "enumeration");

    std::vector<double> coords(n);
    for (int j = 1; j <= n; ++j) coords[j - 1] = t.coord(j);
    const auto tables = basis_tables(n, coords);

    std::vector<double> nodes(n + 1);
    for (int h = 0; h <= n; ++h) nodes[h] = static_cast<double>(h) / n;

    const std::size_t dim = F.codomain_dim();
    std::vector<NeumaierSum> acc(dim);
    std::vector<int> h(n, 0);
    std::vector<double> grid(n, 0.0), fval;

    for (std::uint64_t term = 0; term < total; ++term) {
        double weight = 1.0;
        for (int j = 0; j < n; ++j) weight *= tables[j][h[j]];
        if (weight != 0.0) {
            for (int j = 0; j < n; ++j) grid[j] = nodes[h[j]];
            evaluate_on_grid(F, grid, config.anchor, fval);
            for (std::size_t k = 0; k < dim; ++k) acc[k].add(weight * fval[k]);
        }
        // lexicographic odometer over {0..n}^n
        for (int j = n - 1; j >= 0; --j) {
            if (++h[j] <= n) break;
            h[j] = 0;
        }
    }

    EvalReport report;
    report.value.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) report.value[k] = acc[k].value();
    report.terms_or_samples = total;
    report.engine = "enumerate";
    return report;
}

EvalReport closed_form_eval(const MappingDescriptor& F, const SequencePoint& t,
                            const OperatorConfig& config) {
    validate_config(config);
    if (!F.scalar_registered())
        throw StrategyError("closed form is available for registered scalar forms only");
    const KernelFamily& fam = config.family;
    const int n = config.n;
    const SequencePoint& s = config.anchor;
    const std::size_t un = static_cast<std::size_t>(n);

    double value = 0.0;
    switch (F.form()) {
        case MappingDescriptor::FormKind::One: value = 1.0; break;
        case MappingDescriptor::FormKind::Coord: {
            const std::size_t j = F.coord_index();
            value = j <= un ? family_moment(fam, n, t.coord(j), 1) : s.coord(j);
            break;
        }
        case MappingDescriptor::FormKind::CoordSq: {
            const std::size_t j = F.coord_index();
            if (j <= un) {
                value = family_moment(fam, n, t.coord(j), 2);
            } else {
                const double sj = s.coord(j);
                value = sj * sj;
            }
            break;
        }
        case MappingDescriptor::FormKind::LinearFunctional: {
            const SequencePoint& phi = F.coefficients();
            NeumaierSum acc;
            t.for_each_coord(un, [&](std::size_t j, double tj) {
                acc.add(phi.coord(j) * family_moment(fam, n, tj, 1));
            });
            acc.add(inner_from(phi, s, un));
            value = acc.value();
            break;
        }
        case MappingDescriptor::FormKind::NormSq: {
            NeumaierSum acc;
            t.for_each_coord(un,
                             [&](std::size_t, double tj) { acc.add(family_moment(fam, n, tj, 2)); });
            acc.add(s.tail_sq(un));
            value = acc.value();
            break;
        }
        case MappingDescriptor::FormKind::PsiSq: {
            const SequencePoint& c = F.center();
            NeumaierSum acc;
            t.for_each_coord(un, [&](std::size_t j, double tj) {
                const double cj = c.coord(j);
                acc.add(family_moment(fam, n, tj, 2) - 2.0 * cj * family_moment(fam, n, tj, 1) +
                        cj * cj);
            });
            acc.add(distance_sq_from(s, c, un));
            value = acc.value();
            break;
        }
        case MappingDescriptor::FormKind::Fbar: {
            NeumaierSum acc;
            double w = 1.0;
            std::size_t next = 1;
            t.for_each_coord(un, [&](std::size_t j, double tj) {
                for (; next <= j; ++next) w *= 0.5;
                acc.add(w * family_moment(fam, n, tj, 2));
            });
            acc.add(fbar_weighted_tail(s, un));
            value = acc.value();
            break;
        }
        default: throw StrategyError("unsupported form for closed-form evaluation");
    }

    EvalReport report;
    if (F.has_tensor()) {
        report.value.assign(F.tensor().begin(), F.tensor().end());
        for (double& x : report.value) x *= value;
    } else {
        report.value = {value};
    }
    report.terms_or_samples = static_cast<std::uint64_t>(n);
    report.engine = "closed-form";
    return report;
}

EvalReport rank_eval(const MappingDescriptor& F, const SequencePoint& t,
                     const OperatorConfig& config) {
    validate_config(config);
    if (F.form() != MappingDescriptor::FormKind::RankStructured)
        throw StrategyError("rank engine requires a rank-structured mapping");
    const RankFactor* opts = std::get_if<RankFactor>(&config.strategy);
    const double tol = opts ? opts->tol : RankFactor{}.tol;
    const int n = config.n;
    const std::size_t un = static_cast<std::size_t>(n);

    const std::size_t dim = F.codomain_dim();
    std::vector<NeumaierSum> acc(dim);
    std::uint64_t lifts = 0;
    for (const RankTerm& term : F.terms()) {
        double prod = 1.0;
        for (std::size_t j = 1; j <= term.factors.size(); ++j) {
            const Factor1D& gj = term.factors[j - 1];
            if (j <= un) {
                prod *= lift1d(config.family, n, [&gj](double u) { return gj(u); }, t.coord(j), tol);
                ++lifts;
            } else {
                prod *= gj(config.anchor.coord(j));
            }
        }
        for (std::size_t k = 0; k < dim; ++k) acc[k].add(prod * term.coeff[k]);
    }

    EvalReport report;
    report.value.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) report.value[k] = acc[k].value();
    report.terms_or_samples = lifts;
    report.engine = "rank";
    return report;
}

EvalReport mc_eval(const MappingDescriptor& F, const SequencePoint& t,
                   const OperatorConfig& config) {
    validate_config(config);
    const MonteCarlo* opts = std::get_if<MonteCarlo>(&config.strategy);
    const MonteCarlo mc = opts ? *opts : MonteCarlo{};
    if (mc.samples < 2) throw std::domain_error("monte carlo requires samples >= 2");
    const int n = config.n;

    std::vector<double> coords(n);
    for (int j = 1; j <= n; ++j) coords[j - 1] = t.coord(j);

    const std::size_t dim = F.codomain_dim();
    std::vector<NeumaierSum> sum(dim), sum_sq(dim);
    std::vector<double> grid(n), fval;

    std::uint64_t state = mc.seed;
    for (std::uint64_t done = 0; done < mc.samples;) {
        std::mt19937_64 rng(splitmix64_next(state));
        const std::uint64_t batch = std::min<std::uint64_t>(kMcBatch, mc.samples - done);
        for (std::uint64_t i = 0; i < batch; ++i) {
            for (int j = 0; j < n; ++j)
                grid[j] = family_sample(config.family, n, coords[j], rng);
            evaluate_on_grid(F, grid, config.anchor, fval);
            for (std::size_t k = 0; k < dim; ++k) {
                sum[k].add(fval[k]);
                sum_sq[k].add(fval[k] * fval[k]);
            }
        }
        done += batch;
    }

    EvalReport report;
    report.value.resize(dim);
    const double N = static_cast<double>(mc.samples);
    double worst_se = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double mean = sum[k].value() / N;
        report.value[k] = mean;
        const double var = std::max(0.0, (sum_sq[k].value() - N * mean * mean) / (N - 1.0));
        worst_se = std::max(worst_se, std::sqrt(var / N));
    }
    report.std_error = worst_se;
    report.terms_or_samples = mc.samples;
    report.engine = "monte-carlo";
    return report;
}

EvalReport evaluate_operator(const MappingDescriptor& F, const SequencePoint& t,
                             const OperatorConfig& config) {
    return std::visit(
        [&](const auto& strat) -> EvalReport {
            using T = std::decay_t<decltype(strat)>;
            if constexpr (std::is_same_v<T, Enumerate>) return enumerate_eval(F, t, config);
            else if constexpr (std::is_same_v<T, ClosedForm>) return closed_form_eval(F, t, config);
            else if constexpr (std::is_same_v<T, RankFactor>) return rank_eval(F, t, config);
            else return mc_eval(F, t, config);
        },
        config.strategy);
}

EvalReport auto_eval(const MappingDescriptor& F, const SequencePoint& t,
                     const OperatorConfig& config, std::uint64_t mc_samples,
                     std::uint64_t mc_seed) {
    if (F.scalar_registered()) return closed_form_eval(F, t, config.with_strategy(ClosedForm{}));
    if (F.form() == MappingDescriptor::FormKind::RankStructured)
        return rank_eval(F, t, config.with_strategy(RankFactor{}));
    if (config.family.kind() == FamilyKind::Bernstein) {
        const std::uint64_t budget =
            std::holds_alternative<Enumerate>(config.strategy)
                ? std::get<Enumerate>(config.strategy).budget
                : Enumerate{}.budget;
        if (index_count(config.n) <= cpp_int(budget))
            return enumerate_eval(F, t, config.with_strategy(Enumerate{budget}));
    }
    return mc_eval(F, t, config.with_strategy(MonteCarlo{mc_samples, mc_seed}));
}

double product_eval_k(const std::function<double(std::span<const double>)>& f,
                      std::span<const double> t, const KernelFamily& family, int n,
                      const Strategy& strategy) {
    const int k = static_cast<int>(t.size());
    if (k < 1) throw std::domain_error("product operator requires k >= 1");
    if (n < 1) throw std::domain_error("product operator requires n >= 1");

    if (const MonteCarlo* mc = std::get_if<MonteCarlo>(&strategy)) {
        if (mc->samples < 2) throw std::domain_error("monte carlo requires samples >= 2");
        NeumaierSum sum;
        std::vector<double> u(k);
        std::uint64_t state = mc->seed;
        for (std::uint64_t done = 0; done < mc->samples;) {
            std::mt19937_64 rng(splitmix64_next(state));
            const std::uint64_t batch = std::min<std::uint64_t>(kMcBatch, mc->samples - done);
            for (std::uint64_t i = 0; i < batch; ++i) {
                for (int j = 0; j < k; ++j) u[j] = family_sample(family, n, t[j], rng);
                sum.add(f(u));
            }
            done += batch;
        }
        return sum.value() / static_cast<double>(mc->samples);
    }

    if (k == 1) {
        const double tol = std::holds_alternative<RankFactor>(strategy)
                               ? std::get<RankFactor>(strategy).tol
                               : 1e-12;
        return lift1d(family, n, [&f](double u) { return f(std::span<const double>(&u, 1)); },
                      t[0], tol);
    }

    if (!std::holds_alternative<Enumerate>(strategy))
        throw StrategyError("product operator in dimension > 1 supports enumerate or monte-carlo");
    if (family.kind() != FamilyKind::Bernstein)
        throw StrategyError("product enumeration is defined for the Bernstein family only");

    const std::uint64_t budget = std::get<Enumerate>(strategy).budget;
    const cpp_int count = boost::multiprecision::pow(cpp_int(n + 1), static_cast<unsigned>(k));
    if (count > cpp_int(budget))
        throw FeasibilityError("product enumeration infeasible: (n+1)^k = " + count.str() +
                               " exceeds budget " + std::to_string(budget));
    const std::uint64_t total = count.convert_to<std::uint64_t>();

    const auto tables = basis_tables(n, t);
    std::vector<double> nodes(n + 1);
    for (int h = 0; h <= n; ++h) nodes[h] = static_cast<double>(h) / n;

    NeumaierSum acc;
    std::vector<int> h(k, 0);
    std::vector<double> u(k, 0.0);
    for (std::uint64_t term = 0; term < total; ++term) {
        double weight = 1.0;
        for (int j = 0; j < k; ++j) weight *= tables[j][h[j]];
        if (weight != 0.0) {
            for (int j = 0; j < k; ++j) u[j] = nodes[h[j]];
            acc.add(weight * f(u));
        }
        for (int j = k - 1; j >= 0; --j) {
            if (++h[j] <= n) break;
            h[j] = 0;
        }
    }
    return acc.value();
}

}  // namespace approxop
