#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "approxop/sequence_space.hpp"

namespace approxop {

/// 1-D factor of a rank-structured (separable) mapping.
class Factor1D {
public:
    enum class Kind { Constant, Identity, Poly, AbsDev, Custom };

    static Factor1D constant(double v);
    static Factor1D identity();
    /// coeffs[0] + coeffs[1] u + coeffs[2] u^2 + ...
    static Factor1D poly(std::vector<double> coeffs);
    /// |u - center|
    static Factor1D abs_dev(double center);
    /// Programmatic factor; not serializable.
    static Factor1D custom(std::function<double(double)> fn);

    double operator()(double u) const;

    Kind kind() const { return kind_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double center() const { return center_; }
    double value() const { return value_; }

private:
    Kind kind_ = Kind::Constant;
    double value_ = 1.0;
    double center_ = 0.0;
    std::vector<double> coeffs_;
    std::function<double(double)> fn_;
};

/// One term v * g_1(u_1) * ... * g_K(u_K) of a rank-structured mapping;
/// factors beyond K are implicitly the constant 1.
struct RankTerm {
    std::vector<double> coeff;     // v in R^d
    std::vector<Factor1D> factors;
};

/// Opaque evaluator over a truncated head of fixed arity.
struct BlackBoxFn {
    std::function<void(std::span<const double>, std::span<double>)> eval;
    std::size_t arity = 0;
    std::size_t dim = 1;
    bool thread_safe = true;
};

enum class OmegaProvenance { Exact, Upper, EmpiricalLower, Unknown };

/// Modulus-of-continuity value with the guarantee attached to it. Only Exact
/// and Upper values can certify error bounds.
struct Modulus {
    double value = std::numeric_limits<double>::quiet_NaN();
    OmegaProvenance provenance = OmegaProvenance::Unknown;

    bool known() const { return provenance != OmegaProvenance::Unknown; }
    bool certifying() const {
        return provenance == OmegaProvenance::Exact || provenance == OmegaProvenance::Upper;
    }
};

const char* to_string(OmegaProvenance p);

/// A mapping F from sequence points into R^d. The registered symbolic forms
/// (One .. Fbar) are scalar and carry exact metadata; any of them can be
/// tensored with a vector v to form g (x) v. Rank-structured and black-box
/// forms are vector-valued directly.
///
/// Fbar is the series sum_j t_j^2 / 2^j (the convex counterexample function;
/// its coefficients are exactly 2^-j).
class MappingDescriptor {
public:
    enum class FormKind {
        One,
        Coord,
        CoordSq,
        LinearFunctional,
        NormSq,
        PsiSq,
        Fbar,
        RankStructured,
        BlackBox
    };

    static MappingDescriptor one();
    static MappingDescriptor coord(std::size_t j);
    static MappingDescriptor coord_sq(std::size_t j);
    static MappingDescriptor linear_functional(SequencePoint coefficients);
    static MappingDescriptor norm_sq();
    static MappingDescriptor psi_sq(SequencePoint center);
    static MappingDescriptor fbar();
    static MappingDescriptor rank_structured(std::vector<RankTerm> terms);
    static MappingDescriptor black_box(BlackBoxFn fn);
    static MappingDescriptor black_box_scalar(std::function<double(std::span<const double>)> fn,
                                              std::size_t arity, bool thread_safe = true);

    /// g (x) v: scalar form times a fixed vector. Only for the registered
    /// scalar forms.
    MappingDescriptor tensor_with(std::vector<double> v) const;

    FormKind form() const { return form_; }
    std::size_t codomain_dim() const;
    bool scalar_registered() const;  // one of the closed-form scalar families
    bool has_tensor() const { return !tensor_.empty(); }
    std::span<const double> tensor() const { return tensor_; }

    std::size_t coord_index() const;               // Coord / CoordSq
    const SequencePoint& coefficients() const;     // LinearFunctional
    const SequencePoint& center() const;           // PsiSq
    const std::vector<RankTerm>& terms() const;    // RankStructured
    const BlackBoxFn& black_box_fn() const;        // BlackBox

    /// Largest coordinate index the form references explicitly (used for
    /// sampling-based probes).
    std::size_t effective_span() const;

private:
    FormKind form_ = FormKind::One;
    std::variant<std::monostate, std::size_t, SequencePoint, std::vector<RankTerm>, BlackBoxFn>
        payload_;
    std::vector<double> tensor_;
};

/// Evaluate F at the composite point (grid_1, ..., grid_g, anchor_{g+1}, ...):
/// explicit values on the first g coordinates, the anchor point beyond. With
/// an empty grid this is evaluation at the anchor itself. Exact: analytic
/// tails are summed in closed form.
void evaluate_on_grid(const MappingDescriptor& F, std::span<const double> grid,
                      const SequencePoint& anchor, std::vector<double>& out);

std::vector<double> evaluate(const MappingDescriptor& F, const SequencePoint& t);

/// Scalar convenience; throws std::domain_error for d > 1.
double evaluate_scalar(const MappingDescriptor& F, const SequencePoint& t);

/// sum_{j>n} t_j^2 / 2^j, exact (the Fbar series past index n).
double fbar_weighted_tail(const SequencePoint& t, std::size_t n);

/// Modulus of continuity on Gamma at radius delta. Closed forms where known;
/// NormSq and PsiSq need a norm bound `radius` (sup ||t|| over the region of
/// interest) and return certified upper bounds; otherwise Unknown.
Modulus modulus(const MappingDescriptor& F, double delta, std::optional<double> radius = {});

/// Max of ||F(u)-F(t)|| over sampled pairs in Gamma at distance <= delta.
/// A statistical LOWER bound of the true modulus.
double empirical_modulus(const MappingDescriptor& F, double delta, std::size_t sample_count,
                         std::mt19937_64& rng);

/// Per-variable convexity check along one axis: samples base points and
/// endpoint pairs, tests f(.. lambda a + (1-lambda) b ..) against the chord.
struct ConvexityReport {
    struct Violation {
        SequencePoint base;
        std::size_t axis;
        double a, b, lambda;
        double lhs, rhs;  // convexity requires lhs <= rhs + tol
    };

    std::size_t checked = 0;
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ConvexityReport convexity_probe(const std::function<double(const SequencePoint&)>& f,
                                std::size_t axis, std::size_t triples, std::mt19937_64& rng,
                                std::size_t head_len = 8, double tol = 1e-10);
ConvexityReport convexity_probe(const MappingDescriptor& f, std::size_t axis, std::size_t triples,
                                std::mt19937_64& rng, std::size_t head_len = 8, double tol = 1e-10);

/// Random point of Gamma: uniform head coordinates, optionally a geometric
/// tail (c r^k stays within [0,1]).
SequencePoint random_gamma_point(std::mt19937_64& rng, std::size_t head_len,
                                 bool with_geometric_tail = false);

}  // namespace approxop
