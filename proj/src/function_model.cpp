#include "approxop/function_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "approxop/summation.hpp"

namespace approxop {

namespace {

const double kFbarCoeffNormSq = 1.0 / 3.0;  // sum_j 4^-j

void require(bool cond, const char* msg) {
    if (!cond) throw std::domain_error(msg);
}

double vec_norm(std::span<const double> v) {
    NeumaierSum s;
    for (double x : v) s.add(x * x);
    return std::sqrt(s.value());
}

}  // namespace

const char* to_string(OmegaProvenance p) {
    switch (p) {
        case OmegaProvenance::Exact: return "exact";
        case OmegaProvenance::Upper: return "upper";
        case OmegaProvenance::EmpiricalLower: return "empirical-lower";
        case OmegaProvenance::Unknown: return "unknown";
    }
    return "?";
}

Factor1D Factor1D::constant(double v) {
    Factor1D f;
    f.kind_ = Kind::Constant;
    f.value_ = v;
    return f;
}

Factor1D Factor1D::identity() {
    Factor1D f;
    f.kind_ = Kind::Identity;
    return f;
}

Factor1D Factor1D::poly(std::vector<double> coeffs) {
    Factor1D f;
    f.kind_ = Kind::Poly;
    f.coeffs_ = std::move(coeffs);
    return f;
}

Factor1D Factor1D::abs_dev(double center) {
    Factor1D f;
    f.kind_ = Kind::AbsDev;
    f.center_ = center;
    return f;
}

Factor1D Factor1D::custom(std::function<double(double)> fn) {
    Factor1D f;
    f.kind_ = Kind::Custom;
    f.fn_ = std::move(fn);
    return f;
}

double Factor1D::operator()(double u) const {
    switch (kind_) {
        case Kind::Constant: return value_;
        case Kind::Identity: return u;
        case Kind::Poly: {
            double acc = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
            return acc;
        }
        case Kind::AbsDev: return std::abs(u - center_);
        case Kind::Custom: return fn_(u);
    }
    return 0.0;
}

MappingDescriptor MappingDescriptor::one() { return {}; }

MappingDescriptor MappingDescriptor::coord(std::size_t j) {
    require(j >= 1, "coord index is 1-based");
    MappingDescriptor d;
    d.form_ = FormKind::Coord;
    d.payload_ = j;
    return d;
}

MappingDescriptor MappingDescriptor::coord_sq(std::size_t j) {
    require(j >= 1, "coord index is 1-based");
    MappingDescriptor d;
    d.form_ = FormKind::CoordSq;
    d.payload_ = j;
    return d;
}

MappingDescriptor MappingDescriptor::linear_functional(SequencePoint coefficients) {
    MappingDescriptor d;
    d.form_ = FormKind::LinearFunctional;
    d.payload_ = std::move(coefficients);
    return d;
}

MappingDescriptor MappingDescriptor::norm_sq() {
    MappingDescriptor d;
    d.form_ = FormKind::NormSq;
    return d;
}

MappingDescriptor MappingDescriptor::psi_sq(SequencePoint center) {
    MappingDescriptor d;
    d.form_ = FormKind::PsiSq;
    d.payload_ = std::move(center);
    return d;
}

MappingDescriptor MappingDescriptor::fbar() {
    MappingDescriptor d;
    d.form_ = FormKind::Fbar;
    return d;
}

MappingDescriptor MappingDescriptor::rank_structured(std::vector<RankTerm> terms) {
    require(!terms.empty(), "rank_structured needs at least one term");
    const std::size_t dim = terms.front().coeff.size();
    require(dim >= 1, "rank term coefficient vector must be nonempty");
    for (const RankTerm& t : terms)
        require(t.coeff.size() == dim, "rank terms must share the codomain dimension");
    MappingDescriptor d;
    d.form_ = FormKind::RankStructured;
    d.payload_ = std::move(terms);
    return d;
}

MappingDescriptor MappingDescriptor::black_box(BlackBoxFn fn) {
    require(static_cast<bool>(fn.eval), "black box needs an evaluator");
    require(fn.dim >= 1, "black box codomain dimension must be >= 1");
    MappingDescriptor d;
    d.form_ = FormKind::BlackBox;
    d.payload_ = std::move(fn);
    return d;
}

MappingDescriptor MappingDescriptor::black_box_scalar(
    std::function<double(std::span<const double>)> fn, std::size_t arity, bool thread_safe) {
    BlackBoxFn bb;
    bb.eval = [fn = std::move(fn)](std::span<const double> in, std::span<double> out) {
        out[0] = fn(in);
    };
    bb.arity = arity;
    bb.dim = 1;
    bb.thread_safe = thread_safe;
    return black_box(std::move(bb));
}

MappingDescriptor MappingDescriptor::tensor_with(std::vector<double> v) const {
    require(scalar_registered(), "tensor form requires a registered scalar mapping");
    require(!v.empty(), "tensor vector must be nonempty");
    MappingDescriptor d = *this;
    d.tensor_ = std::move(v);
    return d;
}

std::size_t MappingDescriptor::codomain_dim() const {
    if (!tensor_.empty()) return tensor_.size();
    if (form_ == FormKind::RankStructured) return terms().front().coeff.size();
    if (form_ == FormKind::BlackBox) return black_box_fn().dim;
    return 1;
}

bool MappingDescriptor::scalar_registered() const {
    return form_ != FormKind::RankStructured && form_ != FormKind::BlackBox;
}

std::size_t MappingDescriptor::coord_index() const { return std::get<std::size_t>(payload_); }

const SequencePoint& MappingDescriptor::coefficients() const {
    require(form_ == FormKind::LinearFunctional, "not a linear functional");
    return std::get<SequencePoint>(payload_);
}

const SequencePoint& MappingDescriptor::center() const {
    require(form_ == FormKind::PsiSq, "not a psi^2 form");
    return std::get<SequencePoint>(payload_);
}

const std::vector<RankTerm>& MappingDescriptor::terms() const {
    return std::get<std::vector<RankTerm>>(payload_);
}

const BlackBoxFn& MappingDescriptor::black_box_fn() const { return std::get<BlackBoxFn>(payload_); }

std::size_t MappingDescriptor::effective_span() const {
    switch (form_) {
        case FormKind::Coord:
        case FormKind::CoordSq: return coord_index();
        case FormKind::LinearFunctional: return coefficients().head_size() + 4;
        case FormKind::PsiSq: return center().head_size() + 4;
        case FormKind::BlackBox: return black_box_fn().arity;
        case FormKind::RankStructured: {
            std::size_t span = 0;
            for (const RankTerm& t : terms()) span = std::max(span, t.factors.size());
            return span;
        }
        default: return 8;
    }
}

double fbar_weighted_tail(const SequencePoint& t, std::size_t n) {
    NeumaierSum s;
    const std::size_t m = t.head_size();
    for (std::size_t j = n + 1; j <= m; ++j) {
        const double x = t.head()[j - 1];
        s.add(x * x * std::ldexp(1.0, -static_cast<int>(j)));
    }
    const Tail& tail = t.tail();
    if (!tail.is_zero() && std::max(n, m) < 1100) {  // 2^-1100 underflows to zero
        const std::size_t M = std::max(n, m);
        const double base = tail.c * std::pow(tail.r, static_cast<double>(M - m));
        const double q = tail.r * tail.r * 0.5;  // ratio of successive (c r^k)^2 / 2^j terms
        s.add(base * base * std::ldexp(1.0, -static_cast<int>(M)) * q / (1.0 - q));
    }
    return s.value();
}

namespace {

// scalar value of a registered form at (grid..., anchor beyond)
double scalar_on_grid(const MappingDescriptor& F, std::span<const double> grid,
                      const SequencePoint& anchor) {
    const std::size_t g = grid.size();
    switch (F.form()) {
        case MappingDescriptor::FormKind::One: return 1.0;
        case MappingDescriptor::FormKind::Coord: {
            const std::size_t j = F.coord_index();
            return j <= g ? grid[j - 1] : anchor.coord(j);
        }
        case MappingDescriptor::FormKind::CoordSq: {
            const std::size_t j = F.coord_index();
            const double x = j <= g ? grid[j - 1] : anchor.coord(j);
            return x * x;
        }
        case MappingDescriptor::FormKind::LinearFunctional: {
            const SequencePoint& phi = F.coefficients();
            NeumaierSum s;
            for (std::size_t j = 1; j <= g; ++j) s.add(phi.coord(j) * grid[j - 1]);
            s.add(inner_from(phi, anchor, g));
            return s.value();
        }
        case MappingDescriptor::FormKind::NormSq: {
            NeumaierSum s;
            for (double x : grid) s.add(x * x);
            s.add(anchor.tail_sq(g));
            return s.value();
        }
        case MappingDescriptor::FormKind::PsiSq: {
            const SequencePoint& c = F.center();
            NeumaierSum s;
            for (std::size_t j = 1; j <= g; ++j) {
                const double d = grid[j - 1] - c.coord(j);
                s.add(d * d);
            }
            s.add(distance_sq_from(anchor, c, g));
            return s.value();
        }
        case MappingDescriptor::FormKind::Fbar: {
            NeumaierSum s;
            double w = 1.0;
            for (std::size_t j = 1; j <= g; ++j) {
                w *= 0.5;
                s.add(grid[j - 1] * grid[j - 1] * w);
            }
            s.add(fbar_weighted_tail(anchor, g));
            return s.value();
        }
        default: throw std::domain_error("not a registered scalar form");
    }
}

}  // namespace

void evaluate_on_grid(const MappingDescriptor& F, std::span<const double> grid,
                      const SequencePoint& anchor, std::vector<double>& out) {
    out.resize(F.codomain_dim());
    switch (F.form()) {
        case MappingDescriptor::FormKind::RankStructured: {
            const std::size_t g = grid.size();
            std::fill(out.begin(), out.end(), 0.0);
            for (const RankTerm& term : F.terms()) {
                double prod = 1.0;
                for (std::size_t j = 1; j <= term.factors.size(); ++j) {
                    const double x = j <= g ? grid[j - 1] : anchor.coord(j);
                    prod *= term.factors[j - 1](x);
                }
                for (std::size_t k = 0; k < out.size(); ++k) out[k] += prod * term.coeff[k];
            }
            return;
        }
        case MappingDescriptor::FormKind::BlackBox: {
            const BlackBoxFn& bb = F.black_box_fn();
            std::vector<double> in(bb.arity);
            for (std::size_t j = 1; j <= bb.arity; ++j)
                in[j - 1] = j <= grid.size() ? grid[j - 1] : anchor.coord(j);
            bb.eval(in, out);
            return;
        }
        default: {
            const double s = scalar_on_grid(F, grid, anchor);
            if (F.has_tensor()) {
                auto v = F.tensor();
                for (std::size_t k = 0; k < v.size(); ++k) out[k] = s * v[k];
            } else {
                out[0] = s;
            }
            return;
        }
    }
}

std::vector<double> evaluate(const MappingDescriptor& F, const SequencePoint& t) {
    std::vector<double> out;
    evaluate_on_grid(F, {}, t, out);
    return out;
}

double evaluate_scalar(const MappingDescriptor& F, const SequencePoint& t) {
    require(F.codomain_dim() == 1, "evaluate_scalar requires codomain dimension 1");
    std::vector<double> out;
    evaluate_on_grid(F, {}, t, out);
    return out[0];
}

Modulus modulus(const MappingDescriptor& F, double delta, std::optional<double> radius) {
    require(delta > 0.0, "modulus requires delta > 0");
    Modulus scalar_mod;
    switch (F.form()) {
        case MappingDescriptor::FormKind::One:
            scalar_mod = {0.0, OmegaProvenance::Exact};
            break;
        case MappingDescriptor::FormKind::Coord:
            scalar_mod = {std::min(delta, 1.0), OmegaProvenance::Exact};
            break;
        case MappingDescriptor::FormKind::CoordSq: {
            const double d = std::min(delta, 1.0);
            scalar_mod = {d * (2.0 - d), OmegaProvenance::Exact};
            break;
        }
        case MappingDescriptor::FormKind::LinearFunctional:
            scalar_mod = {delta * std::sqrt(F.coefficients().norm_sq()), OmegaProvenance::Exact};
            break;
        case MappingDescriptor::FormKind::NormSq:
            if (radius) {
                scalar_mod = {delta * (2.0 * *radius + delta), OmegaProvenance::Upper};
            }
            break;
        case MappingDescriptor::FormKind::PsiSq:
            if (radius) {
                const double reach = *radius + std::sqrt(F.center().norm_sq());
                scalar_mod = {delta * (2.0 * reach + delta), OmegaProvenance::Upper};
            }
            break;
        case MappingDescriptor::FormKind::Fbar:
            // gradient bound sup ||grad fbar|| = 2 ||(2^-j)_j||; oscillation < 1
            scalar_mod = {std::min(2.0 * delta * std::sqrt(kFbarCoeffNormSq), 1.0),
                          OmegaProvenance::Upper};
            break;
        default: break;  // rank-structured / black box: Unknown
    }
    if (!scalar_mod.known()) return scalar_mod;
    if (F.has_tensor()) scalar_mod.value *= vec_norm(F.tensor());
    return scalar_mod;
}

double empirical_modulus(const MappingDescriptor& F, double delta, std::size_t sample_count,
                         std::mt19937_64& rng) {
    require(delta > 0.0, "empirical_modulus requires delta > 0");
    const std::size_t head_len = std::min<std::size_t>(std::max<std::size_t>(F.effective_span(), 4), 64);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> axis_pick(1, head_len);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> base(head_len), moved(head_len), ft, fu;
    double best = 0.0;
    for (std::size_t s = 0; s < sample_count; ++s) {
        for (double& x : base) x = unif(rng);
        moved = base;
        if (s % 2 == 0) {
            // single-axis move of the full budget (clipped to the cube)
            const std::size_t a = axis_pick(rng) - 1;
            const double dir = unif(rng) < 0.5 ? -1.0 : 1.0;
            moved[a] = std::clamp(base[a] + dir * delta, 0.0, 1.0);
        } else {
            // isotropic direction scaled to length delta, then clipped;
            // clipping only shrinks coordinate differences
            double norm = 0.0;
            for (std::size_t k = 0; k < head_len; ++k) {
                moved[k] = gauss(rng);
                norm += moved[k] * moved[k];
            }
            norm = std::sqrt(norm);
            if (norm == 0.0) norm = 1.0;
            for (std::size_t k = 0; k < head_len; ++k)
                moved[k] = std::clamp(base[k] + moved[k] / norm * delta, 0.0, 1.0);
        }
        const SequencePoint t = SequencePoint::gamma(base);
        const SequencePoint u = SequencePoint::gamma(moved);
        evaluate_on_grid(F, {}, t, ft);
        evaluate_on_grid(F, {}, u, fu);
        NeumaierSum diff;
        for (std::size_t k = 0; k < ft.size(); ++k) {
            const double d = ft[k] - fu[k];
            diff.add(d * d);
        }
        best = std::max(best, std::sqrt(diff.value()));
    }
    return best;
}

ConvexityReport convexity_probe(const std::function<double(const SequencePoint&)>& f,
                                std::size_t axis, std::size_t triples, std::mt19937_64& rng,
                                std::size_t head_len, double tol) {
    require(axis >= 1, "axis is 1-based");
    ConvexityReport report;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t len = std::max(head_len, axis);
    std::vector<double> head(len);
    for (std::size_t s = 0; s < triples; ++s) {
        for (double& x : head) x = unif(rng);
        const double a = unif(rng);
        const double b = unif(rng);
        const double lambda = unif(rng);
        const SequencePoint base = SequencePoint::gamma(head);
        const double fa = f(base.with_coord(axis, a));
        const double fb = f(base.with_coord(axis, b));
        const double fm = f(base.with_coord(axis, lambda * a + (1.0 - lambda) * b));
        const double chord = lambda * fa + (1.0 - lambda) * fb;
        ++report.checked;
        if (fm > chord + tol && report.violations.size() < 16)
            report.violations.push_back({base, axis, a, b, lambda, fm, chord});
    }
    return report;
}

ConvexityReport convexity_probe(const MappingDescriptor& f, std::size_t axis, std::size_t triples,
                                std::mt19937_64& rng, std::size_t head_len, double tol) {
    require(f.codomain_dim() == 1, "convexity probe requires a scalar mapping");
    return convexity_probe(
        [&f](const SequencePoint& t) { return evaluate_scalar(f, t); }, axis, triples, rng,
        std::max(head_len, f.effective_span()), tol);
}

SequencePoint random_gamma_point(std::mt19937_64& rng, std::size_t head_len,
                                 bool with_geometric_tail) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> head(head_len);
    for (double& x : head) x = unif(rng);
    Tail tail = Tail::zero();
    if (with_geometric_tail) {
        const double r = 0.2 + 0.6 * unif(rng);
        const double c = unif(rng);  // c r^k <= c r < 1
        tail = Tail::geometric(c, r);
    }
    return SequencePoint::gamma(std::move(head), tail);
}

}  // namespace approxop
