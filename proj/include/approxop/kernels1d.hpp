#pragma once

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "approxop/interval.hpp"

namespace approxop {

enum class FamilyKind { Bernstein, SzaszMirakjan, Baskakov, PostWidder, GaussWeierstrass };

/// One of the five positive-operator families, each given by a probability
/// measure mu_n(.;t) on its domain interval:
///   Bernstein          Binomial(n, t)/n                 on [0, 1]
///   Szasz-Mirakjan     Poisson(n t)/n                   on [0, inf)
///   Baskakov           NegBinomial(n, 1/(1+t))/n        on [0, inf)
///   Post-Widder        Gamma(shape n, scale t/n)        on [0, inf)
///   Gauss-Weierstrass  Normal(t, 1/(2n))                on (-inf, inf)
/// All are normalized so the first moment is exactly t.
class KernelFamily {
public:
    explicit KernelFamily(FamilyKind kind) : kind_(kind) {}

    static KernelFamily bernstein() { return KernelFamily(FamilyKind::Bernstein); }
    static KernelFamily szasz_mirakjan() { return KernelFamily(FamilyKind::SzaszMirakjan); }
    static KernelFamily baskakov() { return KernelFamily(FamilyKind::Baskakov); }
    static KernelFamily post_widder() { return KernelFamily(FamilyKind::PostWidder); }
    static KernelFamily gauss_weierstrass() { return KernelFamily(FamilyKind::GaussWeierstrass); }

    FamilyKind kind() const { return kind_; }
    Interval domain() const;
    const char* name() const;

    friend bool operator==(const KernelFamily& a, const KernelFamily& b) {
        return a.kind_ == b.kind_;
    }

private:
    FamilyKind kind_;
};

/// Bernstein basis weight C(n,j) t^j (1-t)^{n-j}. Exact endpoint handling;
/// log-gamma evaluation above n = 30. Throws std::domain_error for j or t
/// out of range.
double bernstein_basis(int n, int j, double t);

/// All n+1 basis weights at t; nonnegative and summing to 1.
struct BasisRow {
    int n = 0;
    double t = 0.0;
    std::vector<double> weights;
};
BasisRow bernstein_basis_row(int n, double t);

/// Exact moment of order 0, 1 or 2 of mu_n(.;t) (already scaled to the
/// function domain). Order 2 closed forms:
///   Bernstein t^2 + t(1-t)/n, Szasz t^2 + t/n, Baskakov t^2 + t(1+t)/n,
///   Post-Widder t^2 (1 + 1/n), Gauss-Weierstrass t^2 + 1/(2n).
double family_moment(const KernelFamily& family, int n, double t, int order);

/// One draw from mu_n(.;t). Degenerate parameter choices (zero variance)
/// return the deterministic value instead of erroring.
double family_sample(const KernelFamily& family, int n, double t, std::mt19937_64& rng);

/// The 1-D operator L_{n,1}(g)(t) = integral of g against mu_n(.;t).
/// Bernstein: exact finite sum over the basis. Discrete families: series
/// truncated once the remaining mass is provably below tol. Continuous
/// families: adaptive Gauss-Kronrod quadrature with absolute tolerance tol;
/// throws EvaluationError (with the partial value) if the error estimate
/// cannot be met. On unbounded domains g should grow at most quadratically.
double lift1d(const KernelFamily& family, int n, const std::function<double(double)>& g,
              double t, double tol = 1e-12);

/// Numeric verification of the moment identities required of a generalized
/// family, plus the decomposition of m2 - t^2 into the pattern
/// a(n) t^2 + b(n) t + c(n). A family whose constant term c(n) stays on the
/// order of 1/n (Gauss-Weierstrass: exactly 1/(2n)) violates the o(1/n)
/// hypothesis and is flagged.
struct FamilyCheckReport {
    struct Identity {
        int n;
        double t;
        double m0_err;        // |lift1d(1) - 1|
        double m1_err;        // |lift1d(id) - t|
        double m2_vs_closed;  // |lift1d(u^2) - family_moment(.,2)|
    };
    struct ResidualFit {
        int n;
        double coeff_e2;     // a(n)
        double coeff_e1;     // b(n)
        double coeff_const;  // c(n)
    };

    FamilyKind kind;
    std::vector<Identity> identities;
    std::vector<ResidualFit> fits;
    bool identities_ok = false;
    bool flagged_const_residual = false;  // c(n) is Theta(1/n), not o(1/n)
};

FamilyCheckReport family_check(const KernelFamily& family, std::span<const int> n_list,
                               std::span<const double> t_grid);

}  // namespace approxop
