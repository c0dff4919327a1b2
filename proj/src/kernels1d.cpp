#include "approxop/kernels1d.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "approxop/errors.hpp"
#include "approxop/summation.hpp"

namespace approxop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_domain(bool cond, const std::string& msg) {
    if (!cond) throw std::domain_error(msg);
}

void check_family_args(const KernelFamily& family, int n, double t) {
    require_domain(n >= 1, "family index n must be >= 1");
    require_domain(std::isfinite(t) && family.domain().contains(t),
                   std::string(family.name()) + ": t outside the family domain");
}

// C(n, j) exactly, for n small enough that the value is integer-exact.
double binomial_exact(int n, int j) {
    j = std::min(j, n - j);
    std::uint64_t c = 1;
    for (int i = 1; i <= j; ++i) c = c * static_cast<std::uint64_t>(n - j + i) / i;
    return static_cast<double>(c);
}

// Truncated series sum_k pmf(k) g(k/n) for a pmf on {0,1,2,...} given in
// log space, with ratio pmf(k+1)/pmf(k) = ratio(k), decreasing past the mode.
// Stops once the geometric bound pmf(k+1)/(1 - ratio(k+1)) on the remaining
// mass drops below tol.
template <class LogPmf, class Ratio>
double discrete_lift(const std::function<double(double)>& g, int n, LogPmf log_pmf,
                     Ratio ratio, double tol, long long hard_cap) {
    NeumaierSum acc;
    for (long long k = 0;; ++k) {
        const double p = std::exp(log_pmf(k));
        if (p > 0.0) acc.add(p * g(static_cast<double>(k) / n));
        const double q = ratio(k + 1);
        if (q < 1.0 && p * ratio(k) / (1.0 - q) < tol) break;
        if (k >= hard_cap)
            throw EvaluationError("discrete lift1d: mass tolerance not reached within budget",
                                  acc.value());
    }
    return acc.value();
}

double quadrature_lift(const std::function<double(double)>& integrand, double lo, double hi,
                       double tol) {
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, lo, hi, 15, tol, &err);
    if (!(err <= tol * std::max(1.0, std::abs(value))))
        throw EvaluationError("quadrature lift1d: error estimate " + std::to_string(err) +
                                  " exceeds tolerance",
                              value);
    return value;
}

// least-squares fit of samples (t_i, y_i) to a t^2 + b t + c (3x3 normal
// equations, Cramer); requires >= 3 distinct abscissae
bool fit_quadratic(std::span<const double> ts, std::span<const double> ys, double& a, double& b,
                   double& c) {
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double rhs[3] = {0, 0, 0};
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double basis[3] = {ts[i] * ts[i], ts[i], 1.0};
        for (int r = 0; r < 3; ++r) {
            rhs[r] += basis[r] * ys[i];
            for (int s = 0; s < 3; ++s) m[r][s] += basis[r] * basis[s];
        }
    }
    auto det3 = [](const double x[3][3]) {
        return x[0][0] * (x[1][1] * x[2][2] - x[1][2] * x[2][1]) -
               x[0][1] * (x[1][0] * x[2][2] - x[1][2] * x[2][0]) +
               x[0][2] * (x[1][0] * x[2][1] - x[1][1] * x[2][0]);
    };
    const double det = det3(m);
    if (std::abs(det) < 1e-12) return false;
    double out[3];
    for (int col = 0; col < 3; ++col) {
        double mc[3][3];
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) mc[r][s] = (s == col) ? rhs[r] : m[r][s];
        out[col] = det3(mc) / det;
    }
    a = out[0];
    b = out[1];
    c = out[2];
    return true;
}

}  // namespace

Interval KernelFamily::domain() const {
    switch (kind_) {
        case FamilyKind::Bernstein: return Interval::unit();
        case FamilyKind::SzaszMirakjan:
        case FamilyKind::Baskakov:
        case FamilyKind::PostWidder: return Interval::half_line();
        case FamilyKind::GaussWeierstrass: return Interval::real_line();
    }
    return Interval::unit();
}

const char* KernelFamily::name() const {
    switch (kind_) {
        case FamilyKind::Bernstein: return "bernstein";
        case FamilyKind::SzaszMirakjan: return "szasz-mirakjan";
        case FamilyKind::Baskakov: return "baskakov";
        case FamilyKind::PostWidder: return "post-widder";
        case FamilyKind::GaussWeierstrass: return "gauss-weierstrass";
    }
    return "?";
}

double bernstein_basis(int n, int j, double t) {
    require_domain(n >= 1, "bernstein_basis: n must be >= 1");
    require_domain(0 <= j && j <= n, "bernstein_basis: j outside [0, n]");
    require_domain(std::isfinite(t) && 0.0 <= t && t <= 1.0, "bernstein_basis: t outside [0, 1]");
    if (t == 0.0) return j == 0 ? 1.0 : 0.0;
    if (t == 1.0) return j == n ? 1.0 : 0.0;
    if (n <= 30)
        return binomial_exact(n, j) * std::pow(t, j) * std::pow(1.0 - t, n - j);
    const double log_c = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    return std::exp(log_c + j * std::log(t) + (n - j) * std::log1p(-t));
}

BasisRow bernstein_basis_row(int n, double t) {
    BasisRow row{n, t, {}};
    row.weights.resize(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) row.weights[j] = bernstein_basis(n, j, t);
    return row;
}

double family_moment(const KernelFamily& family, int n, double t, int order) {
    check_family_args(family, n, t);
    require_domain(order == 0 || order == 1 || order == 2, "family_moment: order must be 0, 1 or 2");
    if (order == 0) return 1.0;
    if (order == 1) return t;
    const double nn = static_cast<double>(n);
    switch (family.kind()) {
        case FamilyKind::Bernstein: return t * t + t * (1.0 - t) / nn;
        case FamilyKind::SzaszMirakjan: return t * t + t / nn;
        case FamilyKind::Baskakov: return t * t + t * (1.0 + t) / nn;
        case FamilyKind::PostWidder: return t * t * (1.0 + 1.0 / nn);
        case FamilyKind::GaussWeierstrass: return t * t + 0.5 / nn;
    }
    return 0.0;
}

double family_sample(const KernelFamily& family, int n, double t, std::mt19937_64& rng) {
    check_family_args(family, n, t);
    const double nn = static_cast<double>(n);
    switch (family.kind()) {
        case FamilyKind::Bernstein: {
            if (t == 0.0 || t == 1.0) return t;  // degenerate binomial
            std::binomial_distribution<int> dist(n, t);
            return dist(rng) / nn;
        }
        case FamilyKind::SzaszMirakjan: {
            if (t == 0.0) return 0.0;
            std::poisson_distribution<long long> dist(nn * t);
            return dist(rng) / nn;
        }
        case FamilyKind::Baskakov: {
            if (t == 0.0) return 0.0;
            std::negative_binomial_distribution<long long> dist(n, 1.0 / (1.0 + t));
            return dist(rng) / nn;
        }
        case FamilyKind::PostWidder: {
            if (t == 0.0) return 0.0;
            std::gamma_distribution<double> dist(nn, t / nn);
            return dist(rng);
        }
        case FamilyKind::GaussWeierstrass: {
            std::normal_distribution<double> dist(t, 1.0 / std::sqrt(2.0 * nn));
            return dist(rng);
        }
    }
    return 0.0;
}

double lift1d(const KernelFamily& family, int n, const std::function<double(double)>& g, double t,
              double tol) {
    check_family_args(family, n, t);
    require_domain(tol > 0.0, "lift1d: tol must be positive");
    const double nn = static_cast<double>(n);
    switch (family.kind()) {
        case FamilyKind::Bernstein: {
            double sum = 0.0;
            for (int j = 0; j <= n; ++j) sum += g(static_cast<double>(j) / nn) * bernstein_basis(n, j, t);
            return sum;
        }
        case FamilyKind::SzaszMirakjan: {
            if (t == 0.0) return g(0.0);
            const double lambda = nn * t;
            auto log_pmf = [lambda](long long k) {
                return k * std::log(lambda) - lambda - std::lgamma(static_cast<double>(k) + 1.0);
            };
            auto ratio = [lambda](long long k) { return lambda / (k + 1.0); };
            const long long cap =
                static_cast<long long>(lambda + 200.0 * std::sqrt(lambda) + 1000.0);
            return discrete_lift(g, n, log_pmf, ratio, tol, cap);
        }
        case FamilyKind::Baskakov: {
            if (t == 0.0) return g(0.0);
            const double theta = t / (1.0 + t);  // counts ~ NegBinomial(n, 1 - theta)
            const double log_theta = std::log(theta);
            const double log_base = -nn * std::log1p(t) - std::lgamma(nn);
            auto log_pmf = [=](long long k) {
                return std::lgamma(nn + k) - std::lgamma(static_cast<double>(k) + 1.0) + log_base +
                       k * log_theta;
            };
            auto ratio = [=](long long k) { return (nn + k) / (k + 1.0) * theta; };
            const double mean = nn * t;  // count mean; count variance is n t (1+t)
            const long long cap =
                static_cast<long long>(mean + 200.0 * std::sqrt(mean * (1.0 + t)) + 1000.0);
            return discrete_lift(g, n, log_pmf, ratio, tol, cap);
        }
        case FamilyKind::PostWidder: {
            if (t == 0.0) return g(0.0);
            const double theta = t / nn;
            const double log_norm = -std::lgamma(nn) - nn * std::log(theta);
            auto integrand = [&, theta, log_norm](double u) {
                if (u <= 0.0) return 0.0;
                const double log_pdf = (nn - 1.0) * std::log(u) - u / theta + log_norm;
                return g(u) * std::exp(log_pdf);
            };
            return quadrature_lift(integrand, 0.0, kInf, tol);
        }
        case FamilyKind::GaussWeierstrass: {
            const double norm = std::sqrt(nn / 3.14159265358979323846);
            auto integrand = [&, norm](double u) {
                const double d = u - t;
                return g(u) * norm * std::exp(-nn * d * d);
            };
            return quadrature_lift(integrand, -kInf, kInf, tol);
        }
    }
    return 0.0;
}

FamilyCheckReport family_check(const KernelFamily& family, std::span<const int> n_list,
                               std::span<const double> t_grid) {
    FamilyCheckReport report;
    report.kind = family.kind();
    report.identities_ok = true;

    auto one = [](double) { return 1.0; };
    auto id = [](double u) { return u; };
    auto sq = [](double u) { return u * u; };

    bool fits_available = !n_list.empty();
    bool const_residual_everywhere = !n_list.empty();

    for (int n : n_list) {
        std::vector<double> residuals;
        for (double t : t_grid) {
            FamilyCheckReport::Identity row{};
            row.n = n;
            row.t = t;
            row.m0_err = std::abs(lift1d(family, n, one, t) - 1.0);
            row.m1_err = std::abs(lift1d(family, n, id, t) - t);
            const double m2_closed = family_moment(family, n, t, 2);
            row.m2_vs_closed = std::abs(lift1d(family, n, sq, t) - m2_closed);
            report.identities.push_back(row);
            if (row.m0_err > 1e-10 || row.m1_err > 1e-10 || row.m2_vs_closed > 1e-8)
                report.identities_ok = false;
            residuals.push_back(m2_closed - t * t);
        }
        std::vector<double> ts(t_grid.begin(), t_grid.end());
        FamilyCheckReport::ResidualFit fit{n, std::nan(""), std::nan(""), std::nan("")};
        if (fit_quadratic(ts, residuals, fit.coeff_e2, fit.coeff_e1, fit.coeff_const)) {
            if (!(std::abs(fit.coeff_const) * n > 1e-3)) const_residual_everywhere = false;
        } else {
            fits_available = false;
        }
        report.fits.push_back(fit);
    }
    report.flagged_const_residual = fits_available && const_residual_everywhere;
    return report;
}

}  // namespace approxop
