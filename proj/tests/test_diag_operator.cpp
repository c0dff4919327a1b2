#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "approxop/diag_operator.hpp"
#include "approxop/errors.hpp"

using namespace approxop;

namespace {

// independent enumeration oracle: naive binomial weights, plain summation,
// no shared code with the engines
double naive_basis(int n, int j, double t) {
    double c = 1.0;
    for (int i = 1; i <= j; ++i) c *= static_cast<double>(n - j + i) / i;
    return c * std::pow(t, j) * std::pow(1.0 - t, n - j);
}

double brute_operator(const std::function<double(std::span<const double>)>& f,
                      std::span<const double> t, int n) {
    const int k = static_cast<int>(t.size());
    std::vector<int> h(k, 0);
    std::vector<double> u(k);
    double sum = 0.0;
    while (true) {
        double w = 1.0;
        for (int j = 0; j < k; ++j) w *= naive_basis(n, h[j], t[j]);
        for (int j = 0; j < k; ++j) u[j] = static_cast<double>(h[j]) / n;
        sum += w * f(u);
        int j = k - 1;
        for (; j >= 0; --j) {
            if (++h[j] <= n) break;
            h[j] = 0;
        }
        if (j < 0) break;
    }
    return sum;
}

OperatorConfig bern_config(int n) { return {KernelFamily::bernstein(), n, {}, Enumerate{}}; }

std::vector<double> first_coords(const SequencePoint& t, int n) {
    std::vector<double> out(n);
    for (int j = 1; j <= n; ++j) out[j - 1] = t.coord(j);
    return out;
}

}  // namespace

TEST_CASE("index_count is (n+1)^n in arbitrary precision") {
    CHECK(index_count(1) == 2);
    CHECK(index_count(2) == 9);
    // oracle: repeated integer multiplication
    boost::multiprecision::cpp_int expect = 1;
    for (int i = 0; i < 6; ++i) expect *= 7;
    CHECK(index_count(6) == expect);
    CHECK(expect == 117649);
    CHECK(index_count(40) == boost::multiprecision::pow(boost::multiprecision::cpp_int(41), 40));
}

TEST_CASE("enumerate_eval: partition of unity and dead coordinates") {
    const auto t = SequencePoint::gamma({0.3, 0.7, 0.2});
    const auto one = enumerate_eval(MappingDescriptor::one(), t, bern_config(3));
    CHECK(one.scalar() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(one.engine == "enumerate");
    CHECK(one.terms_or_samples == 64);
    CHECK_FALSE(one.std_error.has_value());

    // coord(3) under n = 2 with zero anchor reads the anchor: exactly 0
    const auto dead = enumerate_eval(MappingDescriptor::coord(3), t, bern_config(2));
    CHECK(dead.scalar() == 0.0);
}

TEST_CASE("enumerate_eval: NormSq at (1/2, 1/2) against the brute-force oracle") {
    const auto t = SequencePoint::gamma({0.5, 0.5});
    auto f = [](std::span<const double> u) { return u[0] * u[0] + u[1] * u[1]; };
    const double oracle = brute_operator(f, first_coords(t, 2), 2);
    CHECK(oracle == doctest::Approx(0.75).epsilon(1e-14));
    const auto got = enumerate_eval(MappingDescriptor::norm_sq(), t, bern_config(2));
    CHECK(got.scalar() == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("enumerate_eval: budget guard names the index count") {
    const auto t = SequencePoint::gamma({0.5});
    OperatorConfig cfg = bern_config(9);
    try {
        (void)enumerate_eval(MappingDescriptor::one(), t, cfg);
        FAIL("expected FeasibilityError");
    } catch (const FeasibilityError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1000000000") != std::string::npos);  // 10^9 terms at n = 9
    }
    CHECK_THROWS_AS(
        (void)enumerate_eval(MappingDescriptor::one(), t,
                             OperatorConfig{KernelFamily::szasz_mirakjan(), 2, {}, Enumerate{}}),
        StrategyError);
}

TEST_CASE("oracle equivalence: enumerate vs closed form on random registered cases") {
    std::mt19937_64 rng(2024);
    const auto center = SequencePoint::gamma({0.3, 0.6, 0.1}, Tail::geometric(0.4, 0.5));
    const auto phi = SequencePoint::coeffs({1.0, -0.7, 0.2}, Tail::geometric(1.5, 0.5));
    std::vector<MappingDescriptor> forms = {MappingDescriptor::one(),
                                            MappingDescriptor::norm_sq(),
                                            MappingDescriptor::fbar(),
                                            MappingDescriptor::psi_sq(center),
                                            MappingDescriptor::linear_functional(phi)};
    for (std::size_t j = 1; j <= 8; ++j) {
        forms.push_back(MappingDescriptor::coord(j));
        forms.push_back(MappingDescriptor::coord_sq(j));
    }

    const auto anchors = {SequencePoint::gamma({}),
                          SequencePoint::gamma({0.2, 0.9}, Tail::geometric(0.5, 0.5))};
    for (const auto& anchor : anchors) {
        for (int n = 1; n <= 4; ++n) {
            for (int rep = 0; rep < 5; ++rep) {
                const auto t = random_gamma_point(rng, 6, rep % 2 == 0);
                for (const auto& F : forms) {
                    OperatorConfig cfg{KernelFamily::bernstein(), n, anchor, Enumerate{}};
                    const double en = enumerate_eval(F, t, cfg).scalar();
                    const double cf = closed_form_eval(F, t, cfg).scalar();
                    CHECK(en == doctest::Approx(cf).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("closed_form_eval: moment identities reproduce the test-function values") {
    const auto t = SequencePoint::gamma({0.5, 0.5});
    OperatorConfig cfg{KernelFamily::bernstein(), 2, {}, ClosedForm{}};
    // L(psi_t^2)(t) = (t_1 + t_2)/2 - (t_1^2 + t_2^2)/2 at n = 2
    CHECK(closed_form_eval(MappingDescriptor::psi_sq(t), t, cfg).scalar() ==
          doctest::Approx(0.25).epsilon(1e-14));
    // linear functionals are reproduced on the first n coordinates
    const auto phi = SequencePoint::coeffs({2.0, -1.0, 5.0});
    CHECK(closed_form_eval(MappingDescriptor::linear_functional(phi), t, cfg).scalar() ==
          doctest::Approx(2.0 * 0.5 - 1.0 * 0.5).epsilon(1e-14));

    // Gauss-Weierstrass diagonal of the squared norm gains exactly 1/2
    OperatorConfig gw{KernelFamily::gauss_weierstrass(), 3, {}, ClosedForm{}};
    CHECK(closed_form_eval(MappingDescriptor::norm_sq(), t, gw).scalar() ==
          doctest::Approx(0.5 + 0.5).epsilon(1e-14));

    CHECK_THROWS_AS((void)closed_form_eval(
                        MappingDescriptor::black_box_scalar(
                            [](std::span<const double> u) { return u[0]; }, 1),
                        t, cfg),
                    StrategyError);
}

TEST_CASE("rank_eval: factorized evaluation matches enumeration") {
    const auto t = SequencePoint::gamma({0.5, 0.5});
    OperatorConfig cfg{KernelFamily::bernstein(), 2, {}, RankFactor{}};

    RankTerm prod;
    prod.coeff = {1.0};
    prod.factors = {Factor1D::identity(), Factor1D::identity()};
    const auto F = MappingDescriptor::rank_structured({prod});
    const double got = rank_eval(F, t, cfg).scalar();
    CHECK(got == doctest::Approx(0.25).epsilon(1e-13));  // product of first moments
    const double oracle =
        brute_operator([](std::span<const double> u) { return u[0] * u[1]; }, {{0.5, 0.5}}, 2);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-12));

    RankTerm sq1{{1.0}, {Factor1D::poly({0.0, 0.0, 1.0})}};
    RankTerm sq2{{1.0}, {Factor1D::constant(1.0), Factor1D::poly({0.0, 0.0, 1.0})}};
    const auto G = MappingDescriptor::rank_structured({sq1, sq2});
    CHECK(rank_eval(G, t, cfg).scalar() == doctest::Approx(0.75).epsilon(1e-12));

    RankTerm c{{1.0}, {Factor1D::constant(1.0)}};
    CHECK(rank_eval(MappingDescriptor::rank_structured({c}), t, cfg).scalar() ==
          doctest::Approx(1.0).epsilon(1e-14));

    // rank engine with a nonzero anchor evaluates trailing factors there
    OperatorConfig anchored{KernelFamily::bernstein(), 1,
                            SequencePoint::gamma({0.0, 0.25}), RankFactor{}};
    const double with_anchor = rank_eval(F, t, anchored).scalar();
    CHECK(with_anchor == doctest::Approx(0.5 * 0.25).epsilon(1e-13));
}

TEST_CASE("mc_eval: constants are exact, moments statistically consistent, runs reproducible") {
    const auto t = SequencePoint::gamma({0.5, 0.3, 0.8}, Tail::geometric(0.6, 0.5));

    OperatorConfig cfg{KernelFamily::bernstein(), 10, {}, MonteCarlo{5000, 42}};
    const auto one = mc_eval(MappingDescriptor::one(), t, cfg);
    CHECK(one.scalar() == 1.0);
    CHECK(*one.std_error == 0.0);
    CHECK(one.engine == "monte-carlo");
    CHECK(one.terms_or_samples == 5000);

    OperatorConfig coord_cfg{KernelFamily::bernstein(), 10, {}, MonteCarlo{100'000, 7}};
    const auto c1 = mc_eval(MappingDescriptor::coord(1), t, coord_cfg);
    CHECK(std::abs(c1.scalar() - 0.5) <= 4.0 * *c1.std_error);

    OperatorConfig ns_cfg{KernelFamily::bernstein(), 50, {}, MonteCarlo{100'000, 11}};
    const auto ns = mc_eval(MappingDescriptor::norm_sq(), t, ns_cfg);
    const double closed =
        closed_form_eval(MappingDescriptor::norm_sq(), t, ns_cfg.with_strategy(ClosedForm{})).scalar();
    CHECK(std::abs(ns.scalar() - closed) <= 4.0 * *ns.std_error);

    const auto again = mc_eval(MappingDescriptor::norm_sq(), t, ns_cfg);
    CHECK(again.scalar() == ns.scalar());  // same seed, bit-identical
    CHECK(*again.std_error == *ns.std_error);

    CHECK_THROWS_AS(
        (void)mc_eval(MappingDescriptor::one(), t,
                      OperatorConfig{KernelFamily::bernstein(), 2, {}, MonteCarlo{1, 0}}),
        std::domain_error);
}

TEST_CASE("linearity, positivity, domination, S-regularity under enumeration") {
    std::mt19937_64 rng(55);
    const auto t = random_gamma_point(rng, 3);
    const OperatorConfig cfg = bern_config(3);

    // linearity: a F + b G as a black box vs the combination of results
    const double a = 1.75, b = -0.4;
    const auto F = MappingDescriptor::norm_sq();
    const auto G = MappingDescriptor::fbar();
    const auto H = MappingDescriptor::black_box_scalar(
        [&](std::span<const double> u) {
            double ns = 0.0, fb = 0.0, w = 1.0;
            for (std::size_t j = 0; j < u.size(); ++j) {
                ns += u[j] * u[j];
                w *= 0.5;
                fb += u[j] * u[j] * w;
            }
            return a * ns + b * fb;
        },
        3);
    const double lf = enumerate_eval(F, t, cfg).scalar();
    const double lg = enumerate_eval(G, t, cfg).scalar();
    const double lh = enumerate_eval(H, t, cfg).scalar();
    CHECK(lh == doctest::Approx(a * lf + b * lg).epsilon(1e-10));

    // positivity: coord(1) <= 1 pointwise implies L(coord(1)) <= L(1)
    const double lc = enumerate_eval(MappingDescriptor::coord(1), t, cfg).scalar();
    const double lone = enumerate_eval(MappingDescriptor::one(), t, cfg).scalar();
    CHECK(lc <= lone + 1e-12);

    // S-regularity and domination for d = 1, 2, 3
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (std::size_t d : {1, 2, 3}) {
        std::vector<double> v(d);
        for (double& x : v) x = unif(rng);
        const auto gv = MappingDescriptor::norm_sq().tensor_with(v);
        const auto vec = enumerate_eval(gv, t, cfg);
        double norm_sq_val = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            CHECK(vec.value[k] == doctest::Approx(lf * v[k]).epsilon(1e-12));
            norm_sq_val += vec.value[k] * vec.value[k];
        }
        double vnorm = 0.0;
        for (double x : v) vnorm += x * x;
        vnorm = std::sqrt(vnorm);
        const auto abs_scalar = MappingDescriptor::black_box_scalar(
            [vnorm](std::span<const double> u) {
                double ns = 0.0;
                for (double x : u) ns += x * x;
                return ns * vnorm;  // ||F(.)|| for F = norm_sq (x) v, norm_sq >= 0
            },
            3);
        const double dominating = enumerate_eval(abs_scalar, t, cfg).scalar();
        CHECK(std::sqrt(norm_sq_val) <= dominating + 1e-10);
    }
}

TEST_CASE("interpolation at 0/1 vertices is exact") {
    std::mt19937_64 rng(91);
    for (int n : {1, 2, 4}) {
        for (int rep = 0; rep < 8; ++rep) {
            std::vector<double> head(n);
            for (double& x : head) x = rng() % 2 ? 1.0 : 0.0;
            const auto vertex = SequencePoint::gamma(head);
            for (const auto& F :
                 {MappingDescriptor::norm_sq(), MappingDescriptor::fbar(),
                  MappingDescriptor::coord(1), MappingDescriptor::coord_sq(2),
                  MappingDescriptor::psi_sq(SequencePoint::gamma({0.25, 0.5}))}) {
                const double lhs = enumerate_eval(F, vertex, bern_config(n)).scalar();
                CHECK(lhs == evaluate_scalar(F, vertex));
            }
        }
    }
}

TEST_CASE("Lipschitz transfer: sampled ratios stay below sqrt(n) M") {
    std::mt19937_64 rng(101);
    const auto phi = SequencePoint::coeffs({0.6, -0.8});  // norm 1, M = 1
    const auto F = MappingDescriptor::linear_functional(phi);
    for (int n : {1, 4}) {
        OperatorConfig cfg{KernelFamily::bernstein(), n, {}, ClosedForm{}};
        const double allowed = std::sqrt(static_cast<double>(n)) + 1e-9;
        for (int rep = 0; rep < 1000; ++rep) {
            const auto u = random_gamma_point(rng, 5, rep % 2 == 0);
            const auto v = random_gamma_point(rng, 5, rep % 2 == 0);
            const double d = distance(u, v);
            if (d < 1e-9) continue;
            const double lu = closed_form_eval(F, u, cfg).scalar();
            const double lv = closed_form_eval(F, v, cfg).scalar();
            CHECK(std::abs(lu - lv) / d <= allowed);
        }
    }
}

TEST_CASE("convexity transfer: L_n of a convex function stays axis-convex") {
    std::mt19937_64 rng(103);
    const auto F = MappingDescriptor::norm_sq();
    const OperatorConfig cfg{KernelFamily::bernstein(), 3, {}, ClosedForm{}};
    auto G = [&](const SequencePoint& p) { return closed_form_eval(F, p, cfg).scalar(); };
    for (std::size_t axis : {1, 2, 3}) {
        const auto report = convexity_probe(G, axis, 150, rng, 5);
        CHECK(report.ok());
    }
}

TEST_CASE("product operator: moments, diagonal consistency, product Lipschitz") {
    auto sum2 = [](std::span<const double> u) { return u[0] + u[1]; };
    const std::vector<double> t2 = {0.3, 0.7};
    CHECK(product_eval_k(sum2, t2, KernelFamily::bernstein(), 4, Enumerate{}) ==
          doctest::Approx(1.0).epsilon(1e-13));

    // k = 1 reduces to the 1-D lift
    auto square = [](std::span<const double> u) { return u[0] * u[0]; };
    const std::vector<double> t1 = {0.4};
    const double via_product = product_eval_k(square, t1, KernelFamily::szasz_mirakjan(), 5, ClosedForm{});
    CHECK(via_product == doctest::Approx(family_moment(KernelFamily::szasz_mirakjan(), 5, 0.4, 2))
                             .epsilon(1e-10));

    // diagonal consistency: L_n(F) = L_{n,n}(F_n) on random cases
    std::mt19937_64 rng(107);
    for (int rep = 0; rep < 5; ++rep) {
        const auto t = random_gamma_point(rng, 5, true);
        const auto F = MappingDescriptor::fbar();
        const int n = 3;
        auto restricted = [&](std::span<const double> u) {
            std::vector<double> out;
            evaluate_on_grid(F, u, SequencePoint{}, out);
            return out[0];
        };
        const double diag = product_eval_k(restricted, first_coords(t, n),
                                           KernelFamily::bernstein(), n, Enumerate{});
        const double full = enumerate_eval(F, t, bern_config(n)).scalar();
        CHECK(diag == doctest::Approx(full).epsilon(1e-12));
    }

    // |u_1 - u_2| is Lip_1 for the sum metric and stays so under the operator
    auto f = [](std::span<const double> u) { return std::abs(u[0] - u[1]); };
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int n : {2, 4}) {
        for (int rep = 0; rep < 300; ++rep) {
            const std::vector<double> x = {unif(rng), unif(rng)};
            const std::vector<double> y = {unif(rng), unif(rng)};
            const double dist = std::abs(x[0] - y[0]) + std::abs(x[1] - y[1]);
            if (dist < 1e-9) continue;
            const double lx = product_eval_k(f, x, KernelFamily::bernstein(), n, Enumerate{});
            const double ly = product_eval_k(f, y, KernelFamily::bernstein(), n, Enumerate{});
            CHECK(std::abs(lx - ly) <= dist + 1e-9);
        }
    }

    CHECK_THROWS_AS((void)product_eval_k(sum2, t2, KernelFamily::szasz_mirakjan(), 2, Enumerate{}),
                    StrategyError);
    CHECK_THROWS_AS((void)product_eval_k(sum2, t2, KernelFamily::bernstein(), 4000, Enumerate{}),
                    FeasibilityError);
}

TEST_CASE("counterexample signs: both gaps nonnegative and matching closed forms") {
    for (int n = 1; n <= 5; ++n) {
        std::vector<double> head(static_cast<std::size_t>(n), 1.0);
        head.push_back(0.5);
        head.push_back(0.5);
        const auto tbar = SequencePoint::gamma(head);
        const auto fbar = MappingDescriptor::fbar();
        OperatorConfig cfg{KernelFamily::bernstein(), n, {}, ClosedForm{}};

        const double gap4 =
            evaluate_scalar(fbar, tbar) - closed_form_eval(fbar, tbar, cfg).scalar();
        const double expected4 = fbar_weighted_tail(tbar, static_cast<std::size_t>(n));
        CHECK(gap4 == doctest::Approx(expected4).epsilon(1e-12));
        CHECK(gap4 >= 0.0);

        const double gap5 = closed_form_eval(fbar, tbar, cfg.with_n(n + 1)).scalar() -
                            closed_form_eval(fbar, tbar, cfg).scalar();
        const double tn1 = 0.5;
        const double expected5 =
            std::ldexp(1.0, -(n + 1)) * (tn1 * tn1 + (tn1 - tn1 * tn1) / (n + 1));
        CHECK(gap5 == doctest::Approx(expected5).epsilon(1e-12));
        CHECK(gap5 >= 0.0);

        if (n == 2) {
            CHECK(expected4 == doctest::Approx(0.046875).epsilon(1e-14));      // 0.25/8 + 0.25/16
            CHECK(expected5 == doctest::Approx(1.0 / 24.0).epsilon(1e-14));    // (1/8)(1/4 + 1/12)
        }
    }
}

TEST_CASE("auto_eval falls back in the documented order") {
    const auto t = SequencePoint::gamma({0.5, 0.5});
    OperatorConfig cfg{KernelFamily::bernstein(), 2, {}, Enumerate{}};
    CHECK(auto_eval(MappingDescriptor::norm_sq(), t, cfg).engine == "closed-form");

    RankTerm term{{1.0}, {Factor1D::identity()}};
    CHECK(auto_eval(MappingDescriptor::rank_structured({term}), t, cfg).engine == "rank");

    const auto bb = MappingDescriptor::black_box_scalar(
        [](std::span<const double> u) { return u[0]; }, 2);
    CHECK(auto_eval(bb, t, cfg).engine == "enumerate");

    OperatorConfig big{KernelFamily::bernstein(), 12, {}, Enumerate{}};
    const auto mc = auto_eval(bb, t, big, 1000, 3);
    CHECK(mc.engine == "monte-carlo");
    CHECK(mc.terms_or_samples == 1000);
}
