#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "approxop/function_model.hpp"

using namespace approxop;

namespace {

double brute_fbar(const SequencePoint& t, std::size_t terms = 4000) {
    long double acc = 0.0L;
    long double w = 1.0L;
    for (std::size_t j = 1; j <= terms; ++j) {
        w *= 0.5L;
        const long double x = t.coord(j);
        acc += x * x * w;
    }
    return static_cast<double>(acc);
}

double brute_linear(const SequencePoint& phi, const SequencePoint& t, std::size_t terms = 1000) {
    long double acc = 0.0L;
    for (std::size_t j = 1; j <= terms; ++j)
        acc += static_cast<long double>(phi.coord(j)) * t.coord(j);
    return static_cast<double>(acc);
}

}  // namespace

TEST_CASE("evaluate: registered forms") {
    const auto t = SequencePoint::gamma({0.5, 0.5});
    CHECK(evaluate_scalar(MappingDescriptor::one(), t) == 1.0);
    CHECK(evaluate_scalar(MappingDescriptor::norm_sq(), t) == 0.5);
    CHECK(evaluate_scalar(MappingDescriptor::coord(2), t) == 0.5);
    CHECK(evaluate_scalar(MappingDescriptor::coord(5), t) == 0.0);
    CHECK(evaluate_scalar(MappingDescriptor::coord_sq(1), t) == 0.25);

    // fbar at (1, 1, 0, ...): 1/2 + 1/4
    const auto ones2 = SequencePoint::gamma({1.0, 1.0});
    CHECK(brute_fbar(ones2) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(evaluate_scalar(MappingDescriptor::fbar(), ones2) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("evaluate: psi_t^2 vanishes exactly at its center") {
    const auto centers = {SequencePoint::gamma({0.3, 0.8}),
                          SequencePoint::gamma({0.9}, Tail::geometric(0.7, 0.4))};
    for (const auto& c : centers) {
        CHECK(evaluate_scalar(MappingDescriptor::psi_sq(c), c) == 0.0);
    }
}

TEST_CASE("evaluate: fbar partial sums and weighted tail") {
    for (int n : {1, 2, 5, 9}) {
        std::vector<double> head(static_cast<std::size_t>(n), 1.0);
        const auto tbar = SequencePoint::gamma(head);
        // sum_{j<=n} 2^-j = 1 - 2^-n, exactly representable
        CHECK(evaluate_scalar(MappingDescriptor::fbar(), tbar) == 1.0 - std::ldexp(1.0, -n));
    }
    const auto g = SequencePoint::gamma({0.2, 0.9}, Tail::geometric(0.8, 0.6));
    CHECK(evaluate_scalar(MappingDescriptor::fbar(), g) ==
          doctest::Approx(brute_fbar(g)).epsilon(1e-13));
    for (std::size_t n : {0, 1, 2, 3, 7}) {
        long double brute = 0.0L;
        for (std::size_t j = n + 1; j <= 4000; ++j)
            brute += static_cast<long double>(g.coord(j)) * g.coord(j) * std::pow(0.5L, j);
        CHECK(fbar_weighted_tail(g, n) == doctest::Approx(static_cast<double>(brute)).epsilon(1e-13));
    }
}

TEST_CASE("evaluate: linear functional agrees with coordinate-wise brute force") {
    const auto phi = SequencePoint::coeffs({1.5, -0.5}, Tail::geometric(2.0, 0.5));
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const auto t = random_gamma_point(rng, 5, true);
        CHECK(evaluate_scalar(MappingDescriptor::linear_functional(phi), t) ==
              doctest::Approx(brute_linear(phi, t)).epsilon(1e-10));
    }
}

TEST_CASE("evaluate: rank-structured and black-box forms") {
    // F(u) = u_1 u_2 as one rank term
    RankTerm term;
    term.coeff = {1.0};
    term.factors = {Factor1D::identity(), Factor1D::identity()};
    const auto F = MappingDescriptor::rank_structured({term});
    CHECK(evaluate_scalar(F, SequencePoint::gamma({0.5, 0.25})) == 0.125);
    CHECK(F.codomain_dim() == 1);

    const auto bb = MappingDescriptor::black_box_scalar(
        [](std::span<const double> u) { return u[0] - u[1]; }, 2);
    CHECK(evaluate_scalar(bb, SequencePoint::gamma({0.75, 0.5, 0.9})) == 0.25);

    // polynomial factor evaluation (Horner)
    const Factor1D p = Factor1D::poly({1.0, -2.0, 3.0});
    CHECK(p(0.5) == doctest::Approx(1.0 - 1.0 + 0.75).epsilon(1e-15));
    CHECK(Factor1D::abs_dev(0.3)(0.1) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("tensor forms: evaluate(g (x) v) = evaluate(g) * v") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const auto t = SequencePoint::gamma({0.4, 0.6, 0.1}, Tail::geometric(0.5, 0.5));
    const std::vector<MappingDescriptor> scalars = {
        MappingDescriptor::one(),
        MappingDescriptor::coord(2),
        MappingDescriptor::coord_sq(3),
        MappingDescriptor::norm_sq(),
        MappingDescriptor::fbar(),
        MappingDescriptor::psi_sq(SequencePoint::gamma({0.2})),
        MappingDescriptor::linear_functional(SequencePoint::coeffs({1.0, 2.0}))};
    for (const auto& g : scalars) {
        const double s = evaluate_scalar(g, t);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> v(3);
            for (double& x : v) x = unif(rng);
            const auto gv = g.tensor_with(v);
            CHECK(gv.codomain_dim() == 3);
            const auto got = evaluate(gv, t);
            for (std::size_t k = 0; k < 3; ++k)
                CHECK(got[k] == doctest::Approx(s * v[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("modulus: closed forms and provenance") {
    const auto phi2 = SequencePoint::coeffs({2.0});  // norm 2
    const Modulus lf = modulus(MappingDescriptor::linear_functional(phi2), 0.1);
    CHECK(lf.value == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(lf.provenance == OmegaProvenance::Exact);

    const Modulus one = modulus(MappingDescriptor::one(), 3.0);
    CHECK(one.value == 0.0);
    CHECK(one.provenance == OmegaProvenance::Exact);

    const Modulus c1 = modulus(MappingDescriptor::coord(1), 0.5);
    CHECK(c1.value == 0.5);
    CHECK(modulus(MappingDescriptor::coord(1), 7.0).value == 1.0);

    CHECK(modulus(MappingDescriptor::norm_sq(), 0.5).provenance == OmegaProvenance::Unknown);
    const Modulus ns = modulus(MappingDescriptor::norm_sq(), 0.5, 2.0);
    CHECK(ns.provenance == OmegaProvenance::Upper);
    CHECK(ns.value == doctest::Approx(0.5 * (4.0 + 0.5)).epsilon(1e-14));

    const Modulus fb = modulus(MappingDescriptor::fbar(), 0.3);
    CHECK(fb.provenance == OmegaProvenance::Upper);
    CHECK(fb.value == doctest::Approx(0.6 / std::sqrt(3.0)).epsilon(1e-13));

    const auto rank_form = MappingDescriptor::rank_structured(
        {RankTerm{{1.0}, {Factor1D::identity()}}});
    CHECK(modulus(rank_form, 0.5).provenance == OmegaProvenance::Unknown);

    // tensor scales the modulus by ||v||
    const Modulus tv = modulus(MappingDescriptor::coord(1).tensor_with({3.0, 4.0}), 0.5);
    CHECK(tv.value == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("modulus: nondecreasing and subadditive for exact closed forms") {
    const std::vector<MappingDescriptor> forms = {
        MappingDescriptor::one(), MappingDescriptor::coord(2), MappingDescriptor::coord_sq(1),
        MappingDescriptor::linear_functional(SequencePoint::coeffs({0.3, -1.2}, Tail::geometric(1.0, 0.5))),
        MappingDescriptor::fbar()};
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unif(0.01, 2.0);
    for (const auto& F : forms) {
        for (int rep = 0; rep < 200; ++rep) {
            const double d1 = unif(rng);
            const double d2 = unif(rng);
            const double w1 = modulus(F, d1).value;
            const double w2 = modulus(F, d2).value;
            const double w12 = modulus(F, d1 + d2).value;
            CHECK(w12 + 1e-10 >= w1);  // nondecreasing
            CHECK(w12 <= w1 + w2 + 1e-10);
        }
    }
}

TEST_CASE("empirical_modulus is a lower bound of the exact modulus") {
    std::mt19937_64 rng(31);
    CHECK(empirical_modulus(MappingDescriptor::one(), 0.5, 100, rng) == 0.0);

    const auto phi = SequencePoint::coeffs({0.8, -0.6});  // norm 1
    const auto lf = MappingDescriptor::linear_functional(phi);
    for (double delta : {0.05, 0.2, 0.7}) {
        const double emp = empirical_modulus(lf, delta, 2000, rng);
        CHECK(emp <= delta * 1.0 + 1e-12);
    }

    // coord(1) at delta 0.3: the exact modulus is 0.3 and axis moves nearly attain it
    const double emp = empirical_modulus(MappingDescriptor::coord(1), 0.3, 10'000, rng);
    CHECK(emp >= 0.25);
    CHECK(emp <= 0.3 + 1e-12);
}

TEST_CASE("convexity_probe: convex forms pass, a concave black box fails") {
    std::mt19937_64 rng(37);
    const auto ns_report = convexity_probe(MappingDescriptor::norm_sq(), 2, 300, rng);
    CHECK(ns_report.ok());
    CHECK(ns_report.checked == 300);

    const auto coord_report = convexity_probe(MappingDescriptor::coord(1), 1, 300, rng);
    CHECK(coord_report.ok());

    const auto concave = MappingDescriptor::black_box_scalar(
        [](std::span<const double> u) { return -u[0] * u[0]; }, 1);
    const auto bad = convexity_probe(concave, 1, 300, rng);
    CHECK_FALSE(bad.ok());
    const auto& v = bad.violations.front();
    CHECK(v.lhs > v.rhs);  // witness really violates the chord inequality
}
