#include "viralcm/degree_model.hpp"

#include <doctest.h>

#include <cmath>

using namespace viralcm;

namespace {

JointDegreeDistribution two_point() {
    return JointDegreeDistribution::from_table({{1, 0, 0.5}, {0, 1, 0.5}});
}

JointDegreeDistribution default_family() {
    return JointDegreeDistribution::make_thinned_poisson(4.0, 0.5, 30);
}

// closed forms for the independent product-Poisson family
double thinned_g(double mu, double q, double x, double y) {
    return std::exp(mu * ((1.0 - q) * (x - 1.0) + q * (y - 1.0)));
}
double thinned_h(double mu, double q, double x) {
    return mu * q * x * std::exp(mu * (x - 1.0));
}
double thinned_hbar(double mu, double q, double x) {
    return mu * x * std::exp(mu * q * (x - 1.0));
}

} // namespace

TEST_CASE("moments of two-point and deterministic tables") {
    const auto d = two_point();
    const auto m = d.moments();
    CHECK(m.lambda_r == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.lambda_t == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.lambda == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.e_dt_d == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.p_d1 == doctest::Approx(1.0).epsilon(1e-14));

    const auto d2 = JointDegreeDistribution::from_table({{0, 2, 1.0}});
    const auto m2 = d2.moments();
    CHECK(m2.lambda_r == 0.0);
    CHECK(m2.lambda_t == 2.0);
    CHECK(m2.e_dt_d == 4.0);
}

TEST_CASE("moments of the thinned-Poisson family match closed forms") {
    const auto m = default_family().moments();
    CHECK(std::abs(m.lambda - 4.0) < 1e-6);
    CHECK(std::abs(m.lambda_t - 2.0) < 1e-6);
    CHECK(std::abs(m.e_dt_d - 10.0) < 1e-6);
}

TEST_CASE("pgf values") {
    const auto d = two_point();
    CHECK(d.pgf_g(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.pgf_g(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-14));

    const auto tp = default_family();
    CHECK(tp.pgf_g(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(tp.pgf_g(0.5, 0.5) - thinned_g(4, 0.5, 0.5, 0.5)) < 1e-9);
    CHECK_THROWS_AS(tp.pgf_g(-0.1, 0.5), std::domain_error);
    CHECK_THROWS_AS(tp.pgf_g(0.5, 1.2), std::domain_error);
}

TEST_CASE("h and H forward") {
    const auto d = two_point();
    CHECK(d.h_forward(1.0) == doctest::Approx(0.5).epsilon(1e-14)); // = lambda_t
    CHECK(d.h_forward(0.0) == 0.0);
    CHECK(d.H_forward(0.5) == doctest::Approx(-0.25).epsilon(1e-13));

    const auto tp = default_family();
    CHECK(std::abs(tp.h_forward(0.5) - thinned_h(4, 0.5, 0.5)) < 1e-9);
    CHECK(std::abs(tp.h_forward(1.0) - tp.moments().lambda_t) < 1e-12);
}

TEST_CASE("bar-side generating functions") {
    const auto tp = default_family();
    CHECK(tp.g_bar(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(tp.H_bar(1.0)) < 1e-12);
    CHECK(tp.H_bar(0.0) == 0.0);
    CHECK(std::abs(tp.H_bar(0.5) - (4 * 0.5 * (0.5 - std::exp(-1.0)))) < 1e-9);
    CHECK(std::abs(tp.h_bar(0.5) - thinned_hbar(4, 0.5, 0.5)) < 1e-9);
    CHECK(std::abs(tp.h_bar(1.0) - tp.moments().lambda) < 1e-12);

    const auto det = JointDegreeDistribution::from_table({{0, 2, 1.0}});
    for (double x : {0.0, 0.2, 0.7, 1.0}) {
        CHECK(det.h_bar(x) == doctest::Approx(2 * x * x).epsilon(1e-14));
        CHECK(det.H_bar(x) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("H vanishes at both endpoints for a spread of distributions") {
    const auto dists = {two_point(), default_family(),
                        JointDegreeDistribution::make_thinned_poisson(4.0, 0.2, 30),
                        JointDegreeDistribution::from_table({{1, 0, 0.3}, {2, 3, 0.3}, {0, 1, 0.4}})};
    for (const auto& d : dists) {
        CHECK(std::abs(d.H_forward(1.0)) < 1e-12);
        CHECK(std::abs(d.H_forward(0.0)) < 1e-12);
        CHECK(std::abs(d.H_bar(1.0)) < 1e-12);
        CHECK(std::abs(d.H_bar(0.0)) < 1e-12);
    }
}

TEST_CASE("pgf is monotone in each argument") {
    const auto tp = default_family();
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0;
        const double v = tp.pgf_g(x, 0.7);
        CHECK(v >= prev);
        prev = v;
    }
    prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double y = i / 20.0;
        const double v = tp.pgf_g(0.3, y);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("H sign structure on a fine grid") {
    const int grid = 10000;
    const auto super = default_family();
    int sign_changes = 0;
    double prev = super.H_forward(1.0 / grid);
    for (int i = 2; i < grid; ++i) {
        const double v = super.H_forward(static_cast<double>(i) / grid);
        if ((prev < 0) != (v < 0)) ++sign_changes;
        prev = v;
    }
    CHECK(sign_changes == 1);

    const auto sub = JointDegreeDistribution::make_thinned_poisson(4.0, 0.2, 30);
    for (int i = 1; i < grid; ++i)
        CHECK(sub.H_forward(static_cast<double>(i) / grid) <= 1e-12);
}

TEST_CASE("size-biased transform") {
    const auto d = two_point().size_biased();
    REQUIRE(d.cells().size() == 1);
    CHECK(d.cells()[0].k == 0);
    CHECK(d.cells()[0].l == 0);
    CHECK(d.cells()[0].p == doctest::Approx(1.0));

    const auto det = JointDegreeDistribution::from_table({{0, 2, 1.0}}).size_biased();
    REQUIRE(det.cells().size() == 1);
    CHECK(det.cells()[0].k == 0);
    CHECK(det.cells()[0].l == 1);

    // Poisson self-similarity: size-biased thinned-Poisson is the same law
    const auto tp = default_family();
    const auto sb = tp.size_biased();
    double tv = 0.0;
    for (const auto& c : sb.cells()) tv += std::abs(c.p - tp.pmf(c.k, c.l));
    CHECK(tv < 1e-6);

    // output is a valid distribution: masses sum to 1
    double total = 0.0;
    for (const auto& c : sb.cells()) total += c.p;
    CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("criticality verdicts") {
    CHECK(two_point().criticality().verdict == Criticality::SubOrCritical);
    CHECK(default_family().criticality().verdict == Criticality::Supercritical);
    const auto sub = JointDegreeDistribution::make_thinned_poisson(4.0, 0.2, 30);
    CHECK(sub.criticality().verdict == Criticality::SubOrCritical);

    const auto no_d1 = JointDegreeDistribution::from_table({{0, 2, 0.5}, {2, 0, 0.5}});
    CHECK_THROWS_AS(no_d1.criticality(), std::domain_error);
}

TEST_CASE("thinned-Poisson constructor") {
    const auto tp = default_family();
    CHECK(std::abs(tp.pmf(0, 0) - std::exp(-4.0)) < 1e-9);
    CHECK_THROWS_AS(JointDegreeDistribution::make_thinned_poisson(4.0, 0.5, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(JointDegreeDistribution::make_thinned_poisson(-1.0, 0.5, 30),
                    std::invalid_argument);
}

TEST_CASE("table constructor validation") {
    const auto d = JointDegreeDistribution::from_table({{1, 0, 1.0}});
    CHECK(d.moments().lambda == doctest::Approx(1.0));

    CHECK_THROWS_AS(JointDegreeDistribution::from_table({}), std::invalid_argument);
    CHECK_THROWS_AS(JointDegreeDistribution::from_table({{1, 0, -0.2}, {0, 1, 1.2}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(JointDegreeDistribution::from_table({{0, 0, 1.0}}), std::invalid_argument);

    // unnormalized tables are rescaled
    const auto scaled = JointDegreeDistribution::from_table({{1, 0, 2.0}, {0, 1, 2.0}});
    CHECK(scaled.pmf(1, 0) == doctest::Approx(0.5));
}
