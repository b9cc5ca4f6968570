#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "nbldpc/degree.hpp"
#include "nbldpc/field.hpp"
#include "nbldpc/rng.hpp"

using namespace nbldpc;
using Catch::Approx;

namespace {

DegreeDistribution dist(std::map<int, double> m) {
    DegreeDistribution d;
    d.coeffs = std::move(m);
    return d;
}

const DegreeDistribution kTableILambda = dist({{2, 0.5}, {4, 0.5}});

}  // namespace

TEST_CASE("uniform_label_profile closed forms") {
    auto p1 = uniform_label_profile(1);
    REQUIRE(p1.a.size() == 1);
    CHECK(p1.a[0] == Approx(1.0));
    CHECK(p1.d_m == Approx(1.0));

    auto p2 = uniform_label_profile(2);
    CHECK(p2.a[0] == Approx(2.0 / 3));
    CHECK(p2.a[1] == Approx(1.0 / 3));
    CHECK(p2.d_m == Approx(4.0 / 3));

    auto p3 = uniform_label_profile(3);
    CHECK(p3.a[0] == Approx(3.0 / 7));
    CHECK(p3.a[1] == Approx(3.0 / 7));
    CHECK(p3.a[2] == Approx(1.0 / 7));
    CHECK(p3.d_m == Approx(12.0 / 7));
}

TEST_CASE("uniform_label_profile matches enumeration of companion-power rows") {
    for (int p : {2, 3, 4}) {
        auto field = make_field(p);
        auto prof = uniform_label_profile(p);
        std::vector<long long> hist(p + 1, 0);
        long long total = 0;
        for (auto& m : field.element_table)
            for (int r = 0; r < p; ++r) {
                hist[__builtin_popcount(m.row_bits[r])]++;
                ++total;
            }
        for (int i = 1; i <= p; ++i)
            CHECK(prof.a[i - 1] == Approx(static_cast<double>(hist[i]) / total).margin(1e-12));
    }
}

TEST_CASE("expand_weight_polynomial base cases and moment identity") {
    auto p2 = uniform_label_profile(2);
    auto b1 = expand_weight_polynomial(p2, 1);
    CHECK(b1.at(1) == Approx(2.0 / 3));
    CHECK(b1.at(2) == Approx(1.0 / 3));

    auto b2 = expand_weight_polynomial(p2, 2);
    CHECK(b2.at(2) == Approx(4.0 / 9));
    CHECK(b2.at(3) == Approx(4.0 / 9));
    CHECK(b2.at(4) == Approx(1.0 / 9));

    for (int p : {1, 2, 3, 5}) {
        auto prof = uniform_label_profile(p);
        for (int i : {1, 2, 4, 9}) {
            auto b = expand_weight_polynomial(prof, i);
            double mass = 0, mean = 0;
            for (auto& [j, c] : b) {
                CHECK(j >= i);
                CHECK(j <= p * i);
                mass += c;
                mean += j * c;
            }
            CHECK(mass == Approx(1.0).margin(1e-12));
            CHECK(mean == Approx(i * prof.d_m).margin(1e-9));
        }
    }
}

TEST_CASE("convert_distribution is the identity at p=1") {
    auto prof = uniform_label_profile(1);
    auto lam = dist({{2, 0.72}, {3, 0.21}, {5, 0.06}, {10, 0.01}});
    auto out = convert_distribution(lam, prof);
    REQUIRE(out.coeffs.size() == lam.coeffs.size());
    for (auto& [d, c] : lam.coeffs) CHECK(out.coeffs.at(d) == Approx(c).margin(1e-14));
}

TEST_CASE("convert_distribution of the F8 length-20000 code, exact oracle values") {
    // Oracle: exact rational evaluation of the conversion. With
    // a = (3,3,1)/7, d_m = 12/7 and lambda = 0.5 x + 0.5 x^3, the degree-2
    // output weight is b_{2,2} * lambda_2 / d_m = (9/49)(0.5)(7/12) = 3/56,
    // and the full vector follows from the two convolution powers.
    auto prof = uniform_label_profile(3);
    auto out = convert_distribution(kTableILambda, prof);

    CHECK(out.coeffs.at(2) == Approx(3.0 / 56).epsilon(1e-12));

    const std::map<int, double> expected = {
        {2, 0.0535714285714286}, {3, 0.1607142857142857}, {4, 0.1884110787172012},
        {5, 0.1384839650145773}, {6, 0.1260932944606414}, {7, 0.1377551020408163},
        {8, 0.1115160349854227}, {9, 0.0590379008746356}, {10, 0.0200437317784257},
        {11, 0.0040087463556851}, {12, 0.0003644314868805}};
    REQUIRE(out.coeffs.size() == expected.size());
    for (auto& [j, c] : expected) CHECK(out.coeffs.at(j) == Approx(c).margin(1e-10));

    double sum = 0;
    for (auto& [j, c] : out.coeffs) sum += c;
    CHECK(sum == Approx(1.0).margin(1e-12));
    CHECK(out.min_degree() == 2);
    CHECK(out.max_degree() == 12);
}

TEST_CASE("convert_distribution support and normalization properties") {
    Rng rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        int p = 1 + static_cast<int>(rng.below(4));
        auto prof = uniform_label_profile(p);
        DegreeDistribution d;
        double mass = 0;
        for (int k = 0; k < 3; ++k) {
            int deg = 2 + static_cast<int>(rng.below(10));
            double w = 0.05 + rng.uniform();
            d.coeffs[deg] += w;
            mass += w;
        }
        for (auto& [deg, c] : d.coeffs) c /= mass;
        auto out = convert_distribution(d, prof);
        CHECK(out.sum() == Approx(1.0).margin(1e-12));
        CHECK(out.min_degree() >= d.min_degree());
        CHECK(out.max_degree() <= p * d.max_degree());
    }
}

TEST_CASE("convert_distribution vs Monte-Carlo row weights, p=2 degree-2 checks") {
    // rho(x) = x: every check has symbol degree 2. Sample many random label
    // pairs, histogram the scalar-row weights of (A^{k1} | A^{k2}), and
    // compare edge-perspective frequencies with the conversion output.
    auto field = make_field(2);
    auto prof = uniform_label_profile(2);
    auto est = convert_distribution(dist({{2, 1.0}}), prof);

    Rng rng(20240803);
    const int samples = 1'000'000;
    std::map<int, long long> edge_hist;
    long long edge_total = 0;
    for (int s = 0; s < samples; ++s) {
        int k1 = static_cast<int>(rng.below(3)), k2 = static_cast<int>(rng.below(3));
        const auto& m1 = companion_power(field, k1);
        const auto& m2 = companion_power(field, k2);
        for (int t = 0; t < 2; ++t) {
            int w = __builtin_popcount(m1.row_bits[t]) + __builtin_popcount(m2.row_bits[t]);
            edge_hist[w] += w;
            edge_total += w;
        }
    }
    for (auto& [j, cnt] : edge_hist) {
        double freq = static_cast<double>(cnt) / edge_total;
        double expect = est.coeffs.count(j) ? est.coeffs.at(j) : 0.0;
        // 3 sigma on a binomial proportion with ~2.6M weighted draws
        double sigma = std::sqrt(expect * (1 - expect) / (samples * 2));
        CHECK(std::abs(freq - expect) <= 3 * sigma + 1e-9);
    }
}

TEST_CASE("design_rate") {
    CHECK(design_rate(dist({{2, 1.0}}), dist({{4, 1.0}})) == Approx(0.5));

    auto f4l = dist({{2, 0.72}, {3, 0.21}, {5, 0.06}, {10, 0.01}});
    auto f4r = dist({{4, 0.43}, {5, 0.57}});
    CHECK(design_rate(f4l, f4r) == Approx(0.5).margin(0.01));

    // regression constant from direct formula evaluation
    auto c1l = dist({{2, 0.71}, {4, 0.23}, {5, 0.03}, {8, 0.01}, {12, 0.02}});
    auto c1r = dist({{5, 0.32}, {6, 0.68}});
    double lhs = 0.71 / 2 + 0.23 / 4 + 0.03 / 5 + 0.01 / 8 + 0.02 / 12;
    double rhs = 0.32 / 5 + 0.68 / 6;
    CHECK(design_rate(c1l, c1r) == Approx(1.0 - rhs / lhs).epsilon(1e-12));
    CHECK(design_rate(c1l, c1r) == Approx(0.5791971524619339).margin(1e-12));
}

TEST_CASE("validation rejects malformed distributions") {
    CHECK_THROWS_AS(dist({{2, 0.5}, {3, 0.4}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(dist({{0, 1.0}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(dist({{2, -0.1}, {3, 1.1}}).validate(), std::invalid_argument);
}
