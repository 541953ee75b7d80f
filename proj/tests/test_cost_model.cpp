#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "bandit_bonus/cost_model.hpp"
#include "bandit_bonus/errors.hpp"
#include "bandit_bonus/numerics.hpp"

using namespace bb;

TEST_CASE("uniform cost law closed forms", "[cost]") {
    const CostDistribution law = CostDistribution::uniform(2.0);
    CHECK(law.cbar() == 2.0);
    CHECK(law.cdf(0.0) == 0.0);
    CHECK(law.cdf(2.0) == 1.0);
    CHECK(law.cdf(0.5) == 0.25);
    CHECK(law.pdf(1.3) == 0.5);
    // beta(x) = x + H/h = 2x, rent(x) = H^2/h = x^2/cbar, T(b) = b^2/(2 cbar).
    CHECK(law.virtual_value(0.7) == Catch::Approx(1.4).margin(1e-14));
    CHECK(law.info_rent(0.8) == Catch::Approx(0.32).margin(1e-14));
    CHECK(law.truncated_cost_mass(1.0) == Catch::Approx(0.25).margin(1e-14));
    CHECK(law.quantile(0.25) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("uniform cost law inverse round trips", "[cost]") {
    const CostDistribution law = CostDistribution::uniform(1.5);
    for (double x : {0.0, 0.2, 0.7, 1.2, 1.5}) {
        CHECK(law.virtual_inverse(law.virtual_value(x)) == Catch::Approx(x).margin(1e-11));
        CHECK(law.info_rent_inverse(law.info_rent(x)) == Catch::Approx(x).margin(1e-11));
    }
    // Beyond the support the virtual value continues as the identity.
    const double top = law.virtual_value(1.5);
    CHECK(law.virtual_inverse(top + 2.0) == Catch::Approx(top + 2.0).margin(1e-14));
    CHECK(law.virtual_inverse(0.0) == 0.0);
}

TEST_CASE("information-rent inverse flags the capped regime", "[cost]") {
    const CostDistribution law = CostDistribution::uniform(1.0);
    CHECK_THROWS_AS(law.info_rent_inverse(law.info_rent(1.0) + 1e-9), std::out_of_range);
    CHECK_THROWS_AS(law.info_rent_inverse(-0.1), std::domain_error);
    CHECK_THROWS_AS(law.virtual_inverse(-0.1), std::domain_error);
    CHECK_THROWS_AS(law.cdf(1.5), std::domain_error);
    CHECK_THROWS_AS(law.quantile(1.5), std::domain_error);
}

TEST_CASE("uniform construction rejects a non-positive cap", "[cost]") {
    CHECK_THROWS_AS(CostDistribution::uniform(0.0), InvariantError);
    CHECK_THROWS_AS(CostDistribution::uniform(-1.0), InvariantError);
}

TEST_CASE("tabulated law from uniform samples matches the closed forms", "[cost]") {
    // PCHIP reproduces linear data exactly, so a sampled uniform CDF must
    // agree with the analytic uniform law to rounding.
    std::vector<double> x, h;
    for (int i = 0; i <= 20; ++i) {
        x.push_back(1.5 * i / 20.0);
        h.push_back(i / 20.0);
    }
    const CostDistribution tab = CostDistribution::tabulated(x, h);
    const CostDistribution uni = CostDistribution::uniform(1.5);
    for (double c : {0.1, 0.4, 0.9, 1.4}) {
        CHECK(tab.cdf(c) == Catch::Approx(uni.cdf(c)).margin(1e-12));
        CHECK(tab.pdf(c) == Catch::Approx(uni.pdf(c)).margin(1e-10));
        CHECK(tab.virtual_value(c) == Catch::Approx(uni.virtual_value(c)).margin(1e-9));
        CHECK(tab.info_rent(c) == Catch::Approx(uni.info_rent(c)).margin(1e-9));
        CHECK(tab.truncated_cost_mass(c) ==
              Catch::Approx(uni.truncated_cost_mass(c)).margin(1e-8));
        CHECK(tab.quantile(uni.cdf(c)) == Catch::Approx(c).margin(1e-9));
    }
}

TEST_CASE("tabulated law rejects malformed samples", "[cost]") {
    CHECK_THROWS_AS(CostDistribution::tabulated({0.0, 1.0, 2.0}, {0.0, 0.5, 1.0}),
                    InvariantError); // too few samples
    CHECK_THROWS_AS(
        CostDistribution::tabulated({0.1, 0.5, 0.7, 1.0}, {0.0, 0.3, 0.6, 1.0}),
        InvariantError); // support must start at zero
    CHECK_THROWS_AS(
        CostDistribution::tabulated({0.0, 0.5, 0.7, 1.0}, {0.0, 0.6, 0.4, 1.0}),
        InvariantError); // CDF must increase
    CHECK_THROWS_AS(
        CostDistribution::tabulated({0.0, 0.5, 0.7, 1.0}, {0.1, 0.3, 0.6, 1.0}),
        InvariantError); // H(0) = 0 violated
}

TEST_CASE("tabulated law loads from CSV and rejects malformed files", "[cost]") {
    const std::string good = "/tmp/bb_cost_good.csv";
    {
        std::ofstream out(good);
        out << "x,H\n";
        for (int i = 0; i <= 10; ++i) out << 2.0 * i / 10.0 << "," << i / 10.0 << "\n";
    }
    const CostDistribution law = CostDistribution::tabulated_from_csv(good);
    CHECK(law.cbar() == 2.0);
    CHECK(law.cdf(1.0) == Catch::Approx(0.5).margin(1e-12));

    const std::string headerless = "/tmp/bb_cost_headerless.csv";
    {
        std::ofstream out(headerless);
        out << "0.0,0.0\n1.0,1.0\n";
    }
    CHECK_THROWS_AS(CostDistribution::tabulated_from_csv(headerless), ConfigError);
    CHECK_THROWS_AS(CostDistribution::tabulated_from_csv("/tmp/bb_no_such_file.csv"),
                    ConfigError);

    const std::string garbled = "/tmp/bb_cost_garbled.csv";
    {
        std::ofstream out(garbled);
        out << "x,H\n0.0,0.0\nnope,0.5\n1.0,1.0\n";
    }
    CHECK_THROWS_AS(CostDistribution::tabulated_from_csv(garbled), ConfigError);
    std::remove(good.c_str());
    std::remove(headerless.c_str());
    std::remove(garbled.c_str());
}

TEST_CASE("tabulated-law inverses agree with bisection on a curved CDF", "[cost]") {
    // H(x) = x^2 on [0, 1]: beta(x) = 3x/2, rent(x) = x^3/2, T(b) = 2b^3/3.
    std::vector<double> x, h;
    for (int i = 0; i <= 40; ++i) {
        const double xi = i / 40.0;
        x.push_back(xi);
        h.push_back(xi * xi);
    }
    const CostDistribution law = CostDistribution::tabulated(x, h);
    for (double c : {0.3, 0.6, 0.9}) {
        CHECK(law.virtual_value(c) == Catch::Approx(1.5 * c).epsilon(5e-3));
        CHECK(law.info_rent(c) == Catch::Approx(0.5 * c * c * c).epsilon(1e-2));
        CHECK(law.truncated_cost_mass(c) == Catch::Approx(2.0 * c * c * c / 3.0).epsilon(1e-2));
        CHECK(law.virtual_inverse(law.virtual_value(c)) == Catch::Approx(c).margin(1e-10));
        CHECK(law.info_rent_inverse(law.info_rent(c)) == Catch::Approx(c).margin(1e-10));
        CHECK(law.quantile(law.cdf(c)) == Catch::Approx(c).margin(1e-10));
    }
}
