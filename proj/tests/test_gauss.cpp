#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "unbias/gauss.hpp"

using namespace unbias;

TEST_CASE("normal pdf and cdf reference values") {
    CHECK(gauss::pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(gauss::cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gauss::cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
    CHECK(gauss::cdf(-1.96) == doctest::Approx(0.0249978951482205).epsilon(1e-13));
    // deep tail keeps relative accuracy through erfc
    CHECK(gauss::cdf(-8.0) == doctest::Approx(6.220960574271786e-16).epsilon(1e-12));
    CHECK(gauss::cdf(-37.0) > 0.0);
    CHECK(gauss::cdf(1e3) == 1.0);
}

TEST_CASE("quantile inverts the cdf") {
    const double ps[] = {1e-12, 1e-6, 1e-3, 0.01, 0.2, 0.5, 0.7, 0.99, 1 - 1e-6, 1 - 1e-12};
    for (double p : ps) {
        const double z = gauss::ppf(p);
        CHECK(gauss::cdf(z) == doctest::Approx(p).epsilon(5e-13));
    }
    CHECK(gauss::ppf(0.5) == 0.0);
    CHECK(gauss::ppf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
}

TEST_CASE("quantile is monotone and handles the boundary") {
    double prev = -1e30;
    for (int i = 1; i < 1000; ++i) {
        const double z = gauss::ppf(i / 1000.0);
        CHECK(z > prev);
        prev = z;
    }
    CHECK(std::isinf(gauss::ppf(0.0)));
    CHECK(std::isinf(gauss::ppf(1.0)));
    CHECK(std::isnan(gauss::ppf(-0.1)));
    CHECK(std::isnan(gauss::ppf(1.1)));
}

TEST_CASE("quantile symmetry") {
    for (double p : {0.001, 0.05, 0.21, 0.37, 0.49}) {
        CHECK(gauss::ppf(p) == doctest::Approx(-gauss::ppf(1.0 - p)).epsilon(1e-13));
    }
}
