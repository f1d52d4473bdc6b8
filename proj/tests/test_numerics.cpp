#include <doctest.h>

#include <random>

#include "ebsc/numerics.hpp"
#include "ebsc/rng.hpp"

using namespace ebsc;

TEST_CASE("pairwise sum matches plain sum on benign data") {
    std::vector<double> xs(1000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = std::sin(double(i));
    double plain = 0.0;
    for (double x : xs) plain += x;
    CHECK(pairwise_sum(xs) == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("trapezoid integrates a linear function exactly") {
    std::vector<double> v(11);
    for (int i = 0; i <= 10; ++i) v[std::size_t(i)] = 2.0 * i;  // f = 2k on step 0.1
    CHECK(trapezoid(v, 0.1) == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("normal quantile hits reference points") {
    CHECK(rng::normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(rng::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(rng::normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    CHECK(rng::normal_quantile(0.84134474606854293) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("counter rng is reproducible and roughly standard normal") {
    const std::uint64_t seed = 7;
    CHECK(rng::normal(seed, rng::Stream::Brownian, 3, 5) ==
          rng::normal(seed, rng::Stream::Brownian, 3, 5));
    CHECK(rng::normal(seed, rng::Stream::Brownian, 3, 5) !=
          rng::normal(seed, rng::Stream::Brownian, 3, 6));

    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng::normal(seed, rng::Stream::Actions, 0, std::uint64_t(i));
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::fabs(mean) < 4.0 / std::sqrt(double(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("parallel_for covers the index range once") {
    std::vector<int> hits(10000, 0);
    parallel_for(hits.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) hits[i] += 1;
    });
    for (int h : hits) CHECK(h == 1);
}

TEST_CASE("resolvent inverse flags a singular matrix") {
    Eigen::MatrixXd m = -Eigen::MatrixXd::Identity(2, 2);  // I + m = 0
    CHECK_THROWS_AS(la::resolvent_inverse(m, "test"), NumericalError);
    try {
        la::resolvent_inverse(m, "test");
    } catch (const NumericalError& e) {
        CHECK(e.code() == ErrorCode::SingularResolvent);
    }
}
