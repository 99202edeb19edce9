#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cmvlab/errors.hpp"
#include "cmvlab/parallel.hpp"
#include "cmvlab/stats.hpp"

using namespace cmvlab;

TEST_CASE("mean and standard error") {
    const auto m = mean_stats({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == doctest::Approx(2.5));
    CHECK(m.std_err == doctest::Approx(std::sqrt(1.6666666666666667 / 4.0)));
    CHECK(mean_stats({7.0}).std_err == 0.0);
}

TEST_CASE("wilson interval") {
    const auto p = wilson(0, 100);
    CHECK(p.p == 0.0);
    CHECK(p.lo == 0.0);
    CHECK(p.hi == doctest::Approx(0.0370).epsilon(0.01));
    const auto q = wilson(50, 100);
    CHECK(q.lo == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(q.hi == doctest::Approx(0.5962).epsilon(1e-3));
    CHECK(wilson(100, 100).hi == 1.0);
    CHECK_THROWS_AS(wilson(3, 2), ParameterError);
}

TEST_CASE("linear fits") {
    const auto f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.slope_std_err == doctest::Approx(0.0));
    CHECK_THROWS_AS(linear_fit({1, 1}, {2, 3}), ParameterError);

    const auto g = log_linear_fit({10, 20, 40}, {wilson(500, 1000), wilson(250, 1000), wilson(0, 1000)});
    CHECK(g.slope < 0.0);
    CHECK(t_quantile_975(1) == doctest::Approx(12.706).epsilon(1e-4));
    CHECK(t_quantile_975(1000000) == doctest::Approx(1.95996).epsilon(1e-4));
}

TEST_CASE("parallel map is order independent") {
    auto task = [](std::size_t i) { return static_cast<double>(i * i) * 0.5; };
    const auto a = parallel_map(1000, 1, task);
    const auto b = parallel_map(1000, 4, task);
    const auto c = parallel_map(1000, 0, task);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(parallel_map(0, 3, task).empty());

    auto thrower = [](std::size_t i) -> int {
        if (i == 17 || i == 500) throw std::runtime_error("bad " + std::to_string(i));
        return 0;
    };
    try {
        parallel_map(1000, 4, thrower);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "bad 17");
    }
}
