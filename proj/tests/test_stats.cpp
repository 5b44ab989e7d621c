#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "json.hpp"

#include "fpp/errors.hpp"
#include "fpp/experiments.hpp"
#include "fpp/laws.hpp"
#include "fpp/stats.hpp"

using namespace fpp;

TEST_CASE("special functions") {
    CHECK(kolmogorov_tail(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_tail(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(kolmogorov_tail(0.0) == 1.0);
    CHECK(kolmogorov_tail(10.0) < 1e-80);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    for (double x : {0.1, 1.0, 5.0}) CHECK(gamma_q(1.0, x) == doctest::Approx(std::exp(-x)));
}

TEST_CASE("ks tests are calibrated") {
    RngStream rng(1);
    const int reps = 400;
    int pass = 0;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> x(500);
        for (auto& v : x) v = rng.uniform();
        pass += ks_one_sample(x, [](double t) { return std::clamp(t, 0.0, 1.0); }, 0.05).pass;
    }
    CHECK(pass >= 0.90 * reps);
    CHECK(pass <= 0.99 * reps);

    // power against a shifted law
    std::vector<double> y(2000);
    for (auto& v : y) v = WeightLaw::exponential(1.2).sample(rng);
    CHECK_FALSE(ks_one_sample(y, [](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-t); }).pass);
}

TEST_CASE("ks against weight laws") {
    RngStream rng(2);
    for (const WeightLaw& l : {WeightLaw::ber_exp(0.4, 2.0), WeightLaw::geom0(0.3), WeightLaw::ber_geom_plus(0.6, 0.4),
                               WeightLaw::bernoulli(0.7)}) {
        std::vector<double> x(20000);
        for (auto& v : x) v = l.sample(rng);
        CHECK(ks_law(x, l).pass);
    }
    std::vector<double> g(20000);
    for (auto& v : g) v = WeightLaw::geom0(0.3).sample(rng);
    CHECK_FALSE(ks_law(g, WeightLaw::geom0(0.33)).pass);
    std::vector<double> b(20000);
    for (auto& v : b) v = WeightLaw::ber_exp(0.4, 2.0).sample(rng);
    CHECK_FALSE(ks_law(b, WeightLaw::ber_exp(0.45, 2.0)).pass);
}

TEST_CASE("two sample ks") {
    RngStream rng(3);
    std::vector<double> a(3000), b(3000);
    for (auto& v : a) v = rng.uniform();
    for (auto& v : b) v = rng.uniform();
    const TestResult same = ks_two_sample(a, a);
    CHECK(same.statistic == 0.0);
    CHECK(same.pass);
    CHECK(ks_two_sample(a, b).pass);
    for (auto& v : b) v = v * 1.1;
    CHECK_FALSE(ks_two_sample(a, b).pass);
}

TEST_CASE("chi square and binning") {
    const TestResult t = chi_square({10, 20, 30}, {10, 20, 30});
    CHECK(t.statistic == 0.0);
    CHECK(t.p_value == doctest::Approx(1.0));
    // (5^2/50 + 5^2/50) = 1 on one degree of freedom
    const TestResult u = chi_square({45, 55}, {50, 50});
    CHECK(u.statistic == doctest::Approx(1.0));
    CHECK(u.p_value == doctest::Approx(0.3173105).epsilon(1e-6));

    std::vector<double> o{9, 11, 2, 2}, e{10, 10, 3, 1};
    pool_bins(o, e);
    CHECK(e == std::vector<double>{10, 14});
    CHECK(o == std::vector<double>{9, 15});
}

TEST_CASE("binomial test and mean interval") {
    CHECK(binomial_test(5, 10, 0.5).p_value == doctest::Approx(1.0));
    CHECK(binomial_test(0, 10, 0.5).p_value == doctest::Approx(2.0 / 1024.0));
    CHECK_FALSE(binomial_test(0, 10, 0.5, 0.01).pass);

    const MeanCI ci = mean_ci({1, 2, 3, 4, 5});
    CHECK(ci.mean == 3.0);
    CHECK(ci.stderr_ == doctest::Approx(std::sqrt(2.5 / 5.0)));
    CHECK(ci.half_width == doctest::Approx(1.959964 * std::sqrt(0.5)).epsilon(1e-6));
    CHECK(mean_ci({7.0}).half_width == 0.0);
    CHECK_THROWS_AS(mean_ci({}), ParameterRange);
}

TEST_CASE("replica runner") {
    auto f = [](size_t i, RngStream& rng) { return double(i) + rng.uniform(); };
    const auto a = run_replicas<double>(64, 9, f, true);
    const auto b = run_replicas<double>(64, 9, f, false);
    CHECK(a == b);
    CHECK(run_replicas<double>(64, 10, f, true) != a);
    CHECK_THROWS_AS(run_replicas<double>(
                        8, 1,
                        [](size_t i, RngStream&) -> double {
                            if (i == 5) throw CapExceeded("boom");
                            return 0.0;
                        },
                        true),
                    CapExceeded);
}

TEST_CASE("experiment bundles are deterministic") {
    ExperimentSpec s;
    s.id = "branch";
    s.params = {{"t", "0.6"}, {"level", "1000"}};
    s.replicas = 40;
    s.seed = 77;
    const std::string a = run_experiment(s);
    CHECK(run_experiment(s) == a);
    s.parallel = false;
    CHECK(run_experiment(s) == a);
    const auto j = nlohmann::json::parse(a);
    CHECK(j["values"].size() == 40);
    CHECK(j["stderr"].is_number());

    s.replicas = 1;
    CHECK(nlohmann::json::parse(run_experiment(s))["stderr"].is_null());
    s.replicas = 0;
    CHECK_THROWS_AS(run_experiment(s), ParameterRange);
    s.replicas = 1;
    s.id = "nope";
    CHECK_THROWS_AS(run_experiment(s), ParameterRange);
    s.id = "tau";
    s.params = {{"rho1", "x"}};
    CHECK_THROWS_AS(run_experiment(s), ParameterRange);
    CHECK(experiment_ids().size() >= 5);
}
