#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fpp/asymptotics.hpp"
#include "fpp/errors.hpp"
#include "fpp/stats.hpp"

using namespace fpp;

namespace {

constexpr double pi = std::numbers::pi;

std::complex<double> f_tilde(double beta, std::complex<double> z) {
    const auto a = std::sqrt(1.0 - beta * z), b = std::sqrt(1.0 - z);
    return (a - b) / (a + b);
}

// Taylor coefficient by the trapezoid rule on |z| = 0.9
double coefficient(double beta, int k) {
    const int M = 4096;
    const double r = 0.9;
    std::complex<double> s = 0.0;
    for (int j = 0; j < M; ++j) {
        const double th = 2.0 * pi * j / M;
        s += f_tilde(beta, std::polar(r, th)) * std::polar(1.0, -k * th);
    }
    return s.real() / M / std::pow(r, k);
}

}  // namespace

TEST_CASE("step probabilities at equal rates") {
    const WalkParams w = step_probabilities(1.0);
    CHECK(w.q1 == doctest::Approx(0.5));
    CHECK(w.beta == doctest::Approx(0.25));
    CHECK(w.p_flat == doctest::Approx(0.25));
    CHECK(w.p_up == doctest::Approx(3.0 / 8.0));
    CHECK(w.p_down == doctest::Approx(3.0 / 8.0));
    CHECK(w.q_up == doctest::Approx(0.6));
    CHECK(w.p_down_down == doctest::Approx(2.0 / 3.0));
    CHECK(w.p_up + w.p_flat + w.p_down == doctest::Approx(1.0));
    const WalkParams w2 = step_probabilities(2.0);
    CHECK(w2.beta == doctest::Approx(4.0 / 9.0));

    // empirical step frequencies
    RngStream rng(1);
    uint64_t up = 0, flat = 0;
    const uint64_t n = 200000;
    for (uint64_t i = 0; i < n; ++i) {
        const WalkStep s = walk_step(w, rng);
        up += s.dx > 0.0;
        flat += s.dx == 0.0;
    }
    CHECK(binomial_test(up, n, 3.0 / 8.0).pass);
    CHECK(binomial_test(flat, n, 0.25).pass);
}

TEST_CASE("sigma generating function") {
    const auto p = sigma_series(0.25, 4000);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == doctest::Approx(3.0 / 16.0));
    for (int k = 1; k < 30; ++k) CHECK(p[size_t(k)] == doctest::Approx(coefficient(0.25, k)).epsilon(1e-9));
    double s = 0.0;
    for (double v : p) s += v;
    // the remainder beyond K is about 2 C / sqrt(K)
    CHECK(std::abs(1.0 - s - 2.0 * sigma_tail_constant(0.25) / std::sqrt(4000.0)) < 2e-3);
    CHECK(sigma_tail_constant(0.25) == doctest::Approx(1.0 / std::sqrt(pi * 0.75)));
    CHECK(sigma_tail_constant(0.25) == doctest::Approx(0.6515).epsilon(1e-4));
    CHECK(p[4000] * std::pow(4000.0, 1.5) == doctest::Approx(0.6515).epsilon(5e-3));
    CHECK(std::abs(sigma_cf(0.25, 0.0) - 1.0) < 1e-12);
    const auto z = sigma_cf(0.25, 0.7);
    CHECK(std::abs(z - f_tilde(0.25, std::polar(1.0, 0.7))) < 1e-12);
}

TEST_CASE("sampled sigma follows the series") {
    const WalkParams w = step_probabilities(1.0);
    const auto p = sigma_series(w.beta, 10);
    RngStream rng(2);
    const uint64_t n = 100000;
    std::vector<uint64_t> hits(4, 0);
    for (uint64_t i = 0; i < n; ++i) {
        const StopTime s = sample_sigma_censored(w, rng, SigmaReading::GeneratingFunction, 1000);
        CHECK((s.censored || s.value >= 1));
        if (!s.censored && s.value < 4) ++hits[s.value];
    }
    for (int k = 1; k < 4; ++k) CHECK(binomial_test(hits[size_t(k)], n, p[size_t(k)]).pass);
}

TEST_CASE("renewal constants") {
    for (double L : {0.5, 1.0, 3.0}) CHECK(erickson_limit(0.5, L) == doctest::Approx(2.0 / (L * pi)));
    CHECK(erickson_limit(0.3, 2.0) == doctest::Approx(0.5 * erickson_limit(0.3, 1.0)));
    for (double rho : {0.5, 1.0, 2.0}) {
        const WalkParams w = step_probabilities(rho);
        CHECK(erickson_limit(0.5, sigma_literal_tail_L(w)) == doctest::Approx(sigma_renewal_constant(w)));
    }

    // P(sigma > x) ~ L / sqrt(x) for the literal reading
    const WalkParams w = step_probabilities(1.0);
    RngStream rng(3);
    const uint64_t n = 40000, x = 400;
    uint64_t over = 0;
    for (uint64_t i = 0; i < n; ++i) over += sample_sigma_censored(w, rng, SigmaReading::Literal, x).censored;
    const double est = double(over) / n * std::sqrt(double(x));
    CHECK(est == doctest::Approx(sigma_literal_tail_L(w)).epsilon(0.15));

    RngStream r2(4);
    const RenewalSet rs = sigma_renewals(w, 1000, r2, SigmaReading::Literal);
    CHECK(rs.points.front() == 0);
    for (size_t i = 1; i < rs.points.size(); ++i) CHECK(rs.points[i] > rs.points[i - 1]);
    CHECK(rs.points.back() <= 1000);
}

TEST_CASE("tau") {
    const WalkParams w = step_probabilities(1.0);
    RngStream rng(5);
    const uint64_t n = 100000;
    uint64_t ones = 0, pure = 0;
    for (uint64_t i = 0; i < n; ++i) {
        const TauDraw t = sample_tau_censored(w, rng, 1000);
        if (!t.time.censored && t.time.value == 1) {
            ++ones;
            pure += t.pure_down;
        }
    }
    // tau = 1 exactly when the first step is down
    CHECK(binomial_test(ones, n, w.p_down).pass);
    CHECK(binomial_test(pure, ones, w.p_down_down).pass);

    RngStream a(6), b(6);
    for (int i = 0; i < 100; ++i) CHECK(sample_walk_tau(w, a) == sample_walk_tau(w, b));
    RngStream c(7);
    CHECK_THROWS_AS(
        {
            for (int i = 0; i < 1000; ++i) sample_walk_tau(w, c, 1);
        },
        CapExceeded);
}

TEST_CASE("convoy constants and samples") {
    const ConvoyCandidates c = convoy_constant_candidates(1.0);
    CHECK(c.long_form == doctest::Approx(0.7329).epsilon(1e-4));
    CHECK(c.simplified_form == doctest::Approx(0.5984).epsilon(1e-4));
    CHECK(c.thinned_form == doctest::Approx(0.3257).epsilon(1e-4));
    CHECK(c.simplified_form == doctest::Approx(3.0 / (2.0 * std::sqrt(2.0 * pi))));

    RngStream rng(8);
    const RenewalSet r = convoy_sample(1.0, 5000, rng);
    REQUIRE_FALSE(r.points.empty());
    CHECK(r.points.front() == 0);
    for (size_t i = 1; i < r.points.size(); ++i) CHECK(r.points[i] > r.points[i - 1]);
    CHECK(r.points.back() <= 5000);

    RngStream g1(9), g2(9);
    const WalkParams w = step_probabilities(1.0, 2.0);
    const auto a = convoy_gaps(w, 200, g1);
    CHECK(a == convoy_gaps(w, 200, g2));
    for (uint64_t g : a) CHECK(g >= 1);
}

TEST_CASE("branch process") {
    RngStream rng(10);
    const JumpTrajectory tr = branch_process_sample(0.999, 1000, rng);
    REQUIRE(tr.d.size() == tr.b.size());
    CHECK(tr.d[0] == 0.0);
    CHECK(tr.b[0] == 0);
    CHECK(tr.value_at(0.0) == 0);
    for (size_t k = 1; k < tr.b.size(); ++k) {
        CHECK(tr.b[k] > tr.b[k - 1]);
        CHECK(tr.d[k] > tr.d[k - 1]);
        CHECK(tr.s[k] == doctest::Approx(1.0 - tr.d[k]));
    }

    JumpTrajectory t;
    t.d = {0.0, 0.2, 0.5, 0.9};
    t.s = {1.0, 0.8, 0.5, 0.1};
    t.b = {0, 1, 3, 7};
    CHECK(branch_count(t, 1) == 1);
    CHECK(branch_count(t, 4) == 3);
    CHECK(branch_count(t, 100) == 4);
    CHECK(t.value_at(0.6) == 3);

    // inverse of the jump-time law
    for (double u : {0.1, 0.5, 0.9})
        for (int64_t b : {0, 1, 5}) {
            const double s = branch_next_s(0.7, b, u);
            CHECK(std::pow(1.0 - s, double(b)) * (1.0 - s / 0.7) == doctest::Approx(u).epsilon(1e-9));
        }

    // marginals of the sampler as described: P(b(t)=0) = 1-t, P(b(t)=1) = t - t^2/2 - t^3/2
    const double tt = 0.5;
    const uint64_t n = 50000;
    uint64_t zero = 0, one = 0;
    RngStream r2(11);
    for (uint64_t i = 0; i < n; ++i) {
        const int64_t v = branch_process_sample(tt, 100, r2).value_at(tt);
        zero += v == 0;
        one += v == 1;
    }
    CHECK(binomial_test(zero, n, 1.0 - tt).pass);
    CHECK(binomial_test(one, n, tt - tt * tt / 2 - tt * tt * tt / 2).pass);
}

TEST_CASE("busemann columns and critical levels") {
    const Environment env = generate_environment(ModelKind::swfpp(), WeightLaw::exponential(1.0), 30, 200, 12);
    const BusemannColumns bc = busemann_columns(env, {0.5, 1.0, 2.0}, 13, 100);
    REQUIRE(bc.columns.size() == 3);
    for (const auto& cols : bc.columns) CHECK(cols.size() == 30);
    const auto path = busemann_geodesic(bc, 1);
    REQUIRE_FALSE(path.empty());
    CHECK(path.front() == Vertex{0, 0});
    for (size_t i = 1; i < path.size(); ++i) {
        const int dx = path[i].x - path[i - 1].x, dy = path[i].y - path[i - 1].y;
        CHECK(dx + dy == 1);
        CHECK(dx >= 0);
        CHECK(dy >= 0);
    }
    CHECK(busemann_origin_zero(1.0, 20, 64, 14) == busemann_origin_zero(1.0, 20, 64, 14));

    const auto lv = critical_angle_levels({0.5, 1.0, 2.0}, 2000, 500, 15);
    for (int l : lv) {
        CHECK(l >= 0);
        CHECK(l <= 3);
    }
    const AdjacentOrdering o = adjacent_ordering({2, 1, 1, 3});
    CHECK(o.pairs == 3);
    CHECK(o.greater == doctest::Approx(1.0 / 3.0));
    CHECK(o.equal == doctest::Approx(1.0 / 3.0));
    CHECK(o.less == doctest::Approx(1.0 / 3.0));
}
