#include "doctest.h"

#include <cmath>
#include <vector>

#include "fpp/errors.hpp"
#include "fpp/multiline.hpp"
#include "fpp/rng.hpp"
#include "fpp/stats.hpp"

using namespace fpp;

namespace {

Window draw(const WeightLaw& law, size_t n, uint64_t seed, bool round = false) {
    RngStream rng(seed);
    Window w{std::vector<double>(n)};
    for (auto& v : w.values) {
        v = law.sample(rng);
        if (round) v = std::ldexp(std::round(std::ldexp(v, 20)), -20);
    }
    return w;
}

// pmf of the A update of one site: (Y - W)^+ plus an independent copy of Y ^ W,
// for integer laws truncated at kmax.
std::vector<double> a_update_pmf(const WeightLaw& y, const WeightLaw& w, int kmax) {
    std::vector<double> pos(kmax + 1, 0.0), mn(kmax + 1, 0.0);
    for (int i = 0; i <= kmax; ++i)
        for (int j = 0; j <= kmax; ++j) {
            const double pr = y.pmf(i) * w.pmf(j);
            pos[std::max(i - j, 0)] += pr;
            mn[std::min(i, j)] += pr;
        }
    std::vector<double> out(kmax + 1, 0.0);
    for (int i = 0; i <= kmax; ++i)
        for (int j = 0; i + j <= kmax; ++j) out[i + j] += pos[i] * mn[j];
    return out;
}

double max_pmf_gap(const WeightLaw& law, const std::vector<double>& pmf, int upto) {
    double g = 0.0;
    for (int k = 0; k <= upto; ++k) g = std::max(g, std::abs(law.pmf(k) - pmf[size_t(k)]));
    return g;
}

}  // namespace

TEST_CASE("invariant marginal table, exponential weights") {
    const WeightLaw e1 = WeightLaw::exponential(1.0);
    for (double rho : {0.5, 1.0, 3.0}) {
        CHECK(invariant_marginal(MapKind::H, e1, rho) == WeightLaw::exponential(1.0 + rho));
        CHECK(invariant_marginal(MapKind::V, e1, rho) == WeightLaw::ber_exp(1.0 / (1.0 + rho), rho));
        CHECK(invariant_marginal(MapKind::A, e1, rho) == WeightLaw::exponential(rho));
    }
    const WeightLaw be = WeightLaw::ber_exp(0.5, 2.0);
    CHECK(invariant_marginal(MapKind::A, be, 1.0) == WeightLaw::ber_exp(2.0 / 2.5, 1.0));
    CHECK(invariant_marginal(MapKind::H, be, 0.0) == be);
    CHECK_THROWS_AS(invariant_marginal(MapKind::V, e1, 0.0), ParameterRange);
    CHECK_THROWS_AS(invariant_marginal(MapKind::H, WeightLaw::bernoulli(0.5), 1.0), ParameterRange);
}

TEST_CASE("discrete A rows: tabulated entries against the invariant law") {
    const WeightLaw ber = WeightLaw::bernoulli(0.4);
    const double c = 0.3;
    CHECK(tabulated_marginal(MapKind::A, ber, c) == WeightLaw::ber_geom_plus(1.0 - c + c * 0.4, c));
    CHECK(tabulated_marginal(MapKind::V, ber, c) == invariant_marginal(MapKind::V, ber, c));

    // one A step maps the invariant law to itself; the tabulated law moves
    const int K = 200;
    const WeightLaw inv = invariant_marginal(MapKind::A, ber, c);
    CHECK(max_pmf_gap(inv, a_update_pmf(inv, ber, K), 60) < 1e-13);
    const WeightLaw tab = tabulated_marginal(MapKind::A, ber, c);
    CHECK(max_pmf_gap(tab, a_update_pmf(tab, ber, K), 60) > 1e-3);

    const WeightLaw bg = WeightLaw::ber_geom_plus(0.6, 0.5);
    for (double cc : {0.2, 0.5, 0.8}) {
        const WeightLaw l = invariant_marginal(MapKind::A, bg, cc);
        CHECK(max_pmf_gap(l, a_update_pmf(l, bg, K), 60) < 1e-12);
        const WeightLaw t = tabulated_marginal(MapKind::A, bg, cc);
        CHECK(max_pmf_gap(t, a_update_pmf(t, bg, K), 60) > 1e-3);
    }
    // at p = 1 the two coincide
    CHECK(tabulated_marginal(MapKind::A, WeightLaw::bernoulli(1.0), c) ==
          invariant_marginal(MapKind::A, WeightLaw::bernoulli(1.0), c));
}

TEST_CASE("param_for_mean inverts the mean") {
    const WeightLaw be = WeightLaw::ber_exp(0.5, 1.0);
    const WeightLaw bg = WeightLaw::ber_geom_plus(0.5, 0.4);
    for (MapKind k : {MapKind::H, MapKind::V, MapKind::A}) {
        for (double frac : {0.1, 0.5, 0.9}) {
            const double m = k == MapKind::H ? frac * be.mean() : 3.0 * frac;
            const double par = param_for_mean(k, be, m);
            CHECK(invariant_marginal(k, be, par).mean() == doctest::Approx(m).epsilon(1e-10));
            const double m2 = k == MapKind::H ? frac * bg.mean() : 3.0 * frac;
            const double c = param_for_mean(k, bg, m2);
            CHECK(invariant_marginal(k, bg, c).mean() == doctest::Approx(m2).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(param_for_mean(MapKind::H, be, be.mean()), ParameterRange);
    CHECK(std::isinf(max_invariant_mean(MapKind::V, be)));
}

TEST_CASE("H equals shifted R") {
    for (uint64_t s = 0; s < 20; ++s) {
        const Window I = draw(WeightLaw::exponential(1.5), 2000, 10 + s);
        const Window W = draw(WeightLaw::exponential(1.0), 2000, 50 + s);
        CHECK(h_equals_r_residual(I, W) == 0.0);
    }
}

TEST_CASE("intertwining residuals vanish") {
    size_t ca = 0, cv = 0;
    for (uint64_t s = 0; s < 40; ++s) {
        const size_t n = 1500;
        const Window Y1 = draw(WeightLaw::exponential(1.0), n, 100 + s, true);
        const Window Y2 = draw(WeightLaw::exponential(1.0), n, 200 + s, true);
        const Window Y3 = draw(WeightLaw::exponential(2.0), n, 300 + s, true);
        const Residual a = intertwine_residual_a(Y1, Y2, Y3, 1);
        CHECK(a.max_abs == 0.0);
        ca += a.compared;
        const Window X1 = draw(WeightLaw::bernoulli(0.5), n, 400 + s);
        const Window X2 = draw(WeightLaw::geom0(0.4), n, 500 + s);
        const Window X3 = draw(WeightLaw::geom0(0.6), n, 600 + s);
        const Residual v = intertwine_residual_v(X1, X2, X3, 0);
        CHECK(v.max_abs == 0.0);
        cv += v.compared;
    }
    CHECK(ca > 40 * 1500 / 2);
    CHECK(cv > 40 * 1500 / 2);
}

TEST_CASE("multiline construction") {
    const WeightLaw be = WeightLaw::ber_exp(0.5, 1.0);
    const MultiLineSample one = sample_multiline(MeanVector{MapKind::H, {0.3}}, be, 500, 3, 50);
    REQUIRE(one.lines.size() == 1);
    CHECK(one.lines[0].window.values == one.inputs[0].values);
    CHECK(one.lo == 0);
    CHECK(one.hi == 500);

    // H lines are ordered and each is H of its input and the previous line
    const MultiLineSample s = sample_multiline(MeanVector{MapKind::H, {0.4, 0.3, 0.1}}, be, 4000, 4, 200);
    REQUIRE(s.lines.size() == 3);
    const auto again = multiline_from_inputs(MapKind::H, s.inputs, 200);
    for (size_t l = 0; l < 3; ++l) CHECK(again[l].window.values == s.lines[l].window.values);
    for (size_t l = 1; l < 3; ++l) {
        const MaskedWindow h = h_map(s.inputs[l], s.lines[l - 1].window);
        CHECK(h.window.values == s.lines[l].window.values);
        for (size_t k = 0; k < 200; ++k) CHECK_FALSE(s.lines[l].valid[k]);
    }
    const auto upd = update_lines(MapKind::H, s.lines, draw(be, 4000, 5));
    size_t pairs = 0;
    for (size_t k = s.lo; k < s.hi; ++k)
        for (size_t l = 0; l + 1 < upd.size(); ++l)
            if (upd[l].valid[k] && upd[l + 1].valid[k]) {
                CHECK(upd[l][k] >= upd[l + 1][k]);
                ++pairs;
            }
    CHECK(pairs > 3000);

    // A lines are masked at the right edge
    const MultiLineSample a = sample_multiline(MeanVector{MapKind::A, {2.0, 1.0}}, be, 1000, 6, 100);
    CHECK(a.hi == 900);
    CHECK_FALSE(a.lines[1].valid[999]);
    CHECK(a.lines[1].valid[0]);

    CHECK_THROWS_AS(sample_multiline(MeanVector{MapKind::H, {0.3, 0.4}}, be, 500, 3, 50), ParameterRange);
    CHECK_THROWS_AS(sample_multiline(MeanVector{MapKind::H, {0.6}}, be, 500, 3, 50), ParameterRange);
}

TEST_CASE("queue recursions") {
    const Window I = draw(WeightLaw::exponential(1.0), 300, 7);
    const LppOutput z = lpp_d(I, Window{std::vector<double>(300, 0.0)});
    CHECK(z.out.window.values == I.values);
    for (double j : z.J) CHECK(j == 0.0);

    // Burke: departures of a stable exponential queue are Exp(arrival rate)
    const size_t n = 60000, burn = 2000;
    const Window A = draw(WeightLaw::exponential(1.0), n, 8);
    const Window S = draw(WeightLaw::exponential(2.0), n, 9);
    const LppOutput d = lpp_d(A, S);
    std::vector<double> out;
    for (size_t k = burn; k < n; ++k) out.push_back(d.out[k]);
    CHECK(ks_law(out, WeightLaw::exponential(1.0)).pass);

    const Window rev = lpp_d_reversed(A, S);
    CHECK(rev[n - 1] == S[n - 1] + A[n - 1]);
    CHECK_THROWS_AS(lpp_d(A, S, -1.0), ParameterRange);
}
