#include "doctest.h"

#include <cmath>
#include <vector>

#include "fpp/environment.hpp"
#include "fpp/errors.hpp"
#include "fpp/particles.hpp"
#include "fpp/stores.hpp"

using namespace fpp;

namespace {

ParticleConfig config(std::vector<double> eta, double front = INFINITY) {
    ParticleConfig c;
    c.eta = std::move(eta);
    c.front = front;
    return c;
}

}  // namespace

TEST_CASE("parallel and sequential steps") {
    const ParticleConfig c = config({0, 1, 3});
    const Window W{{2, 1, 5}};
    CHECK(parallel_step(c, W).eta == std::vector<double>{1, 2, 8});
    CHECK(sequential_step(c, W).eta == std::vector<double>{2, 2, 8});
    CHECK(parallel_step(c, Window{{0, 0, 0}}).eta == c.eta);
    // a blocked front particle holds the whole jam in place
    const ParticleConfig jam = config({4, 4, 4}, 4);
    CHECK(parallel_step(jam, Window{{9, 9, 9}}).eta == jam.eta);
    CHECK(sequential_step(jam, Window{{9, 9, 9}}).eta == jam.eta);
    CHECK_THROWS_AS(parallel_step(c, Window{{1, 1}}), MisalignedWindows);
}

TEST_CASE("openmp step equals the serial step") {
    RngStream rng(2);
    ParticleConfig c;
    double x = 0.0;
    for (int i = 0; i < 10000; ++i) {
        x += WeightLaw::geom0(0.3).sample(rng);
        c.eta.push_back(x);
    }
    Window W{std::vector<double>(c.eta.size())};
    for (int t = 0; t < 20; ++t) {
        for (auto& w : W.values) w = WeightLaw::bernoulli(0.6).sample(rng);
        const ParticleConfig a = parallel_step(c, W);
        CHECK(parallel_step_omp(c, W).eta == a.eta);
        CHECK(a.ordered());
        c = a;
    }
}

TEST_CASE("sequential gaps follow the V map") {
    RngStream rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const size_t n = 200;
        Window X{std::vector<double>(n)}, W{std::vector<double>(n)};
        for (size_t k = 0; k < n; ++k) {
            X[k] = WeightLaw::geom0(0.4).sample(rng);
            W[k] = WeightLaw::bernoulli(0.5).sample(rng) * double(1 + rng.next_u64() % 3);
        }
        // particles 0..n with gaps X; the last one does not move
        ParticleConfig c;
        c.eta.push_back(0.0);
        for (size_t k = 0; k < n; ++k) c.eta.push_back(c.eta.back() + X[k]);
        Window Wp = W;
        Wp.values.push_back(0.0);
        const ParticleConfig s = sequential_step(c, Wp);
        const MaskedWindow v = v_map(X, W);
        size_t checked = 0;
        for (size_t k = 0; k < n; ++k)
            if (v.valid[k]) {
                CHECK(s.eta[k + 1] - s.eta[k] == v[k]);
                ++checked;
            }
        CHECK(checked > 0);
    }
}

TEST_CASE("particle positions are passage times") {
    for (const WeightLaw& law : {WeightLaw::exponential(1.0), WeightLaw::zero(), WeightLaw::bernoulli(0.5),
                                 WeightLaw::ber_exp(0.3, 2.0)}) {
        const Environment e = generate_environment(ModelKind::swfpp(), law, 22, 21, 5);
        CHECK(passage_identity_residual(e, 20, 20) == 0.0);
    }
    const Environment small = generate_environment(ModelKind::swfpp(), WeightLaw::exponential(1.0), 5, 5, 5);
    CHECK_THROWS_AS(passage_identity_residual(small, 20, 20), InsufficientWindow);
    const Environment other = generate_environment(ModelKind::sjr(0.5), WeightLaw::exponential(1.0), 30, 30, 5);
    CHECK_THROWS_AS(passage_identity_residual(other, 10, 10), ParameterRange);
}

TEST_CASE("trajectories") {
    const ParticleConfig init = config({0, 2, 5, 9});
    const auto t0 = run(StepKind::Parallel, init, 0, WeightLaw::exponential(1.0), 1);
    REQUIRE(t0.size() == 1);
    CHECK(t0[0].eta == init.eta);

    const auto a = run(StepKind::Sequential, init, 50, WeightLaw::exponential(1.0), 1);
    const auto b = run(StepKind::Sequential, init, 50, WeightLaw::exponential(1.0), 1);
    REQUIRE(a.size() == 51);
    for (size_t t = 0; t < a.size(); ++t) {
        CHECK(a[t].eta == b[t].eta);
        CHECK(a[t].ordered());
        if (t > 0)
            for (size_t k = 0; k < init.eta.size(); ++k) CHECK(a[t].eta[k] >= a[t - 1].eta[k]);
    }
    // the sequential rule moves at least as far as the parallel one with the same jumps
    const auto p = run(StepKind::Parallel, init, 1, WeightLaw::exponential(1.0), 1);
    for (size_t k = 0; k < init.eta.size(); ++k) CHECK(a[1].eta[k] >= p[1].eta[k]);
    CHECK_THROWS_AS(run(StepKind::Parallel, init, -1, WeightLaw::exponential(1.0), 1), ParameterRange);
}

TEST_CASE("occupation and gaps") {
    const std::vector<double> g{0, 2, 1, 0, 3};
    const auto occ = occupation_from_gaps(g);
    CHECK(occ == std::vector<uint8_t>{1, 1, 0, 0, 1, 0, 1, 1, 0, 0, 0, 1});
    CHECK(gaps_from_occupation(occ) == g);
    CHECK_THROWS_AS(occupation_from_gaps({1.5}), ParameterRange);
}

TEST_CASE("multiclass gap lines keep their laws") {
    const MulticlassReport r =
        multiclass_invariance_experiment({3.0, 1.5}, WeightLaw::bernoulli(0.5), 20000, 10, 8);
    REQUIRE(r.classes.size() == 2);
    CHECK(r.ordered);
    CHECK(r.compared > 0);
    for (const auto& c : r.classes) {
        CHECK(c.law_before.pass);
        CHECK(c.law_after.pass);
    }
}
