#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "fpp/environment.hpp"
#include "fpp/errors.hpp"
#include "fpp/laws.hpp"
#include "fpp/rng.hpp"
#include "fpp/stats.hpp"

using namespace fpp;

TEST_CASE("philox known answers") {
    // Random123 kat_vectors for philox4x32_10
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::block(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::block(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(5, 1), b(5, 1), c(5, 2);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
    RngStream d(5, 1);
    int same = 0;
    for (int i = 0; i < 10; ++i) same += d() == c();
    CHECK(same == 0);
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("law sampling basics") {
    RngStream rng(1);
    CHECK(WeightLaw::bernoulli(1.0).sample(rng) == 1.0);
    CHECK(WeightLaw::zero().sample(rng) == 0.0);

    const WeightLaw l = WeightLaw::ber_exp(0.5, 2.0);
    const int n = 1000000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += l.sample(rng);
    const double sd = std::sqrt(l.variance() / n);
    CHECK(l.mean() == doctest::Approx(0.25));
    CHECK(std::abs(s / n - 0.25) < 3.0 * sd);
}

TEST_CASE("cdf and pmf") {
    CHECK(WeightLaw::ber_exp(0.3, 2.0).cdf(0.0) == doctest::Approx(0.7));
    CHECK(WeightLaw::exponential(1.0).cdf(-1.0) == 0.0);
    CHECK(WeightLaw::geom0(0.4).cdf(-1.0) == 0.0);
    for (int k = 0; k < 6; ++k) {
        CHECK(WeightLaw::geom0(0.4).cdf(k) == doctest::Approx(1.0 - std::pow(0.6, k + 1)));
        CHECK(WeightLaw::geom0(0.4).pmf(k) == doctest::Approx(0.4 * std::pow(0.6, k)));
    }
    const WeightLaw bg = WeightLaw::ber_geom_plus(0.7, 0.25);
    CHECK(bg.pmf(0) == doctest::Approx(0.3));
    CHECK(bg.pmf(3) == doctest::Approx(0.7 * 0.25 * 0.75 * 0.75));
    CHECK(bg.mean() == doctest::Approx(0.7 / 0.25));
    double tot = 0;
    for (int k = 0; k < 400; ++k) tot += bg.pmf(k);
    CHECK(tot == doctest::Approx(1.0));
}

TEST_CASE("law parsing round trip") {
    for (const char* t : {"exp:1", "berexp:0.5,2", "ber:0.3", "bergeom:0.5,0.25", "geom0:0.4", "zero"}) {
        const WeightLaw l = WeightLaw::parse(t);
        CHECK(WeightLaw::parse(l.to_string()) == l);
    }
    CHECK_THROWS_AS(WeightLaw::parse("ber:1.5"), Error);
    CHECK_THROWS(WeightLaw::parse("cauchy:1"));
}

TEST_CASE("swfpp environment has free vertical edges") {
    const Environment e = generate_environment(ModelKind::swfpp(), WeightLaw::exponential(1.0), 4, 4, 11);
    int pos = 0;
    for (size_t i = 0; i < e.w1.size(); ++i) {
        CHECK(e.w2[i] == 0.0);
        pos += e.w1[i] > 0.0;
    }
    CHECK(pos == 16);
}

TEST_CASE("sjr environment has exactly one nonzero incoming weight") {
    const Environment e = generate_environment(ModelKind::sjr(0.5), WeightLaw::exponential(1.0), 30, 30, 3);
    for (size_t i = 0; i < e.w1.size(); ++i) {
        CHECK(e.w1[i] >= 0.0);
        CHECK(e.w2[i] >= 0.0);
        CHECK(((e.w1[i] == 0.0) != (e.w2[i] == 0.0)));
    }
}

TEST_CASE("environment determinism and sub-grid consistency") {
    const auto law = WeightLaw::exponential(1.0);
    const Environment a = generate_environment(ModelKind::general(WeightLaw::ber_exp(0.5, 1.0)), law, 40, 30, 9);
    const Environment b = generate_environment(ModelKind::general(WeightLaw::ber_exp(0.5, 1.0)), law, 40, 30, 9);
    CHECK(a.w1 == b.w1);
    CHECK(a.w2 == b.w2);
    const Environment s = generate_environment_serial(ModelKind::general(WeightLaw::ber_exp(0.5, 1.0)), law, 40, 30, 9);
    CHECK(a.w1 == s.w1);
    CHECK(a.w2 == s.w2);
    const Environment small = generate_environment(ModelKind::general(WeightLaw::ber_exp(0.5, 1.0)), law, 7, 5, 9);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x) {
            CHECK(small.h(x, y) == a.h(x, y));
            CHECK(small.v(x, y) == a.v(x, y));
        }
}

TEST_CASE("environment serialization") {
    const Environment e = generate_environment(ModelKind::sjr(0.3), WeightLaw::ber_exp(0.5, 2.0), 9, 6, 21);
    std::stringstream ss;
    write_environment(ss, e);
    const Environment r = read_environment(ss);
    CHECK(r.width == 9);
    CHECK(r.height == 6);
    CHECK(r.w1 == e.w1);
    CHECK(r.w2 == e.w2);
    CHECK(r.model.tag == ModelTag::SJR);
    CHECK(r.model.alpha_s == 0.3);
    CHECK(r.law == e.law);
    const Environment j = environment_from_json(environment_to_json(e));
    CHECK(j.w1 == e.w1);
    CHECK(j.w2 == e.w2);
    std::stringstream bad("not an environment");
    CHECK_THROWS_AS(read_environment(bad), FormatError);
}

TEST_CASE("compatible family solver") {
    const WeightLaw anchor = WeightLaw::ber_exp(0.5, 1.0);
    const WeightLaw l = solve_compatible(CompatibleFamily::H, anchor, 0.25);
    CHECK(l.p == doctest::Approx(0.39040).epsilon(1e-4));
    CHECK(l.rate == doctest::Approx(1.5616).epsilon(1e-4));
    CHECK(std::abs(l.mean() - 0.25) < 1e-12);
    // the H-row family: q = a p / (a + (1-p) r), rate a + r
    const double r = l.rate - anchor.rate;
    CHECK(std::abs(l.p - anchor.rate * anchor.p / (anchor.rate + (1 - anchor.p) * r)) < 1e-12);

    const WeightLaw e = solve_compatible(CompatibleFamily::H, WeightLaw::exponential(1.0), 0.4);
    CHECK(e.p == 1.0);
    CHECK(e.rate == doctest::Approx(2.5));
    CHECK_THROWS_AS(solve_compatible(CompatibleFamily::H, anchor, 0.5), ParameterRange);
}

TEST_CASE("direction of rho") {
    auto d1 = rho_to_direction(1.0);
    CHECK(d1.first == doctest::Approx(0.75));
    CHECK(d1.second == doctest::Approx(0.25));
    auto d2 = rho_to_direction(2.0);
    CHECK(d2.first == doctest::Approx(5.0 / 9.0));
    CHECK(d2.second == doctest::Approx(4.0 / 9.0));
    double prev = 0.0;
    for (double rho = 0.1; rho < 1000; rho *= 1.5) {
        auto d = rho_to_direction(rho);
        CHECK(d.first + d.second == doctest::Approx(1.0));
        CHECK(d.second > prev);
        prev = d.second;
        CHECK(direction_to_rho(d.first) == doctest::Approx(rho).epsilon(1e-9));
    }
    CHECK(prev > 0.99);
    CHECK_THROWS_AS(rho_to_direction(0.0), ParameterRange);
}
