#include "doctest.h"

#include <cmath>
#include <functional>

#include "fpp/environment.hpp"
#include "fpp/errors.hpp"
#include "fpp/percolation.hpp"

using namespace fpp;

namespace {

Environment blank(int w, int h) {
    Environment e;
    e.width = w;
    e.height = h;
    e.model = ModelKind::general(WeightLaw::exponential(1.0));
    e.w1.assign(size_t(w) * h, 0.0);
    e.w2.assign(size_t(w) * h, 0.0);
    return e;
}

// all up-right paths from the origin, by recursion
double enumerate_min(const Environment& e, int x, int y) {
    if (x == 0 && y == 0) return 0.0;
    double best = kInf;
    if (x > 0) best = std::min(best, enumerate_min(e, x - 1, y) + e.h(x, y));
    if (y > 0) best = std::min(best, enumerate_min(e, x, y - 1) + e.v(x, y));
    return best;
}

double path_weight(const Environment& e, const std::vector<Vertex>& p) {
    double s = 0.0;
    for (size_t i = 1; i < p.size(); ++i) s += p[i].x > p[i - 1].x ? e.h(p[i].x, p[i].y) : e.v(p[i].x, p[i].y);
    return s;
}

}  // namespace

TEST_CASE("zero weights give a zero field") {
    const Environment e = blank(7, 5);
    const PassageField f = passage_field(e, {0, 0});
    for (double v : f.L) CHECK(v == 0.0);
}

TEST_CASE("vertical axis is free in swfpp") {
    const Environment e = generate_environment(ModelKind::swfpp(), WeightLaw::exponential(1.0), 10, 30, 2);
    const PassageField f = passage_field(e, {0, 0});
    for (int y = 0; y < 30; ++y) CHECK(f.at(0, y) == 0.0);
}

TEST_CASE("dynamic programme equals path enumeration on small grids") {
    int grids = 0;
    for (int w = 1; w <= 7; ++w)
        for (int h = 1; w + h - 2 <= 12; ++h)
            for (const ModelKind& m : {ModelKind::swfpp(), ModelKind::sjr(0.4),
                                       ModelKind::general(WeightLaw::ber_exp(0.5, 2.0))}) {
                const Environment e = generate_environment(m, WeightLaw::exponential(1.0), w, h, 100 + grids);
                const PassageField f = passage_field(e, {0, 0});
                for (int y = 0; y < h; ++y)
                    for (int x = 0; x < w; ++x) CHECK(f.at(x, y) == enumerate_min(e, x, y));
                ++grids;
            }
    CHECK(grids > 50);
}

TEST_CASE("tiled wavefront matches the serial field") {
    const Environment e =
        generate_environment(ModelKind::general(WeightLaw::exponential(2.0)), WeightLaw::exponential(1.0), 301, 257, 5);
    const PassageField s = passage_field(e, {0, 0});
    for (int tile : {1, 7, 64, 128, 1000}) CHECK(passage_field_parallel(e, {0, 0}, tile).L == s.L);
    const PassageField s2 = passage_field(e, {13, 20});
    CHECK(passage_field_parallel(e, {13, 20}, 32).L == s2.L);
    CHECK(std::isinf(s2.at(12, 30)));
}

TEST_CASE("geodesic tie rule and optimality") {
    const Environment z = blank(5, 4);
    const Geodesic g = geodesic(z, passage_field(z, {0, 0}), {4, 3});
    REQUIRE(g.path.size() == 8);
    for (int i = 0; i <= 4; ++i) CHECK(g.path[size_t(i)] == Vertex{i, 0});
    for (int j = 1; j <= 3; ++j) CHECK(g.path[size_t(4 + j)] == Vertex{4, j});

    for (int seed = 0; seed < 20; ++seed) {
        const Environment e = generate_environment(ModelKind::general(WeightLaw::exponential(1.0)),
                                                   WeightLaw::exponential(1.0), 4, 4, uint64_t(seed));
        const PassageField f = passage_field(e, {0, 0});
        const Geodesic p = geodesic(e, f, {3, 3});
        CHECK(p.path.front() == Vertex{0, 0});
        CHECK(p.path.back() == Vertex{3, 3});
        CHECK(path_weight(e, p.path) == doctest::Approx(enumerate_min(e, 3, 3)).epsilon(1e-14));
        CHECK(p.ties == 0);
    }
}

TEST_CASE("swfpp passage times are monotone") {
    const Environment e = generate_environment(ModelKind::swfpp(), WeightLaw::ber_exp(0.6, 1.0), 60, 60, 8);
    const PassageField f = passage_field(e, {0, 0});
    for (int y = 0; y + 1 < 60; ++y)
        for (int x = 0; x + 1 < 60; ++x) {
            CHECK(f.at(x, y + 1) <= f.at(x, y));
            CHECK(f.at(x, y) <= f.at(x + 1, y));
        }
}

TEST_CASE("boundary field agrees with the point-to-point field") {
    const Environment e =
        generate_environment(ModelKind::general(WeightLaw::ber_exp(0.5, 1.0)), WeightLaw::exponential(1.0), 40, 40, 9);
    const PassageField f = passage_field(e, {0, 0});
    // down-right staircase from (0, 39) to (39, 0)
    BoundaryCondition bc;
    int x = 0, y = 39;
    bc.path.push_back({x, y});
    for (int i = 0; x < 39 || y > 0; ++i) {
        if ((i % 3 != 2 && y > 0) || x == 39) --y;
        else ++x;
        bc.path.push_back({x, y});
    }
    for (const Vertex& v : bc.path) bc.g.push_back(f.at(v.x, v.y));
    const PassageField b = boundary_passage_field(e, bc);
    int compared = 0;
    for (int yy = 0; yy < 40; ++yy)
        for (int xx = 0; xx < 40; ++xx)
            if (!std::isinf(b.at(xx, yy))) {
                CHECK(b.at(xx, yy) == f.at(xx, yy));
                ++compared;
            }
    CHECK(compared > 800);
}

TEST_CASE("one step up from a flat horizontal boundary") {
    const Environment e =
        generate_environment(ModelKind::general(WeightLaw::exponential(1.0)), WeightLaw::exponential(1.0), 30, 3, 4);
    const PassageField b = boundary_passage_field(e, BoundaryCondition::horizontal(0, 0, std::vector<double>(29, 0.0)));
    for (int k = 0; k < 30; ++k) {
        double best = kInf;
        for (int l = 0; l <= k; ++l) {
            double s = e.v(l, 1);
            for (int j = l + 1; j <= k; ++j) s += e.h(j, 1);
            best = std::min(best, s);
        }
        CHECK(b.at(k, 1) == doctest::Approx(best).epsilon(1e-14));
    }
}

TEST_CASE("competition interface on constructed and random grids") {
    Environment e = blank(6, 6);
    e.w1[e.index(1, 0)] = 100.0;  // the first step right is expensive
    for (size_t i = 0; i < e.w1.size(); ++i)
        if (i != e.index(1, 0)) e.w1[i] = 0.5;
    const auto r = competition_interface(e);
    CHECK(r[0] == -1);
    for (int n = 1; n < 6; ++n) CHECK(r[size_t(n)] == 5);

    const int n = 40;
    const std::vector<int> thr{1, 5, 20, 60, 150};
    const Environment g = generate_environment(ModelKind::swfpp(), WeightLaw::exponential(1.0), 200, n + 1, 31);
    const auto ri = competition_interface(g);
    const auto hits = competition_thresholds(ModelKind::swfpp(), WeightLaw::exponential(1.0), 31, n, thr);
    for (size_t i = 0; i < thr.size(); ++i) CHECK(bool(hits[i]) == (ri[size_t(n)] >= thr[i]));
    CHECK_THROWS_AS(competition_thresholds(ModelKind::swfpp(), WeightLaw::exponential(1.0), 31, n, {5, 3}),
                    ParameterRange);
}

TEST_CASE("independent replicas differ") {
    const auto a = point_passage_times(ModelKind::swfpp(), WeightLaw::exponential(1.0), 1, {{50, 50}});
    const auto b = point_passage_times(ModelKind::swfpp(), WeightLaw::exponential(1.0), 2, {{50, 50}});
    CHECK(a[0] != b[0]);
}

TEST_CASE("streamed point passage times match the full field") {
    const Environment e = generate_environment(ModelKind::sjr(0.5), WeightLaw::exponential(1.0), 80, 70, 17);
    const PassageField f = passage_field(e, {0, 0});
    const std::vector<Vertex> t{{79, 69}, {10, 60}, {70, 3}, {0, 0}};
    const auto p = point_passage_times(ModelKind::sjr(0.5), WeightLaw::exponential(1.0), 17, t);
    for (size_t i = 0; i < t.size(); ++i) CHECK(p[i] == f.at(t[i].x, t[i].y));
}

TEST_CASE("exponential limit shape") {
    CHECK(limit_shape_exp1(1, 0) == doctest::Approx(1.0));
    CHECK(limit_shape_exp1(1, 1) == doctest::Approx(0.171573).epsilon(1e-5));
    CHECK(limit_shape_exp1(0, 1) == 0.0);
    CHECK(limit_shape_exp1(2, 4) == doctest::Approx(2 * limit_shape_exp1(1, 2)));
    for (auto [s, t] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}, std::pair{1.0, 3.0}}) {
        const auto [gs, gt] = limit_shape_gradient(s, t);
        const double h = 1e-6;
        CHECK(gs == doctest::Approx((limit_shape_exp1(s + h, t) - limit_shape_exp1(s - h, t)) / (2 * h)).epsilon(1e-6));
        CHECK(gt == doctest::Approx((limit_shape_exp1(s, t + h) - limit_shape_exp1(s, t - h)) / (2 * h)).epsilon(1e-6));
    }
}
