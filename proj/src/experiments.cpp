#include "fpp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "fpp/asymptotics.hpp"
#include "fpp/environment.hpp"
#include "fpp/errors.hpp"
#include "fpp/multiline.hpp"
#include "fpp/particles.hpp"
#include "fpp/percolation.hpp"
#include "fpp/stats.hpp"
#include "fpp/stores.hpp"

namespace fpp {

using nlohmann::json;

Budget parse_budget(const std::string& s) {
    if (s == "smoke") return Budget::Smoke;
    if (s == "desk") return Budget::Desk;
    if (s == "full") return Budget::Full;
    throw ParameterRange("unknown budget '" + s + "' (smoke, desk or full)");
}

std::string budget_name(Budget b) {
    switch (b) {
        case Budget::Smoke:
            return "smoke";
        case Budget::Desk:
            return "desk";
        case Budget::Full:
            return "full";
    }
    return "?";
}

double Thresholds::get(int criterion, const std::string& key) const {
    const std::string k = std::to_string(criterion) + "." + key;
    auto it = values.find(k);
    if (it == values.end()) throw FormatError("threshold manifest has no entry '" + k + "'");
    return it->second;
}

size_t Thresholds::count(int criterion, const std::string& key, Budget b, size_t floor) const {
    double v = get(criterion, key);
    if (b == Budget::Smoke) v /= 100.0;
    if (b == Budget::Full) v *= 100.0;
    return std::max(floor, size_t(std::llround(v)));
}

Thresholds load_thresholds(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open threshold manifest " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FormatError("threshold manifest " + path + ": " + e.what());
    }
    Thresholds t;
    t.path = path;
    t.version = j.at("version").get<std::string>();
    for (auto& [cid, body] : j.at("criteria").items())
        for (auto& [k, v] : body.items())
            if (v.is_number()) t.values[cid + "." + k] = v.get<double>();
    return t;
}

bool CriterionReport::pass() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string CriterionReport::summary_line() const {
    std::ostringstream os;
    os << (pass() ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " (";
    size_t failed = 0;
    for (const auto& c : checks) failed += !c.pass;
    os << checks.size() - failed << "/" << checks.size() << " checks";
    for (const auto& c : checks)
        if (!c.pass) os << "; failed " << c.name << " = " << c.value << " " << c.bound;
    os << "; " << std::lround(seconds) << " s)";
    return os.str();
}

std::string criterion_title(int id) {
    static const char* titles[] = {"",
                                   "exact identities",
                                   "distributional invariance of the update maps",
                                   "critical angle law",
                                   "adjacent ordering of competition interfaces",
                                   "renewal means",
                                   "sigma series against Monte Carlo",
                                   "sigma renewal asymptotics",
                                   "convoy density",
                                   "branch process",
                                   "limit shape",
                                   "nested H against D"};
    if (id < 1 || id > kCriteria) throw ParameterRange("criterion must be 1.." + std::to_string(kCriteria));
    return titles[id];
}

namespace {

Check check_le(const std::string& name, double v, double bound) {
    std::ostringstream b;
    b << "<= " << bound;
    return {name, v, b.str(), v <= bound};
}

Check check_ge(const std::string& name, double v, double bound) {
    std::ostringstream b;
    b << ">= " << bound;
    return {name, v, b.str(), v >= bound};
}

Check check_in(const std::string& name, double v, double lo, double hi) {
    std::ostringstream b;
    b << "in [" << lo << ", " << hi << "]";
    return {name, v, b.str(), v >= lo && v <= hi};
}

Check check_true(const std::string& name, bool ok) { return {name, ok ? 1.0 : 0.0, "== 1", ok}; }

json test_json(const TestResult& t) {
    return {{"test", t.name}, {"statistic", t.statistic}, {"p_value", t.p_value}, {"n", t.n}, {"pass", t.pass},
            {"note", t.note}};
}

double dyadic(double v) { return std::ldexp(std::round(std::ldexp(v, 24)), -24); }

Window iid_window(const WeightLaw& law, size_t n, uint64_t seed, bool round = false) {
    RngStream rng(seed);
    Window w{std::vector<double>(n)};
    for (auto& v : w.values) v = round ? dyadic(law.sample(rng)) : law.sample(rng);
    return w;
}

std::vector<double> valid_entries(const MaskedWindow& w, size_t lo, size_t hi) {
    std::vector<double> out;
    hi = std::min(hi, w.size());
    for (size_t k = lo; k < hi; ++k)
        if (w.valid[k]) out.push_back(w[k]);
    return out;
}

// Minimum of sum of weights over all up-right paths from the origin, by
// explicit enumeration; the sum runs along the path as in the recursion.
void enumerate_paths(const Environment& env, int x, int y, double acc, int tx, int ty, double& best) {
    if (x == tx && y == ty) {
        best = std::min(best, acc);
        return;
    }
    if (x < tx) enumerate_paths(env, x + 1, y, acc + env.h(x + 1, y), tx, ty, best);
    if (y < ty) enumerate_paths(env, x, y + 1, acc + env.v(x, y + 1), tx, ty, best);
}

// ---------------------------------------------------------------- 1

CriterionReport criterion1(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    json d;
    const size_t n = th.count(1, "window", Budget::Desk);
    const size_t reps = th.count(1, "windows", b, 2);

    // H(I, W) = shifted R(W, I)
    double hr = 0.0;
    for (size_t i = 0; i < reps; ++i) {
        const Window I = iid_window(WeightLaw::exponential(1.5), n, derive_seed(seed, 100 + i));
        const Window W = iid_window(WeightLaw::exponential(1.0), n, derive_seed(seed, 200 + i));
        hr = std::max(hr, h_equals_r_residual(I, W));
    }
    r.checks.push_back(check_le("h_equals_r_residual", hr, 0.0));

    // A intertwining on exponential inputs; dyadic values make every sum exact
    Residual ra, rv;
    for (size_t i = 0; i < reps; ++i) {
        const Window Y1 = iid_window(WeightLaw::exponential(1.0), n, derive_seed(seed, 300 + i), true);
        const Window Y2 = iid_window(WeightLaw::exponential(1.0), n, derive_seed(seed, 400 + i), true);
        const Window Y3 = iid_window(WeightLaw::exponential(2.0), n, derive_seed(seed, 500 + i), true);
        const Residual x = intertwine_residual_a(Y1, Y2, Y3, 1);
        ra.max_abs = std::max(ra.max_abs, x.max_abs);
        ra.compared += x.compared;
        const Window X1 = iid_window(WeightLaw::bernoulli(0.5), n, derive_seed(seed, 600 + i));
        const Window X2 = iid_window(WeightLaw::geom0(0.4), n, derive_seed(seed, 700 + i));
        const Window X3 = iid_window(WeightLaw::geom0(0.6), n, derive_seed(seed, 800 + i));
        const Residual z = intertwine_residual_v(X1, X2, X3, 1);
        rv.max_abs = std::max(rv.max_abs, z.max_abs);
        rv.compared += z.compared;
    }
    r.checks.push_back(check_le("intertwine_residual_a", ra.max_abs, 0.0));
    r.checks.push_back(check_ge("intertwine_a_compared", double(ra.compared), double(reps * n / 2)));
    r.checks.push_back(check_le("intertwine_residual_v", rv.max_abs, 0.0));
    r.checks.push_back(check_ge("intertwine_v_compared", double(rv.compared), double(reps * n / 2)));
    d["intertwine"] = {{"a_compared", ra.compared}, {"v_compared", rv.compared}};

    // particle positions against passage times
    const int g = int(th.get(1, "grid"));
    double pr = 0.0;
    for (size_t i = 0; i < reps; ++i) {
        const Environment env = generate_environment_serial(ModelKind::swfpp(), WeightLaw::exponential(1.0), g, g,
                                                            derive_seed(seed, 900 + i));
        pr = std::max(pr, passage_identity_residual(env, g - 2, g - 2));
    }
    r.checks.push_back(check_le("passage_identity_residual", pr, 0.0));

    // A-map mass balance and SJR = A on nonnegative input
    const size_t nm = th.count(1, "mass_window", Budget::Desk);
    double mass = 0.0;
    bool bit_identical = true;
    for (size_t i = 0; i < reps; ++i) {
        const Window Y = iid_window(WeightLaw::ber_exp(0.7, 1.0), nm, derive_seed(seed, 1000 + i), true);
        const Window W = iid_window(WeightLaw::exponential(1.3), nm, derive_seed(seed, 1100 + i), true);
        const MaskedWindow Yp = a_map(Y, W);
        double before = 0.0, after = 0.0;
        for (size_t k = 0; k < nm; ++k) {
            before += Y[k];
            after += Yp[k];
        }
        // material leaving through the right edge
        after += std::min(Y[nm - 1], W[nm - 1]);
        mass = std::max(mass, std::abs(after - before));
        const Window S = sjr_update(Y, W);
        bit_identical = bit_identical &&
                        std::memcmp(S.values.data(), Yp.window.values.data(), nm * sizeof(double)) == 0;
    }
    r.checks.push_back(check_le("a_map_mass_residual", mass, 0.0));
    r.checks.push_back(check_true("sjr_equals_a_bitwise", bit_identical));

    // DP against enumeration of every path on small grids
    const int steps = int(th.get(1, "enumeration_steps"));
    double dp = 0.0;
    size_t grids = 0;
    const std::vector<ModelKind> models{ModelKind::swfpp(), ModelKind::sjr(0.4),
                                        ModelKind::general(WeightLaw::ber_exp(0.6, 2.0))};
    for (int w = 1; w <= steps + 1; ++w)
        for (int h = 1; (w - 1) + (h - 1) <= steps; ++h)
            for (size_t m = 0; m < models.size(); ++m) {
                const Environment env = generate_environment_serial(models[m], WeightLaw::exponential(1.0), w, h,
                                                                    derive_seed(seed, 5000 + 97 * w + 13 * h + m));
                const PassageField f = passage_field(env, {0, 0});
                for (int tx = 0; tx < w; ++tx)
                    for (int ty = 0; ty < h; ++ty) {
                        double best = kInf;
                        enumerate_paths(env, 0, 0, 0.0, tx, ty, best);
                        dp = std::max(dp, std::abs(best - f.at(tx, ty)));
                    }
                ++grids;
            }
    r.checks.push_back(check_le("dp_minus_enumeration", dp, 0.0));
    d["enumeration_grids"] = grids;
    d["window"] = n;
    r.details = d.dump();
    return r;
}

// ---------------------------------------------------------------- 2

struct FamilyPoint {
    std::string name;
    WeightLaw weights;
    double param;
    std::vector<double> line_params;  // for the three-line check
};

std::vector<FamilyPoint> table_points() {
    return {
        {"bernoulli(0.3)", WeightLaw::bernoulli(0.3), 0.3, {0.2, 0.4, 0.6}},
        {"bernoulli(0.7)", WeightLaw::bernoulli(0.7), 0.6, {0.2, 0.4, 0.6}},
        {"berexp(0.5,1)", WeightLaw::ber_exp(0.5, 1.0), 0.5, {0.5, 1.0, 2.0}},
        {"exp(2)", WeightLaw::exponential(2.0), 1.5, {0.5, 1.0, 2.0}},
        {"bergeom(0.5,0.5)", WeightLaw::ber_geom_plus(0.5, 0.5), 0.3, {0.2, 0.4, 0.6}},
        {"bergeom(0.8,0.3)", WeightLaw::ber_geom_plus(0.8, 0.3), 0.6, {0.2, 0.4, 0.6}},
    };
}

CriterionReport criterion2(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    json d = json::array();
    const size_t n = th.count(2, "entries", b, 1000);
    const size_t burn = th.count(2, "burn", Budget::Desk);
    const double alpha = th.get(2, "alpha");
    const auto points = table_points();
    uint64_t tag = 0;
    for (MapKind kind : {MapKind::H, MapKind::V, MapKind::A}) {
        for (const auto& fp : points) {
            const WeightLaw law = invariant_marginal(kind, fp.weights, fp.param);
            const auto post = single_map_sample(kind, fp.weights, law, n, burn, derive_seed(seed, ++tag));
            const TestResult t = ks_law(post, law, alpha);
            const std::string name = map_kind_name(kind) + "/" + fp.name;
            r.checks.push_back({name + " ks_p", t.p_value, ">= " + std::to_string(alpha), t.pass});
            d.push_back({{"cell", name}, {"law", law.to_string()}, {"result", test_json(t)}});
        }
    }
    // three-line joint invariance: marginals after one update and exact ordering
    for (MapKind kind : {MapKind::H, MapKind::V, MapKind::A}) {
        for (size_t f = 0; f < points.size(); f += 2) {
            const auto& fp = points[f];
            MeanVector mv{kind, {}};
            for (double p : fp.line_params) mv.rho.push_back(invariant_marginal(kind, fp.weights, p).mean());
            const size_t len = n + 2 * burn;
            const MultiLineSample s = sample_multiline(mv, fp.weights, len, derive_seed(seed, ++tag), burn);
            const Window W = iid_window(fp.weights, len, derive_seed(seed, ++tag));
            const auto upd = update_lines(kind, s.lines, W);
            size_t lo = 0, hi = len;
            if (kind == MapKind::H) lo = 2 * burn;
            if (kind == MapKind::A) {
                lo = 1;
                hi = len - burn;
            }
            bool ordered = true;
            size_t compared = 0;
            for (size_t k = lo; k < hi; ++k) {
                for (size_t l = 0; l + 1 < upd.size(); ++l) {
                    if (!upd[l].valid[k] || !upd[l + 1].valid[k]) continue;
                    ordered = ordered && upd[l][k] >= upd[l + 1][k];
                    ++compared;
                }
            }
            const std::string name = "multiline " + map_kind_name(kind) + "/" + fp.name;
            r.checks.push_back(check_true(name + " ordered", ordered && compared > 0));
            for (size_t l = 0; l < upd.size(); ++l) {
                const TestResult t = ks_law(valid_entries(upd[l], lo, hi), s.laws[l], alpha);
                r.checks.push_back({name + " line " + std::to_string(l + 1) + " ks_p", t.p_value,
                                    ">= " + std::to_string(alpha), t.pass});
                d.push_back({{"cell", name}, {"line", l + 1}, {"law", s.laws[l].to_string()},
                             {"result", test_json(t)}, {"ordered_pairs", compared}});
            }
        }
    }
    r.details = json{{"tests", d}}.dump();
    return r;
}

// ---------------------------------------------------------------- 3

CriterionReport criterion3(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    json d;
    const size_t samples = th.count(3, "marginal_samples", b, 200);
    const double alpha = th.get(3, "alpha");
    const std::vector<double> rhos{0.5, 1.0, 2.0};
    json marg = json::array();
    for (size_t i = 0; i < rhos.size(); ++i) {
        const double rho = rhos[i];
        const uint64_t base = derive_seed(seed, 10 + i);
        auto zeros = run_replicas<uint8_t>(samples, base, [&](size_t j, RngStream&) {
            return uint8_t(busemann_origin_zero(rho, int(th.get(3, "marginal_columns")),
                                                int(th.get(3, "marginal_height")), derive_seed(base, j)));
        });
        uint64_t k = 0;
        for (auto z : zeros) k += z;
        const TestResult t = binomial_test(k, samples, rho / (1.0 + rho), alpha);
        r.checks.push_back({"P(rho* <= " + std::to_string(rho) + ") binomial p", t.p_value,
                            ">= " + std::to_string(alpha), t.pass});
        marg.push_back({{"rho", rho}, {"zeros", k}, {"n", samples}, {"expected", rho / (1.0 + rho)},
                        {"result", test_json(t)}});
    }
    d["marginal"] = marg;

    // finite-n competition interface r_n / (r_n + n) at n
    const int n = int(th.get(3, "n"));
    const size_t reps = th.count(3, "replicas", b, 20);
    const double tol = th.get(3, "tolerance");
    // direction of rho in Exp(1) SWFPP: r/n = (1 + 2 rho) / rho^2
    std::vector<std::pair<double, int>> thr;
    for (double rho : rhos) thr.push_back({rho, int(std::lround(n * (1.0 + 2.0 * rho) / (rho * rho)))});
    std::sort(thr.begin(), thr.end(), [](auto a, auto c) { return a.second < c.second; });
    std::vector<int> cols;
    for (auto& t : thr) cols.push_back(t.second);
    const uint64_t cseed = derive_seed(seed, 77);
    auto hits = run_replicas<std::vector<uint8_t>>(reps, cseed, [&](size_t j, RngStream&) {
        return competition_thresholds(ModelKind::swfpp(), WeightLaw::exponential(1.0), derive_seed(cseed, j), n,
                                      cols);
    });
    json comp = json::array();
    for (size_t t = 0; t < thr.size(); ++t) {
        double c = 0;
        for (const auto& h : hits) c += h[t];
        const double est = c / double(reps);
        const double rho = thr[t].first;
        const double target = rho / (1.0 + rho);
        r.checks.push_back(check_le("|P(r_n >= " + std::to_string(thr[t].second) + ") - " + std::to_string(target) +
                                        "|",
                                    std::abs(est - target), tol));
        comp.push_back({{"rho", rho}, {"column", thr[t].second}, {"estimate", est}, {"target", target},
                        {"stderr", std::sqrt(est * (1 - est) / double(reps))}, {"bias", est - target}});
    }
    d["competition"] = {{"n", n}, {"replicas", reps}, {"rows", comp}};
    r.details = d.dump();
    return r;
}

// ---------------------------------------------------------------- 4

CriterionReport criterion4(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    const int G = int(th.get(4, "grid"));
    std::vector<double> rho;
    for (int i = 1; i <= G; ++i) rho.push_back(double(i) / double(G + 1 - i));
    const size_t reps = th.count(4, "replicas", b, 20);
    const size_t burn = th.count(4, "burn", Budget::Desk);
    const size_t pairs = th.count(4, "pairs_per_replica", Budget::Desk);
    const double tol = th.get(4, "tolerance");
    struct Counts {
        double g = 0, e = 0, l = 0, n = 0;
        double g_first = 0, n_first = 0;  // first pair only, for a burn-in check
    };
    auto counts = run_replicas<Counts>(reps, seed, [&](size_t j, RngStream&) {
        const auto lv = critical_angle_levels(rho, burn + pairs + 1, burn, derive_seed(seed, j));
        const AdjacentOrdering a = adjacent_ordering(lv);
        Counts c;
        c.n = double(a.pairs);
        c.g = a.greater * c.n;
        c.e = a.equal * c.n;
        c.l = a.less * c.n;
        c.g_first = lv[0] < lv[1];
        c.n_first = 1;
        return c;
    });
    Counts t;
    std::vector<double> per_g;
    for (const auto& c : counts) {
        t.g += c.g;
        t.e += c.e;
        t.l += c.l;
        t.n += c.n;
        t.g_first += c.g_first;
        t.n_first += c.n_first;
        per_g.push_back(c.g / c.n);
    }
    const double pg = t.g / t.n, pe = t.e / t.n, pl = t.l / t.n;
    r.checks.push_back(check_le("|P(>) - 1/3|", std::abs(pg - 1.0 / 3.0), tol));
    r.checks.push_back(check_le("|P(=) - 1/6|", std::abs(pe - 1.0 / 6.0), tol));
    r.checks.push_back(check_le("|P(<) - 1/2|", std::abs(pl - 0.5), tol));
    const MeanCI ci = mean_ci(per_g);
    json d{{"grid", G},
           {"replicas", reps},
           {"pairs", t.n},
           {"greater", pg},
           {"equal", pe},
           {"less", pl},
           {"greater_stderr_between_replicas", ci.stderr_},
           {"equal_grid_bias", pe - 1.0 / 6.0},
           {"greater_first_pair_only", t.g_first / t.n_first}};
    r.details = d.dump();
    return r;
}

// ---------------------------------------------------------------- 5

CriterionReport criterion5(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    json d;
    const double rho1 = 1.0, rho2 = 2.0;
    const WalkParams w = step_probabilities(rho1, rho2);
    const size_t gaps = th.count(5, "gaps", b, 1000);
    const size_t chunks = 100;
    auto parts = run_replicas<std::vector<uint64_t>>(chunks, derive_seed(seed, 1), [&](size_t, RngStream& rng) {
        return convoy_gaps(w, gaps / chunks, rng);
    });
    std::vector<double> all;
    for (const auto& p : parts)
        for (auto g : p) all.push_back(double(g));
    const MeanCI ci = mean_ci(all);
    const double target = (1 + rho1) * (1 + rho2) / (rho2 - rho1);
    const double tol = th.get(5, "gap_rel_tolerance");
    r.checks.push_back(check_le("|mean gap / 6 - 1|", std::abs(ci.mean / target - 1.0), tol));
    // tau alone, to settle which quantity carries the mean
    auto taus = run_replicas<double>(chunks, derive_seed(seed, 2), [&](size_t, RngStream& rng) {
        double s = 0;
        for (size_t i = 0; i < gaps / chunks; ++i) s += double(sample_walk_tau(w, rng));
        return s / double(gaps / chunks);
    });
    d["holding"] = {{"rho1", rho1},          {"rho2", rho2},           {"gaps", all.size()},
                    {"mean", ci.mean},       {"stderr", ci.stderr_},  {"target", target},
                    {"mean_tau", mean_ci(taus).mean}, {"p_down_down", w.p_down_down}};

    // density of nonzero vertical Busemann increments after pushing left
    const int height = int(th.count(5, "density_height", b, 20000));
    const int width = int(th.get(5, "density_columns")) + 1;
    const std::vector<double> rhos{0.5, 1.0, 2.0};
    const Environment env = generate_environment(ModelKind::swfpp(), WeightLaw::exponential(1.0), width, height,
                                                 derive_seed(seed, 3));
    const BusemannColumns bc = busemann_columns(env, rhos, derive_seed(seed, 4), size_t(th.get(5, "burn")));
    const double dtol = th.get(5, "density_rel_tolerance");
    json dens = json::array();
    for (size_t i = 0; i < rhos.size(); ++i) {
        const auto& col = bc.columns[i][0];
        double nz = 0, cnt = 0;
        for (size_t y = 0; y < col.size(); ++y) {
            if (!col.valid[y]) continue;
            nz += col[y] != 0.0;
            ++cnt;
        }
        const double dens_est = nz / cnt, target_d = 1.0 / (1.0 + rhos[i]);
        r.checks.push_back(check_le("|density(rho=" + std::to_string(rhos[i]) + ") / target - 1|",
                                    std::abs(dens_est / target_d - 1.0), dtol));
        dens.push_back({{"rho", rhos[i]}, {"density", dens_est}, {"target", target_d}, {"entries", cnt}});
    }
    d["density"] = dens;
    r.details = d.dump();
    return r;
}

// ---------------------------------------------------------------- 6

CriterionReport criterion6(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    const WalkParams w = step_probabilities(1.0);
    const size_t K = size_t(th.get(6, "max_k"));
    const size_t samples = th.count(6, "samples", b, 1000);
    const double alpha = th.get(6, "alpha");
    const size_t chunks = 100;
    auto hists = run_replicas<std::vector<double>>(chunks, seed, [&](size_t, RngStream& rng) {
        std::vector<double> h(K + 1, 0.0);  // h[k-1] for k = 1..K, h[K] for > K
        for (size_t i = 0; i < samples / chunks; ++i) {
            const StopTime t = sample_sigma_censored(w, rng, SigmaReading::GeneratingFunction, K);
            if (t.censored) h[K] += 1;
            else h[t.value - 1] += 1;
        }
        return h;
    });
    std::vector<double> obs(K + 1, 0.0);
    for (const auto& h : hists)
        for (size_t k = 0; k <= K; ++k) obs[k] += h[k];
    double total = 0;
    for (double o : obs) total += o;
    const auto p = sigma_series(w.beta, K);
    std::vector<double> exp(K + 1, 0.0);
    double mass = 0;
    for (size_t k = 1; k <= K; ++k) {
        exp[k - 1] = total * p[k];
        mass += p[k];
    }
    exp[K] = total * (1.0 - mass);
    std::vector<double> o2 = obs, e2 = exp;
    pool_bins(o2, e2);
    const TestResult t = chi_square(o2, e2, alpha);
    r.checks.push_back({"chi_square p (k <= " + std::to_string(K) + ")", t.p_value, ">= " + std::to_string(alpha),
                        t.pass});

    const size_t kt = size_t(th.get(6, "tail_k"));
    const auto pt = sigma_series(w.beta, kt);
    const double scaled = pt[kt] * std::pow(double(kt), 1.5);
    const double c = sigma_tail_constant(w);
    r.checks.push_back(check_le("|p~_k k^1.5 / C - 1|", std::abs(scaled / c - 1.0), th.get(6, "tail_rel_tolerance")));
    json d{{"samples", total},  {"chi_square", test_json(t)}, {"p1_series", p[1]}, {"p1_empirical", obs[0] / total},
           {"tail_k", kt},      {"scaled", scaled},           {"constant", c}};
    r.details = d.dump();
    return r;
}

// ---------------------------------------------------------------- 7

CriterionReport criterion7(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    const WalkParams w = step_probabilities(1.0);
    const uint64_t n = uint64_t(th.get(7, "n"));
    const size_t reps = th.count(7, "replicas", b, 5);
    auto u = run_replicas<double>(reps, seed, [&](size_t, RngStream& rng) {
        const RenewalSet s = sigma_renewals(w, n, rng, SigmaReading::Literal);
        return double(s.points.size()) / std::sqrt(double(n));
    });
    const MeanCI ci = mean_ci(u);
    const double target = sigma_renewal_constant(w);
    r.checks.push_back(check_le("|mean U(n)/sqrt(n) / target - 1|", std::abs(ci.mean / target - 1.0),
                                th.get(7, "rel_tolerance")));
    json d{{"n", n},
           {"replicas", reps},
           {"mean", ci.mean},
           {"stderr", ci.stderr_},
           {"relative_stderr", ci.stderr_ / ci.mean},
           {"target", target},
           {"erickson_check", erickson_limit(0.5, sigma_literal_tail_L(w))},
           {"values", u}};
    r.details = d.dump();
    return r;
}

// ---------------------------------------------------------------- 8

CriterionReport criterion8(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    const double rho = 1.0;
    const uint64_t n = uint64_t(th.get(8, "n"));
    const size_t reps = th.count(8, "replicas", b, 5);
    auto c = run_replicas<double>(reps, seed, [&](size_t, RngStream& rng) {
        return double(convoy_sample(rho, n, rng).points.size()) / std::sqrt(double(n));
    });
    const MeanCI ci = mean_ci(c);
    const double rel = ci.stderr_ / ci.mean;
    r.checks.push_back(check_le("relative stderr", rel, th.get(8, "rel_stderr")));
    const ConvoyCandidates cc = convoy_constant_candidates(rho);
    const double z = th.get(8, "stderr_multiple");
    json cand = json::array();
    int within = 0;
    std::string verdict;
    for (auto [name, v] : std::vector<std::pair<std::string, double>>{
             {"long_form", cc.long_form}, {"simplified_form", cc.simplified_form}, {"thinned_form", cc.thinned_form}}) {
        const bool ok = std::abs(ci.mean - v) <= z * ci.stderr_;
        within += ok;
        if (ok) verdict += (verdict.empty() ? "" : ",") + name;
        cand.push_back({{"name", name}, {"value", v}, {"within", ok}, {"distance_in_stderr", (ci.mean - v) / ci.stderr_}});
    }
    r.checks.push_back(check_ge("candidates within the band", double(within), 1.0));
    json d{{"n", n},          {"replicas", reps}, {"mean", ci.mean},    {"stderr", ci.stderr_},
           {"relative_stderr", rel}, {"candidates", cand}, {"verdict", verdict.empty() ? "none" : verdict},
           {"values", c}};
    r.details = d.dump();
    return r;
}

// ---------------------------------------------------------------- 9

CriterionReport criterion9(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    json d;
    const size_t reps = th.count(9, "marginal_replicas", b, 1000);
    const double alpha = th.get(9, "alpha");
    json marg = json::array();
    int tag = 0;
    for (double t : {0.25, 0.5, 0.75}) {
        const uint64_t s = derive_seed(seed, uint64_t(++tag));
        auto vals = run_replicas<int64_t>(reps, s, [&](size_t, RngStream& rng) {
            return branch_process_sample(t, int64_t(1) << 40, rng).b.back();
        });
        int64_t top = 0;
        for (auto v : vals) top = std::max(top, v);
        std::vector<double> obs(size_t(top) + 2, 0.0), ex(size_t(top) + 2, 0.0);
        for (auto v : vals) obs[size_t(v)] += 1;
        const WeightLaw g = WeightLaw::geom0(1.0 - t);
        double acc = 0;
        for (int64_t k = 0; k <= top; ++k) {
            ex[size_t(k)] = double(reps) * g.pmf(long(k));
            acc += ex[size_t(k)];
        }
        ex[size_t(top) + 1] = double(reps) - acc;
        pool_bins(obs, ex);
        const TestResult tr = chi_square(obs, ex, alpha);
        r.checks.push_back({"b(" + std::to_string(t) + ") chi_square p", tr.p_value, ">= " + std::to_string(alpha),
                            tr.pass});
        // P(b(t) = 1) under the two-jump recursion works out to t - t^2/2 - t^3/2,
        // against t (1 - t) for the geometric law
        const double p1 = double(std::count(vals.begin(), vals.end(), int64_t(1))) / double(reps);
        marg.push_back({{"t", t}, {"replicas", reps}, {"result", test_json(tr)},
                        {"p0_empirical", double(std::count(vals.begin(), vals.end(), int64_t(0))) / double(reps)},
                        {"p1_empirical", p1}, {"p1_geometric", t * (1.0 - t)},
                        {"p1_sampler_exact", t - t * t / 2.0 - t * t * t / 2.0}});
    }
    d["marginal"] = marg;

    std::vector<int64_t> Ns;
    for (double e = th.get(9, "log10_min"); e <= th.get(9, "log10_max") + 1e-9; e += 1.0)
        Ns.push_back(int64_t(std::llround(std::pow(10.0, e))));
    const size_t greps = th.count(9, "growth_replicas", b, 20);
    const auto rows = branch_growth_experiment(Ns, greps, derive_seed(seed, 99));
    json gr = json::array();
    double lo = 1e300, hi = -1e300, se = 0;
    for (const auto& row : rows) {
        r.checks.push_back(check_in("mean B(" + std::to_string(row.N) + ")/ln N", row.mean_ratio, th.get(9, "ratio_min"),
                                    th.get(9, "ratio_max")));
        lo = std::min(lo, row.mean_ratio);
        hi = std::max(hi, row.mean_ratio);
        se = std::max(se, row.stderr_ratio);
        gr.push_back({{"N", row.N}, {"mean_count", row.mean_count}, {"mean_ratio", row.mean_ratio},
                      {"stderr", row.stderr_ratio}});
    }
    // flat across N: the spread of the means stays within a few standard errors
    // or within a fixed fraction of the mean level
    const double spread = hi - lo;
    const double allowed = std::max(th.get(9, "flat_stderr_multiple") * se, th.get(9, "flat_rel") * hi);
    r.checks.push_back(check_le("spread of mean B(N)/ln N", spread, allowed));
    d["growth"] = {{"replicas", greps}, {"rows", gr}, {"spread", spread}, {"allowed", allowed}};
    r.details = d.dump();
    return r;
}

// ---------------------------------------------------------------- 10

CriterionReport criterion10(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    const int n = b == Budget::Smoke ? 200 : int(th.get(10, "n"));
    const size_t reps = th.count(10, "replicas", b, 2);
    const std::vector<std::pair<double, double>> dirs{{1, 1}, {2, 1}, {1, 3}};
    std::vector<Vertex> targets;
    for (auto [s, t] : dirs) targets.push_back({int(std::floor(n * s)), int(std::floor(n * t))});
    auto vals = run_replicas<std::vector<double>>(reps, derive_seed(seed, 1), [&](size_t j, RngStream&) {
        return point_passage_times(ModelKind::swfpp(), WeightLaw::exponential(1.0), derive_seed(seed, 100 + j),
                                   targets);
    });
    json d;
    json sw = json::array();
    for (size_t i = 0; i < dirs.size(); ++i) {
        std::vector<double> v;
        for (const auto& x : vals) v.push_back(x[i] / n);
        const MeanCI ci = mean_ci(v);
        const double shape = limit_shape_exp1(dirs[i].first, dirs[i].second);
        r.checks.push_back(check_le("|L/n / shape - 1| at (" + std::to_string(int(dirs[i].first)) + "," +
                                        std::to_string(int(dirs[i].second)) + ")",
                                    std::abs(ci.mean / shape - 1.0), th.get(10, "rel_tolerance")));
        sw.push_back({{"s", dirs[i].first}, {"t", dirs[i].second}, {"mean", ci.mean}, {"stderr", ci.stderr_},
                      {"shape", shape}});
    }
    d["swfpp"] = sw;
    const auto rows =
        sjr_limit_shape_check(th.get(10, "sjr_alpha"), WeightLaw::exponential(1.0), n, dirs, int(reps), derive_seed(seed, 2));
    json sj = json::array();
    for (const auto& row : rows) {
        r.checks.push_back(check_le("|SJR / max(H, V) - 1| at (" + std::to_string(int(row.s)) + "," +
                                        std::to_string(int(row.t)) + ")",
                                    std::abs(row.ratio - 1.0), th.get(10, "sjr_rel_tolerance")));
        sj.push_back({{"s", row.s},
                      {"t", row.t},
                      {"sjr", row.sjr},
                      {"horizontal", row.horizontal},
                      {"vertical", row.vertical},
                      {"ratio", row.ratio},
                      {"ratio_stderr", row.ratio_stderr},
                      {"min_pathwise", row.min_pathwise}});
    }
    d["sjr"] = sj;
    d["n"] = n;
    d["replicas"] = reps;
    r.details = d.dump();
    return r;
}

// ---------------------------------------------------------------- 11

// Mean and batch-means standard error of x_k y_{k+lag}.
MeanCI cross_moment(const std::vector<double>& x, const std::vector<double>& y, size_t lo, size_t hi, size_t lag) {
    const size_t batches = 100;
    const size_t m = (hi - lo - lag) / batches;
    std::vector<double> means;
    for (size_t bi = 0; bi < batches; ++bi) {
        double s = 0;
        for (size_t k = lo + bi * m; k < lo + (bi + 1) * m; ++k) s += x[k] * y[k + lag];
        means.push_back(s / double(m));
    }
    return mean_ci(means);
}

CriterionReport criterion11(const Thresholds& th, Budget b, uint64_t seed) {
    CriterionReport r;
    const std::vector<double> rho{0.8, 0.5, 0.3};
    const size_t n = th.count(11, "entries", b, 2000);
    const size_t margin = n / 5;
    const size_t window = n + 2 * margin;
    const double alpha = th.get(11, "alpha");
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const NestedSample s = nested_h_vs_d(rho, window, seed);
    json d;
    json ks = json::array();
    for (size_t i = 0; i < rho.size(); ++i) {
        std::vector<double> a(s.lhs[i].begin() + long(margin), s.lhs[i].begin() + long(margin + n));
        std::vector<double> c(s.rhs[i].begin() + long(margin), s.rhs[i].begin() + long(margin + n));
        const TestResult t = ks_two_sample(a, c, alpha);
        r.checks.push_back({"line " + std::to_string(i + 1) + " ks_two_sample p", t.p_value,
                            ">= " + std::to_string(alpha), t.pass});
        ks.push_back(test_json(t));
    }
    json mom = json::array();
    for (size_t i = 0; i < rho.size(); ++i)
        for (size_t j = 0; j < rho.size(); ++j)
            for (size_t lag : {size_t(0), size_t(1)}) {
                if (lag == 0 && j <= i) continue;
                const MeanCI a = cross_moment(s.lhs[i], s.lhs[j], margin, margin + n, lag);
                const MeanCI c = cross_moment(s.rhs[i], s.rhs[j], margin, margin + n, lag);
                const double se = std::sqrt(a.stderr_ * a.stderr_ + c.stderr_ * c.stderr_);
                const double zz = std::abs(a.mean - c.mean) / se;
                const std::string name = "E[Y" + std::to_string(i + 1) + "_k Y" + std::to_string(j + 1) + "_k+" +
                                         std::to_string(lag) + "] z";
                r.checks.push_back(check_le(name, zz, z));
                mom.push_back({{"i", i + 1}, {"j", j + 1}, {"lag", lag}, {"lhs", a.mean}, {"rhs", c.mean}, {"z", zz}});
            }
    d["ks"] = ks;
    d["moments"] = mom;
    d["entries"] = n;
    d["band_z"] = z;
    r.details = d.dump();
    return r;
}

}  // namespace

CriterionReport run_criterion(int id, const Thresholds& th, Budget budget, uint64_t seed) {
    static const std::function<CriterionReport(const Thresholds&, Budget, uint64_t)> fns[] = {
        criterion1, criterion2, criterion3, criterion4, criterion5, criterion6,
        criterion7, criterion8, criterion9, criterion10, criterion11};
    const std::string title = criterion_title(id);
    const auto t0 = std::chrono::steady_clock::now();
    CriterionReport r = fns[id - 1](th, budget, derive_seed(seed, uint64_t(id)));
    r.id = id;
    r.title = title;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// ---------------------------------------------------------------- catalogue

namespace {

double param(const ExperimentSpec& s, const std::string& k, double dflt) {
    auto it = s.params.find(k);
    if (it == s.params.end()) return dflt;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ParameterRange("parameter '" + k + "' is not a number: " + it->second);
    }
}

using ReplicaFn = std::function<double(const ExperimentSpec&, size_t, RngStream&)>;

const std::map<std::string, ReplicaFn>& catalogue() {
    static const std::map<std::string, ReplicaFn> c{
        {"tau",
         [](const ExperimentSpec& s, size_t, RngStream& rng) {
             const WalkParams w = step_probabilities(param(s, "rho1", 1.0), param(s, "rho2", 2.0));
             return double(sample_walk_tau(w, rng, uint64_t(param(s, "cap", double(kDefaultCap)))));
         }},
        {"sigma",
         [](const ExperimentSpec& s, size_t, RngStream& rng) {
             const WalkParams w = step_probabilities(param(s, "rho", 1.0));
             const auto reading = param(s, "literal", 0.0) != 0.0 ? SigmaReading::Literal
                                                                   : SigmaReading::GeneratingFunction;
             return double(sample_sigma(w, rng, reading, uint64_t(param(s, "cap", double(kDefaultCap)))));
         }},
        {"sigma_renewal",
         [](const ExperimentSpec& s, size_t, RngStream& rng) {
             const WalkParams w = step_probabilities(param(s, "rho", 1.0));
             const double n = param(s, "n", 1e6);
             return double(sigma_renewals(w, uint64_t(n), rng, SigmaReading::Literal).points.size()) / std::sqrt(n);
         }},
        {"convoy",
         [](const ExperimentSpec& s, size_t, RngStream& rng) {
             const double n = param(s, "n", 1e6);
             return double(convoy_sample(param(s, "rho", 1.0), uint64_t(n), rng).points.size()) / std::sqrt(n);
         }},
        {"branch",
         [](const ExperimentSpec& s, size_t, RngStream& rng) {
             const auto tr = branch_process_sample(param(s, "t", 0.5), int64_t(param(s, "level", 1e12)), rng);
             return double(tr.b.back());
         }},
        {"competition",
         [](const ExperimentSpec& s, size_t i, RngStream&) {
             const int n = int(param(s, "n", 256));
             const int col = int(param(s, "column", 3 * n));
             return double(competition_thresholds(ModelKind::swfpp(), WeightLaw::exponential(1.0),
                                                  derive_seed(s.seed, 1000003 + i), n, {col})[0]);
         }},
        {"passage",
         [](const ExperimentSpec& s, size_t i, RngStream&) {
             const int n = int(param(s, "n", 500));
             const Vertex t{int(n * param(s, "s", 1.0)), int(n * param(s, "t", 1.0))};
             return point_passage_times(ModelKind::swfpp(), WeightLaw::exponential(1.0),
                                        derive_seed(s.seed, 2000003 + i), {t})[0] /
                    n;
         }},
    };
    return c;
}

}  // namespace

std::vector<std::string> experiment_ids() {
    std::vector<std::string> ids;
    for (const auto& [k, v] : catalogue()) ids.push_back(k);
    return ids;
}

std::string run_experiment(const ExperimentSpec& spec) {
    auto it = catalogue().find(spec.id);
    if (it == catalogue().end()) throw ParameterRange("unknown experiment id '" + spec.id + "'");
    if (spec.replicas < 1) throw ParameterRange("replicas must be >= 1");
    const ReplicaFn& f = it->second;
    const auto vals = run_replicas<double>(
        spec.replicas, spec.seed, [&](size_t i, RngStream& rng) { return f(spec, i, rng); }, spec.parallel);
    json j;
    j["id"] = spec.id;
    j["params"] = spec.params;
    j["replicas"] = spec.replicas;
    j["seed"] = spec.seed;
    double s = 0;
    for (double v : vals) s += v;
    j["estimate"] = s / double(vals.size());
    if (vals.size() >= 2) {
        double ss = 0;
        for (double v : vals) ss += (v - s / double(vals.size())) * (v - s / double(vals.size()));
        j["stderr"] = std::sqrt(ss / double(vals.size() - 1) / double(vals.size()));
    } else {
        j["stderr"] = nullptr;
    }
    j["values"] = vals;
    return j.dump(2);
}

}  // namespace fpp
