#include "fpp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "fpp/errors.hpp"
#include "fpp/multiline.hpp"
#include "fpp/stats.hpp"
#include "fpp/stores.hpp"

namespace fpp {

using std::numbers::pi;

WalkParams step_probabilities(double rho1, double rho2) {
    if (!(rho1 > 0.0) || !(rho2 > 0.0) || !std::isfinite(rho1) || !std::isfinite(rho2))
        throw ParameterRange("rates must be positive and finite");
    WalkParams w;
    w.rho1 = rho1;
    w.rho2 = rho2;
    w.q1 = 1.0 / (1.0 + rho1);
    w.q2 = 1.0 / (1.0 + rho2);
    w.p_up = (1.0 - w.q1) * w.q2 + w.q1 * w.q2 * rho1 / (rho1 + rho2);
    w.p_flat = (1.0 - w.q1) * (1.0 - w.q2);
    w.p_down = 1.0 - w.p_up - w.p_flat;
    w.beta = w.p_flat;
    w.q_up = w.p_up / (1.0 - w.p_down);
    w.q_flat = w.p_flat / (1.0 - w.p_down);
    w.p_down_down = (1.0 - w.q2) * w.q1 / w.p_down;
    return w;
}

WalkStep walk_step(const WalkParams& w, RngStream& rng) {
    const double x1 = rng.bernoulli(w.q1) ? rng.exponential(w.rho1) : 0.0;
    const double x2 = rng.bernoulli(w.q2) ? rng.exponential(w.rho2) : 0.0;
    return {x2 - x1, x2 == 0.0 && x1 > 0.0};
}

TauDraw sample_tau_censored(const WalkParams& w, RngStream& rng, uint64_t cap) {
    double S = 0.0, m = 0.0;  // m = min of S_0..S_{k-1}
    for (uint64_t k = 1; k <= cap; ++k) {
        const WalkStep st = walk_step(w, rng);
        const double prev = S;
        S += st.dx;
        if (st.dx < 0.0 && prev <= m) return {{k, false}, st.pure_down};
        m = std::min(m, S);
    }
    return {{cap, true}, false};
}

uint64_t sample_walk_tau(const WalkParams& w, RngStream& rng, uint64_t cap) {
    const TauDraw t = sample_tau_censored(w, rng, cap);
    if (t.time.censored) throw CapExceeded("tau exceeded the cap of " + std::to_string(cap) + " steps");
    return t.time.value;
}

StopTime sample_sigma_censored(const WalkParams& w, RngStream& rng, SigmaReading reading, uint64_t cap) {
    if (cap == 0) return {0, true};
    double first;
    if (reading == SigmaReading::Literal) {
        do first = walk_step(w, rng).dx;
        while (first < 0.0);
        if (first == 0.0) return {1, false};
    } else {
        do first = walk_step(w, rng).dx;
        while (!(first > 0.0));
    }
    // Literal counts the first step, the other reading does not
    uint64_t count = reading == SigmaReading::Literal ? 1 : 0;
    double S = first;
    while (count < cap) {
        ++count;
        S += walk_step(w, rng).dx;
        if (S <= 0.0) return {count, false};
    }
    return {cap, true};
}

uint64_t sample_sigma(const WalkParams& w, RngStream& rng, SigmaReading reading, uint64_t cap) {
    const StopTime t = sample_sigma_censored(w, rng, reading, cap);
    if (t.censored) throw CapExceeded("sigma exceeded the cap of " + std::to_string(cap) + " steps");
    return t.value;
}

std::vector<double> sigma_series(double beta, size_t K) {
    if (!(beta >= 0.0 && beta < 1.0)) throw ParameterRange("beta must lie in [0,1)");
    // P(z) = sqrt(1-bz) sqrt(1-z) solves (1-bz)(1-z)P' = (bz - (1+b)/2) P, so
    // (j+1) P_{j+1} = (1+b)(j - 1/2) P_j - b(j - 2) P_{j-1}.
    const long double b = beta;
    std::vector<long double> P(K + 2);
    P[0] = 1.0L;
    if (K + 2 > 1) P[1] = -(1.0L + b) / 2.0L;
    for (size_t j = 1; j + 1 < K + 2; ++j) {
        const long double jj = (long double)j;
        P[j + 1] = ((1.0L + b) * (jj - 0.5L) * P[j] - b * (jj - 2.0L) * P[j - 1]) / (jj + 1.0L);
    }
    std::vector<double> p(K + 1, 0.0);
    for (size_t k = 1; k <= K; ++k) p[k] = double(-2.0L * P[k + 1] / (1.0L - b));
    return p;
}

double sigma_tail_constant(double beta) { return 1.0 / std::sqrt(pi * (1.0 - beta)); }
double sigma_tail_constant(const WalkParams& w) { return sigma_tail_constant(w.beta); }

std::complex<double> sigma_cf(double beta, double theta) {
    if (!(beta >= 0.0 && beta < 1.0)) throw ParameterRange("beta must lie in [0,1)");
    const std::complex<double> z = std::polar(1.0, theta);
    const std::complex<double> a = std::sqrt(1.0 - beta * z);
    const std::complex<double> b = std::sqrt(1.0 - z);
    return (a - b) / (a + b);
}

double erickson_limit(double alpha, double L) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterRange("alpha must lie in (0,1)");
    if (!(L > 0.0)) throw ParameterRange("L must be positive");
    return (1.0 - alpha) / (L * boost::math::tgamma(1.0 + alpha) * boost::math::tgamma(2.0 - alpha));
}

double sigma_literal_tail_L(const WalkParams& w) { return 2.0 * w.q_up / std::sqrt(pi * (1.0 - w.beta)); }

double sigma_renewal_constant(const WalkParams& w) { return std::sqrt(1.0 - w.beta) / (w.q_up * std::sqrt(pi)); }

RenewalSet sigma_renewals(const WalkParams& w, uint64_t n, RngStream& rng, SigmaReading reading) {
    RenewalSet r;
    r.n = n;
    r.points.push_back(0);
    uint64_t pos = 0;
    while (pos < n) {
        const StopTime t = sample_sigma_censored(w, rng, reading, n - pos);
        if (t.censored) break;
        pos += t.value;
        r.points.push_back(pos);
    }
    return r;
}

RenewalSet convoy_sample(const WalkParams& w, uint64_t n, RngStream& rng) {
    RenewalSet r;
    r.n = n;
    r.points.push_back(0);
    uint64_t pos = 0;
    for (;;) {
        const uint64_t Z = 1 + rng.geometric0(w.p_down_down);
        uint64_t gap = 0;
        for (uint64_t i = 0; i < Z; ++i) {
            if (pos + gap >= n) return r;
            const TauDraw t = sample_tau_censored(w, rng, n - pos - gap);
            if (t.time.censored) return r;
            gap += t.time.value;
        }
        pos += gap;
        r.points.push_back(pos);
    }
}

std::vector<uint64_t> convoy_gaps(const WalkParams& w, size_t count, RngStream& rng, uint64_t cap) {
    std::vector<uint64_t> gaps(count);
    for (auto& g : gaps) {
        const uint64_t Z = 1 + rng.geometric0(w.p_down_down);
        g = 0;
        for (uint64_t i = 0; i < Z; ++i) g += sample_walk_tau(w, rng, cap);
    }
    return gaps;
}

ConvoyCandidates convoy_constant_candidates(double rho) {
    const WalkParams w = step_probabilities(rho);
    const double core = w.p_down * std::sqrt(1.0 - w.beta) / ((1.0 - w.p_down) * w.q_up * std::sqrt(pi));
    ConvoyCandidates c;
    c.long_form = core / w.p_down_down;
    c.simplified_form = (1.0 + 2.0 * rho) / (2.0 * rho * std::sqrt(pi * (1.0 + rho * rho)));
    c.thinned_form = core * w.p_down_down;
    return c;
}

// ---- branch process ----

int64_t JumpTrajectory::value_at(double t) const {
    int64_t v = 0;
    for (size_t k = 0; k < d.size() && d[k] <= t; ++k) v = b[k];
    return v;
}

double branch_next_s(double s_prev, int64_t b, double u) {
    if (!(s_prev > 0.0 && s_prev <= 1.0)) throw ParameterRange("s must lie in (0,1]");
    if (!(u > 0.0 && u < 1.0)) throw ParameterRange("u must lie in (0,1)");
    // F(s) = (1-s)^b (1 - s/s_prev) falls from 1 at s = 0 to 0 at s_prev
    const double lu = std::log(u);
    auto logF = [&](double s) { return double(b) * std::log1p(-s) + std::log1p(-s / s_prev); };
    double lo = std::log(1e-300), hi = std::log(s_prev);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (logF(std::exp(mid)) > lu) lo = mid;
        else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

namespace {

struct BranchLine {
    double s;
    double rate;
    double store = 0.0;
    int64_t next = 0;  // next height with a nonzero input
};

}  // namespace

JumpTrajectory branch_process_sample(double t_max, int64_t level_cap, RngStream& rng) {
    if (!(t_max >= 0.0 && t_max <= 1.0)) throw ParameterRange("t_max must lie in [0,1]");
    if (level_cap < 1) throw ParameterRange("level cap must be >= 1");
    JumpTrajectory tr;
    tr.d.push_back(0.0);
    tr.s.push_back(1.0);
    tr.b.push_back(0);
    std::vector<BranchLine> lines;
    auto gap = [&](double s) { return int64_t(std::min<uint64_t>(rng.geometric0(s), uint64_t(1) << 62)); };
    for (;;) {
        const double s_new = branch_next_s(tr.s.back(), tr.b.back(), rng.uniform_pos() * (1.0 - 0x1.0p-53));
        if (1.0 - s_new > t_max) return tr;
        const int64_t start = tr.b.back() + 1;
        lines.push_back({s_new, (1.0 - s_new) / s_new, 0.0, start + gap(s_new)});
        // Only heights where some line receives input can change an output:
        // elsewhere the first line emits 0 and every store just waits.
        for (;;) {
            int64_t n = lines[0].next;
            for (const auto& l : lines) n = std::min(n, l.next);
            if (n >= level_cap) {
                tr.d.push_back(1.0 - s_new);
                tr.s.push_back(s_new);
                tr.b.push_back(n);
                tr.reached_level = true;
                return tr;
            }
            double prev_out = 0.0;
            for (size_t k = 0; k < lines.size(); ++k) {
                BranchLine& l = lines[k];
                double in = 0.0;
                if (l.next == n) {
                    in = rng.exponential(l.rate);
                    l.next = n + 1 + gap(l.s);
                }
                double out;
                if (k == 0) {
                    out = in;
                } else {
                    const double tot = in + l.store;
                    out = std::min(tot, prev_out);
                    l.store = tot - out;
                }
                prev_out = out;
            }
            if (prev_out != 0.0) {
                tr.d.push_back(1.0 - s_new);
                tr.s.push_back(s_new);
                tr.b.push_back(n);
                break;
            }
        }
    }
}

int64_t branch_count(const JumpTrajectory& traj, int64_t N) {
    int64_t c = 0;
    for (int64_t v : traj.b)
        if (v < N) ++c;
    return c;
}

std::vector<BranchGrowthRow> branch_growth_experiment(const std::vector<int64_t>& Ns, size_t replicas,
                                                      uint64_t seed) {
    if (Ns.empty() || replicas < 2) throw ParameterRange("need levels and at least two replicas");
    const int64_t top = *std::max_element(Ns.begin(), Ns.end());
    auto counts = run_replicas<std::vector<int64_t>>(replicas, seed, [&](size_t, RngStream& rng) {
        const JumpTrajectory tr = branch_process_sample(1.0, top, rng);
        std::vector<int64_t> c;
        for (int64_t N : Ns) c.push_back(branch_count(tr, N));
        return c;
    });
    std::vector<BranchGrowthRow> rows;
    for (size_t i = 0; i < Ns.size(); ++i) {
        std::vector<double> r, c;
        for (const auto& v : counts) {
            c.push_back(double(v[i]));
            r.push_back(double(v[i]) / std::log(double(Ns[i])));
        }
        const MeanCI ci = mean_ci(r);
        BranchGrowthRow row;
        row.N = Ns[i];
        row.mean_count = mean_ci(c).mean;
        row.mean_ratio = ci.mean;
        row.stderr_ratio = ci.stderr_;
        rows.push_back(row);
    }
    return rows;
}

// ---- Busemann columns ----

namespace {

WeightLaw v_column_law(double rho) { return invariant_marginal(MapKind::V, WeightLaw::exponential(1.0), rho); }

void check_rho_grid(const std::vector<double>& rho) {
    if (rho.empty()) throw ParameterRange("rho grid is empty");
    for (size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0)) throw ParameterRange("rho must be positive");
        if (i > 0 && !(rho[i] > rho[i - 1])) throw ParameterRange("rho grid must be strictly increasing");
    }
}

// Length of the valid prefix.
size_t valid_prefix(const MaskedWindow& w) {
    size_t n = 0;
    while (n < w.size() && w.valid[n]) ++n;
    return n;
}

// One column to the left: X(j) = V(X(j+1), W), W_y = w1(j+1, y).
MaskedWindow push_left(const MaskedWindow& right, const Environment& env, int j) {
    const size_t n = valid_prefix(right);
    Window X{std::vector<double>(right.window.values.begin(), right.window.values.begin() + long(n))};
    X.right = Boundary::Unbounded;
    Window W{std::vector<double>(n)};
    for (size_t y = 0; y < n; ++y) W[y] = env.h(j + 1, int(y));
    W.right = Boundary::Unbounded;
    MaskedWindow o = v_map(X, W);
    o.window.values.resize(right.size(), 0.0);
    o.valid.resize(right.size(), 0);
    return o;
}

}  // namespace

BusemannColumns busemann_columns(const Environment& env, const std::vector<double>& rho, uint64_t seed,
                                 size_t burn) {
    check_rho_grid(rho);
    if (env.model.tag != ModelTag::SWFPP || env.law != WeightLaw::exponential(1.0))
        throw InvalidLaw("Busemann columns need an Exp(1) SWFPP environment");
    if (env.width < 1 || env.height < 1) throw ParameterRange("empty environment");
    const size_t H = size_t(env.height);
    const size_t len = H + burn;
    std::vector<Window> inputs;
    for (size_t i = 0; i < rho.size(); ++i) {
        const WeightLaw law = v_column_law(rho[i]);
        RngStream rng(derive_seed(seed, 0xB05E + i));
        Window w{std::vector<double>(len)};
        for (auto& v : w.values) v = law.sample(rng);
        inputs.push_back(std::move(w));
    }
    const auto lines = multiline_from_inputs(MapKind::V, inputs, burn);
    BusemannColumns bc;
    bc.rho = rho;
    bc.columns.assign(rho.size(), std::vector<MaskedWindow>(size_t(env.width)));
    for (size_t i = 0; i < rho.size(); ++i) {
        MaskedWindow top;
        top.window = Window(std::vector<double>(lines[i].window.values.begin() + long(burn),
                                                lines[i].window.values.end()));
        top.valid.assign(lines[i].valid.begin() + long(burn), lines[i].valid.end());
        bc.columns[i][size_t(env.width - 1)] = top;
        for (int j = env.width - 2; j >= 0; --j)
            bc.columns[i][size_t(j)] = push_left(bc.columns[i][size_t(j + 1)], env, j);
    }
    return bc;
}

std::vector<Vertex> busemann_geodesic(const BusemannColumns& bc, size_t which, Vertex v) {
    const auto& cols = bc.columns.at(which);
    std::vector<Vertex> path{v};
    while (v.x + 1 < int(cols.size())) {
        const MaskedWindow& c = cols[size_t(v.x)];
        if (v.y < 0 || size_t(v.y) >= c.size() || !c.valid[size_t(v.y)]) break;
        if (c[size_t(v.y)] == 0.0) {
            if (size_t(v.y) + 1 >= c.size()) break;
            ++v.y;
        } else {
            ++v.x;
        }
        path.push_back(v);
    }
    return path;
}

HighwayFan busemann_geodesic_fan(const Environment& env, const std::vector<double>& rho, uint64_t seed,
                                 size_t burn) {
    const BusemannColumns bc = busemann_columns(env, rho, seed, burn);
    HighwayFan fan;
    for (size_t i = 0; i < rho.size(); ++i) fan.paths.push_back(busemann_geodesic(bc, i));
    return fan;
}

int64_t highways_column_count(const HighwayFan& fan, int k, int n) {
    std::vector<int> ys;
    for (const auto& p : fan.paths)
        for (size_t i = 0; i + 1 < p.size(); ++i)
            if (p[i].x == k && p[i + 1].x == k + 1 && p[i].y <= n) ys.push_back(p[i].y);
    std::sort(ys.begin(), ys.end());
    return int64_t(std::unique(ys.begin(), ys.end()) - ys.begin());
}

bool busemann_origin_zero(double rho, int columns, int height, uint64_t seed) {
    if (columns < 0 || height < 2) throw ParameterRange("need columns >= 0 and height >= 2");
    const WeightLaw law = v_column_law(rho);
    // Sites and the column draw are prefix-consistent in the height, so doubling
    // it until the origin is determined does not change the answer.
    for (int h = height; h <= (1 << 24); h *= 2) {
        const Environment env = generate_environment_serial(ModelKind::swfpp(), WeightLaw::exponential(1.0),
                                                            columns + 1, h, derive_seed(seed, 1));
        RngStream rng(derive_seed(seed, 2));
        MaskedWindow col;
        col.window = Window(std::vector<double>(size_t(h)));
        for (auto& v : col.window.values) v = law.sample(rng);
        col.valid.assign(size_t(h), 1);
        for (int j = columns - 1; j >= 0; --j) col = push_left(col, env, j);
        if (col.valid[0]) return col[0] == 0.0;
    }
    throw InsufficientWindow("no blocking index above the origin; raise the height");
}

std::vector<int> critical_angle_levels(const std::vector<double>& rho, size_t window, size_t burn,
                                       uint64_t seed) {
    check_rho_grid(rho);
    if (window <= burn + 1) throw ParameterRange("window must exceed the burn-in");
    std::vector<Window> inputs;
    for (size_t i = 0; i < rho.size(); ++i) {
        const WeightLaw law = v_column_law(rho[i]);
        RngStream rng(derive_seed(seed, 0xB05E + i));
        Window w{std::vector<double>(window)};
        for (auto& v : w.values) v = law.sample(rng);
        inputs.push_back(std::move(w));
    }
    const auto lines = multiline_from_inputs(MapKind::V, inputs, burn);
    std::vector<int> levels;
    for (size_t k = burn; k < window; ++k) {
        int m = 0;
        for (const auto& l : lines) m += l[k] != 0.0;
        levels.push_back(m);
    }
    return levels;
}

AdjacentOrdering adjacent_ordering(const std::vector<int>& levels) {
    AdjacentOrdering a;
    size_t g = 0, e = 0, l = 0;
    for (size_t k = 0; k + 1 < levels.size(); ++k) {
        if (levels[k] < levels[k + 1]) ++g;
        else if (levels[k] == levels[k + 1]) ++e;
        else ++l;
    }
    a.pairs = g + e + l;
    if (a.pairs > 0) {
        a.greater = double(g) / double(a.pairs);
        a.equal = double(e) / double(a.pairs);
        a.less = double(l) / double(a.pairs);
    }
    return a;
}

}  // namespace fpp
