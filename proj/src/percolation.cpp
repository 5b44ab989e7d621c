#include "fpp/percolation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

void check_source(const Environment& env, Vertex s) {
    if (s.x < 0 || s.y < 0 || s.x >= env.width || s.y >= env.height)
        throw ParameterRange("source outside the grid");
}

inline void relax(const Environment& env, std::vector<double>& L, int x, int y, Vertex s) {
    const size_t i = env.index(x, y);
    if (x == s.x && y == s.y) {
        L[i] = 0.0;
        return;
    }
    double best = kInf;
    if (x > s.x) best = L[i - 1] + env.w1[i];
    if (y > s.y) best = std::min(best, L[i - size_t(env.width)] + env.w2[i]);
    L[i] = best;
}

}  // namespace

PassageField passage_field(const Environment& env, Vertex source) {
    check_source(env, source);
    PassageField f{env.width, env.height, source, std::vector<double>(env.w1.size(), kInf)};
    for (int y = source.y; y < env.height; ++y)
        for (int x = source.x; x < env.width; ++x) relax(env, f.L, x, y, source);
    return f;
}

PassageField passage_field_parallel(const Environment& env, Vertex source, int tile) {
    check_source(env, source);
    if (tile < 1) throw ParameterRange("tile must be positive");
    PassageField f{env.width, env.height, source, std::vector<double>(env.w1.size(), kInf)};
    const int nx = (env.width - source.x + tile - 1) / tile;
    const int ny = (env.height - source.y + tile - 1) / tile;
    for (int d = 0; d < nx + ny - 1; ++d) {
        const int lo = std::max(0, d - (nx - 1));
        const int hi = std::min(d, ny - 1);
#pragma omp parallel for schedule(dynamic, 1)
        for (int ty = lo; ty <= hi; ++ty) {
            const int tx = d - ty;
            const int y0 = source.y + ty * tile, y1 = std::min(env.height, y0 + tile);
            const int x0 = source.x + tx * tile, x1 = std::min(env.width, x0 + tile);
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) relax(env, f.L, x, y, source);
        }
    }
    return f;
}

Geodesic geodesic(const Environment& env, const PassageField& field, Vertex target) {
    const Vertex s = field.source;
    if (target.x < s.x || target.y < s.y || target.x >= field.width || target.y >= field.height)
        throw ParameterRange("target must lie above-right of the source inside the grid");
    Geodesic g;
    Vertex v = target;
    g.path.push_back(v);
    while (!(v == s)) {
        const size_t i = env.index(v.x, v.y);
        const double here = field.L[i];
        const bool below = v.y > s.y && field.L[i - size_t(env.width)] + env.w2[i] == here;
        const bool left = v.x > s.x && field.L[i - 1] + env.w1[i] == here;
        if (below && left) ++g.ties;
        if (below) --v.y;
        else if (left) --v.x;
        else if (v.y > s.y) --v.y;  // only reachable through rounding; keep the walk finite
        else --v.x;
        g.path.push_back(v);
    }
    std::reverse(g.path.begin(), g.path.end());
    return g;
}

BoundaryCondition BoundaryCondition::horizontal(int x0, int y0, const std::vector<double>& I) {
    BoundaryCondition bc;
    double g = 0.0;
    for (size_t k = 0; k <= I.size(); ++k) {
        bc.path.push_back({x0 + int(k), y0});
        bc.g.push_back(g);
        if (k < I.size()) g += I[k];
    }
    return bc;
}

BoundaryCondition BoundaryCondition::vertical(int x0, int y_top, const std::vector<double>& X) {
    BoundaryCondition bc;
    double g = 0.0;
    for (size_t k = 0; k <= X.size(); ++k) {
        bc.path.push_back({x0, y_top - int(k)});
        bc.g.push_back(g);
        if (k < X.size()) g += X[k];
    }
    // stored top-down; callers index by k
    return bc;
}

BoundaryCondition BoundaryCondition::antidiagonal(int x_right, int y_bottom, const std::vector<double>& Y) {
    BoundaryCondition bc;
    double g = 0.0;
    bc.path.push_back({x_right, y_bottom});
    bc.g.push_back(g);
    for (size_t k = 1; k < Y.size(); ++k) {
        g -= Y[k];
        bc.path.push_back({x_right - int(k), y_bottom + int(k)});
        bc.g.push_back(g);
    }
    return bc;
}

PassageField boundary_passage_field(const Environment& env, const BoundaryCondition& bc, int depth) {
    if (bc.path.size() != bc.g.size() || bc.path.empty())
        throw ParameterRange("boundary path and values must have equal nonzero length");
    PassageField f{env.width, env.height, bc.path.front(), std::vector<double>(env.w1.size(), kInf)};
    std::vector<uint8_t> fixed(env.w1.size(), 0);
    int max_x = -1, max_y = -1;
    for (size_t k = 0; k < bc.path.size(); ++k) {
        const Vertex v = bc.path[k];
        if (v.x < 0 || v.y < 0 || v.x >= env.width || v.y >= env.height)
            throw InsufficientWindow("boundary path leaves the grid");
        if (k > 0) {
            const Vertex u = bc.path[k - 1];
            const int dx = v.x - u.x, dy = v.y - u.y;
            const bool down_right = (dx == 1 && dy == 0) || (dx == 0 && dy == -1);
            const bool up_left = (dx == -1 && dy == 0) || (dx == 0 && dy == 1);
            const bool anti = (dx == -1 && dy == 1) || (dx == 1 && dy == -1);
            if (!down_right && !up_left && !anti) throw ParameterRange("boundary path is not a lattice path");
        }
        f.L[env.index(v.x, v.y)] = bc.g[k];
        fixed[env.index(v.x, v.y)] = 1;
        max_x = std::max(max_x, v.x);
        max_y = std::max(max_y, v.y);
    }
    const int xe = depth < 0 ? env.width : std::min(env.width, max_x + depth + 1);
    const int ye = depth < 0 ? env.height : std::min(env.height, max_y + depth + 1);
    for (int y = 0; y < ye; ++y) {
        for (int x = 0; x < xe; ++x) {
            const size_t i = env.index(x, y);
            if (fixed[i]) continue;
            double best = kInf;
            if (x > 0) best = f.L[i - 1] + env.w1[i];
            if (y > 0) best = std::min(best, f.L[i - size_t(env.width)] + env.w2[i]);
            f.L[i] = best;
        }
    }
    return f;
}

std::vector<int> competition_interface(const Environment& env) {
    const int W = env.width, H = env.height;
    std::vector<double> L(size_t(W) * H, kInf);
    std::vector<uint8_t> lab(size_t(W) * H, 0);  // 1: via e1, 2: via e2
    std::vector<int> r(size_t(H), -1);
    L[0] = 0.0;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (x == 0 && y == 0) continue;
            const size_t i = env.index(x, y);
            const double a = x > 0 ? L[i - 1] + env.w1[i] : kInf;
            const double b = y > 0 ? L[i - size_t(W)] + env.w2[i] : kInf;
            if (b <= a) {
                L[i] = b;
                lab[i] = (x == 0 && y == 1) ? 2 : lab[i - size_t(W)];
            } else {
                L[i] = a;
                lab[i] = (x == 1 && y == 0) ? 1 : lab[i - 1];
            }
            if (lab[i] == 2) r[size_t(y)] = x;
        }
    }
    return r;
}

std::vector<uint8_t> competition_thresholds(const ModelKind& model, const WeightLaw& law,
                                            uint64_t seed, int n, const std::vector<int>& thresholds) {
    if (n < 1) throw ParameterRange("competition needs n >= 1");
    for (size_t i = 0; i < thresholds.size(); ++i)
        if (thresholds[i] < 0 || (i > 0 && thresholds[i] <= thresholds[i - 1]))
            throw ParameterRange("thresholds must be ascending and nonnegative");
    const size_t rows = size_t(n) + 1;
    // right boundary column of the strip computed so far
    std::vector<double> colL(rows, kInf);
    std::vector<uint8_t> colLab(rows, 0);
    std::vector<uint8_t> out(thresholds.size(), 0);
    int done = 0;  // columns [0, done) processed
    for (size_t t = 0; t < thresholds.size(); ++t) {
        const int x_end = thresholds[t] + 1;
        const int x0 = done;
        const size_t w = size_t(x_end - x0);
        std::vector<double> prev(w, kInf), cur(w);
        std::vector<uint8_t> prevLab(w, 0), curLab(w);
        for (size_t y = 0; y < rows; ++y) {
            double leftL = x0 == 0 ? kInf : colL[y];
            uint8_t leftLab = x0 == 0 ? 0 : colLab[y];
            for (size_t j = 0; j < w; ++j) {
                const int x = x0 + int(j);
                if (x == 0 && y == 0) {
                    cur[j] = 0.0;
                    curLab[j] = 0;
                } else {
                    const auto [w1, w2] = vertex_weights(model, law, seed, x, int(y));
                    const double a = x > 0 ? leftL + w1 : kInf;
                    const double b = y > 0 ? prev[j] + w2 : kInf;
                    if (b <= a) {
                        cur[j] = b;
                        curLab[j] = (x == 0 && y == 1) ? 2 : prevLab[j];
                    } else {
                        cur[j] = a;
                        curLab[j] = (x == 1 && y == 0) ? 1 : leftLab;
                    }
                }
                leftL = cur[j];
                leftLab = curLab[j];
            }
            colL[y] = cur[w - 1];
            colLab[y] = curLab[w - 1];
            std::swap(prev, cur);
            std::swap(prevLab, curLab);
        }
        done = x_end;
        out[t] = colLab[size_t(n)] == 2;
        if (!out[t]) break;  // R2 is an initial segment of each row
    }
    return out;
}

namespace {

// Streams rows 0..max_y over columns 0..max_x, calling weights(x, y) -> (w1, w2)
// for each of the `k` coupled fields and recording L at the targets.
template <int K, class Weights>
void stream_dp(int max_x, int max_y, const std::vector<Vertex>& targets, Weights&& weights,
               std::vector<std::array<double, K>>& out) {
    const size_t w = size_t(max_x) + 1;
    std::vector<std::array<double, K>> prev(w), cur(w);
    out.assign(targets.size(), {});
    for (int y = 0; y <= max_y; ++y) {
        for (int x = 0; x <= max_x; ++x) {
            std::array<double, K> v;
            if (x == 0 && y == 0) {
                v.fill(0.0);
            } else {
                const std::array<std::pair<double, double>, K> ws = weights(x, y);
                for (int k = 0; k < K; ++k) {
                    const double a = x > 0 ? cur[size_t(x) - 1][k] + ws[k].first : kInf;
                    const double b = y > 0 ? prev[size_t(x)][k] + ws[k].second : kInf;
                    v[k] = std::min(a, b);
                }
            }
            cur[size_t(x)] = v;
        }
        for (size_t i = 0; i < targets.size(); ++i)
            if (targets[i].y == y) out[i] = cur[size_t(targets[i].x)];
        std::swap(prev, cur);
    }
}

}  // namespace

std::vector<double> point_passage_times(const ModelKind& model, const WeightLaw& law,
                                        uint64_t seed, const std::vector<Vertex>& targets) {
    int mx = 0, my = 0;
    for (const auto& t : targets) {
        if (t.x < 0 || t.y < 0) throw ParameterRange("targets must be in the quadrant");
        mx = std::max(mx, t.x);
        my = std::max(my, t.y);
    }
    std::vector<std::array<double, 1>> res;
    stream_dp<1>(mx, my, targets,
                 [&](int x, int y) {
                     return std::array<std::pair<double, double>, 1>{vertex_weights(model, law, seed, x, y)};
                 },
                 res);
    std::vector<double> out;
    for (auto& r : res) out.push_back(r[0]);
    return out;
}

std::vector<SjrShapeRow> sjr_limit_shape_check(double alpha_s, const WeightLaw& law, int n,
                                               const std::vector<std::pair<double, double>>& directions,
                                               int replicas, uint64_t seed) {
    if (n < 1 || replicas < 1) throw ParameterRange("need n >= 1 and replicas >= 1");
    const ModelKind model = ModelKind::sjr(alpha_s);
    std::vector<Vertex> targets;
    for (auto [s, t] : directions) {
        if (s < 0.0 || t < 0.0) throw ParameterRange("directions must be nonnegative");
        targets.push_back({int(std::floor(n * s)), int(std::floor(n * t))});
    }
    int mx = 0, my = 0;
    for (auto& t : targets) {
        mx = std::max(mx, t.x);
        my = std::max(my, t.y);
    }
    const size_t nd = directions.size();
    std::vector<std::array<double, 3>> acc(size_t(replicas) * nd);
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < replicas; ++r) {
        const uint64_t rs = derive_seed(seed, uint64_t(r));
        std::vector<std::array<double, 3>> res;
        stream_dp<3>(mx, my, targets,
                     [&](int x, int y) {
                         const auto [a, b] = vertex_weights(model, law, rs, x, y);
                         return std::array<std::pair<double, double>, 3>{
                             std::pair{a, b}, std::pair{a, 0.0}, std::pair{0.0, b}};
                     },
                     res);
        for (size_t i = 0; i < nd; ++i) acc[size_t(r) * nd + i] = res[i];
    }
    std::vector<SjrShapeRow> rows;
    for (size_t i = 0; i < nd; ++i) {
        SjrShapeRow row;
        row.s = directions[i].first;
        row.t = directions[i].second;
        row.min_pathwise = kInf;
        double s0 = 0, s1 = 0, s2 = 0;
        for (int r = 0; r < replicas; ++r) {
            const auto& v = acc[size_t(r) * nd + i];
            s0 += v[0];
            s1 += v[1];
            s2 += v[2];
            const double m = std::max(v[1], v[2]);
            if (m > 0.0) row.min_pathwise = std::min(row.min_pathwise, v[0] / m);
        }
        row.sjr = s0 / replicas / n;
        row.horizontal = s1 / replicas / n;
        row.vertical = s2 / replicas / n;
        row.ratio = row.sjr / std::max(row.horizontal, row.vertical);
        // delta method on the per-replica ratio of means
        double var = 0.0;
        const double mden = std::max(s1, s2) / replicas;
        const bool use_h = s1 >= s2;
        for (int r = 0; r < replicas; ++r) {
            const auto& v = acc[size_t(r) * nd + i];
            const double d = (v[0] - row.ratio * (use_h ? v[1] : v[2])) / mden;
            var += d * d;
        }
        row.ratio_stderr = replicas > 1 ? std::sqrt(var / (replicas - 1) / replicas) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

double limit_shape_exp1(double s, double t) {
    if (s < 0.0 || t < 0.0) throw ParameterRange("limit shape needs s, t >= 0");
    const double d = std::sqrt(s + t) - std::sqrt(t);
    return d * d;
}

std::pair<double, double> limit_shape_gradient(double s, double t) {
    if (s < 0.0 || t < 0.0) throw ParameterRange("limit shape needs s, t >= 0");
    const double a = std::sqrt(s + t), b = std::sqrt(t);
    const double d = a - b;
    const double ds = d / a;
    const double dt = b > 0.0 ? d * (1.0 / a - 1.0 / b) : -kInf;
    return {ds, dt};
}

}  // namespace fpp
