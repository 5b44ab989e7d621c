#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "fpp/environment.hpp"

namespace fpp {

struct Vertex {
    int x = 0;
    int y = 0;
    bool operator==(const Vertex&) const = default;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct PassageField {
    int width = 0;
    int height = 0;
    Vertex source{};
    std::vector<double> L;  // +inf where unreachable

    double at(int x, int y) const { return L[size_t(y) * size_t(width) + size_t(x)]; }
};

// L(v) = min(L(v-e1) + w1(v), L(v-e2) + w2(v)), L(source) = 0.
PassageField passage_field(const Environment& env, Vertex source);
// Tiled wavefront version of the same recursion (OpenMP over tile anti-diagonals).
PassageField passage_field_parallel(const Environment& env, Vertex source, int tile = 128);

struct Geodesic {
    std::vector<Vertex> path;  // source ... target
    int64_t ties = 0;          // vertices on the path where both predecessors were optimal
};

// Right-most geodesic: when both predecessors are optimal the one below is
// taken while tracing back, so the path hugs the lower-right side.
Geodesic geodesic(const Environment& env, const PassageField& field, Vertex target);

// Boundary data g on a down-right path; points of the path keep their value g.
struct BoundaryCondition {
    std::vector<Vertex> path;
    std::vector<double> g;

    // (x0+k, y0), g(x0)=0, g(x_{k+1}) - g(x_k) = I_k
    static BoundaryCondition horizontal(int x0, int y0, const std::vector<double>& I);
    // (x0, y_top-k), g(x_0)=0, g(x_{k+1}) - g(x_k) = X_k
    static BoundaryCondition vertical(int x0, int y_top, const std::vector<double>& X);
    // (x_right-k, y_bottom+k), g(x_0)=0, g(x_{k-1}) - g(x_k) = Y_k for k >= 1
    static BoundaryCondition antidiagonal(int x_right, int y_bottom, const std::vector<double>& Y);
};

// Passage time from the boundary path; points not above-right of it are +inf.
// depth >= 0 limits the computed region to depth columns/rows past the path.
PassageField boundary_passage_field(const Environment& env, const BoundaryCondition& bc,
                                    int depth = -1);

// r_n = max{r : (r,n) in R2}, R2 the vertices whose right-most geodesic from
// the origin starts with an e2 step; -1 if row n has none. Index n = 0..height-1.
std::vector<int> competition_interface(const Environment& env);

// Streaming form for large sweeps: weights are drawn per vertex on the fly.
// Returns true iff (threshold, n) is in R2, computing only the columns needed
// for each threshold (thresholds ascending). Result per threshold.
std::vector<uint8_t> competition_thresholds(const ModelKind& model, const WeightLaw& law,
                                            uint64_t seed, int n,
                                            const std::vector<int>& thresholds);

// Exp(1) SWFPP limit shape and its gradient.
double limit_shape_exp1(double s, double t);
std::pair<double, double> limit_shape_gradient(double s, double t);

// L((0,0), t) for each target, streaming rows with weights drawn on the fly;
// nothing of size width*height is stored.
std::vector<double> point_passage_times(const ModelKind& model, const WeightLaw& law,
                                        uint64_t seed, const std::vector<Vertex>& targets);

struct SjrShapeRow {
    double s = 0.0;
    double t = 0.0;
    double sjr = 0.0;   // mean L_SJR(n xi)/n
    double horizontal = 0.0;  // same env, vertical weights zeroed
    double vertical = 0.0;    // same env, horizontal weights zeroed
    double ratio = 0.0;       // sjr / max(horizontal, vertical)
    double ratio_stderr = 0.0;
    double min_pathwise = 0.0;  // smallest per-replica ratio
};

// Monte Carlo of SJR against the two one-sided models on one environment.
std::vector<SjrShapeRow> sjr_limit_shape_check(double alpha_s, const WeightLaw& law, int n,
                                               const std::vector<std::pair<double, double>>& directions,
                                               int replicas, uint64_t seed);

}  // namespace fpp
