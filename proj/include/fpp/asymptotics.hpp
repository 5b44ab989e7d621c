#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fpp/environment.hpp"
#include "fpp/percolation.hpp"
#include "fpp/window.hpp"
#include "fpp/rng.hpp"

namespace fpp {

// Walk S_k = sum (X2_j - X1_j), X^i ~ Ber(q_i) Exp(rho_i), q_i = 1/(1+rho_i).
struct WalkParams {
    double rho1 = 1.0, rho2 = 1.0;
    double q1 = 0.5, q2 = 0.5;
    double beta = 0.25;  // = p_flat; rho^2/(1+rho)^2 when the rates agree
    double p_up = 0.0, p_flat = 0.0, p_down = 0.0;
    double q_up = 0.0, q_flat = 0.0;
    double p_down_down = 0.0;  // P(X2 = 0 | step down)
};

WalkParams step_probabilities(double rho1, double rho2);
inline WalkParams step_probabilities(double rho) { return step_probabilities(rho, rho); }

struct WalkStep {
    double dx = 0.0;
    bool pure_down = false;  // X2 = 0 < X1
};
WalkStep walk_step(const WalkParams& w, RngStream& rng);

// A stopping time, or the fact that it exceeded `cap` steps.
struct StopTime {
    uint64_t value = 0;
    bool censored = false;
};

inline constexpr uint64_t kDefaultCap = 100000000ULL;

// tau = min{k >= 1 : S_k < S_{k-1} <= min_{j<k} S_j}; the flag reports
// whether the terminating down step was a pure one.
struct TauDraw {
    StopTime time;
    bool pure_down = false;
};
TauDraw sample_tau_censored(const WalkParams& w, RngStream& rng, uint64_t cap);
// Throws CapExceeded past the cap.
uint64_t sample_walk_tau(const WalkParams& w, RngStream& rng, uint64_t cap = kDefaultCap);

// Literal: sigma = min{k >= 1 : S_k <= 0} given S_1 >= 0 (a flat first step gives 1).
// GeneratingFunction: the first step is conditioned strictly positive and the
// subsequent steps are counted, so the value is >= 1 with law f~.
enum class SigmaReading { Literal, GeneratingFunction };

StopTime sample_sigma_censored(const WalkParams& w, RngStream& rng, SigmaReading reading, uint64_t cap);
uint64_t sample_sigma(const WalkParams& w, RngStream& rng, SigmaReading reading = SigmaReading::GeneratingFunction,
                      uint64_t cap = kDefaultCap);

// Taylor coefficients p~_0..p~_K of f~(z) = (sqrt(1-bz) - sqrt(1-z)) / (sqrt(1-bz) + sqrt(1-z)).
std::vector<double> sigma_series(double beta, size_t K);
// Leading constant of p~_k k^{3/2}.
double sigma_tail_constant(const WalkParams& w);
double sigma_tail_constant(double beta);
// E exp(i theta sigma~) = f~(e^{i theta}).
std::complex<double> sigma_cf(double beta, double theta);

// (1 - alpha) / (L Gamma(1 + alpha) Gamma(2 - alpha)).
double erickson_limit(double alpha, double L);
// Tail constant of the literal sigma, P(sigma > x) ~ L x^{-1/2}.
double sigma_literal_tail_L(const WalkParams& w);
// sqrt(1 - beta) / (q_up sqrt(pi)).
double sigma_renewal_constant(const WalkParams& w);

struct RenewalSet {
    uint64_t n = 0;
    std::vector<uint64_t> points;  // sorted, in [0, n]
};

// Renewals at 0, sigma_1, sigma_1 + sigma_2, ... up to n.
RenewalSet sigma_renewals(const WalkParams& w, uint64_t n, RngStream& rng, SigmaReading reading);

// Renewal set with holding times sum_{i<=Z} tau^i, Z ~ Geom+(p_down_down),
// for rates (rho1, rho2); 0 is always a point.
RenewalSet convoy_sample(const WalkParams& w, uint64_t n, RngStream& rng);
inline RenewalSet convoy_sample(double rho, uint64_t n, RngStream& rng) {
    return convoy_sample(step_probabilities(rho), n, rng);
}
// `count` consecutive holding times; needs rho1 < rho2 for a finite mean.
std::vector<uint64_t> convoy_gaps(const WalkParams& w, size_t count, RngStream& rng,
                                  uint64_t cap = kDefaultCap);

struct ConvoyCandidates {
    double long_form = 0.0;        // p_down sqrt(1-beta) / (p_dd (1 - p_down) q_up sqrt(pi))
    double simplified_form = 0.0;  // (1 + 2 rho) / (2 rho sqrt(pi (1 + rho^2)))
    double thinned_form = 0.0;     // p_dd p_down sqrt(1-beta) / ((1 - p_down) q_up sqrt(pi))
};
ConvoyCandidates convoy_constant_candidates(double rho);

struct JumpTrajectory {
    std::vector<double> d;      // jump times, d[0] = 0
    std::vector<double> s;      // 1 - d, kept separately for precision near 1
    std::vector<int64_t> b;     // values, strictly increasing, b[0] = 0
    bool reached_level = false;

    int64_t value_at(double t) const;
};

// Jump times by inverting P(d_{k+1} <= t) = t^b (1 - (1-t)/(1-d_k)); values from
// the one-sided store recursion on fresh inputs Ber(1-t) Exp(t/(1-t)) per line.
// Stops at the first jump time past t_max or once b >= level_cap.
JumpTrajectory branch_process_sample(double t_max, int64_t level_cap, RngStream& rng);
// Inverse of the jump-time CDF in the s = 1 - t coordinate.
double branch_next_s(double s_prev, int64_t b, double u);

// Distinct values below N.
int64_t branch_count(const JumpTrajectory& traj, int64_t N);

struct BranchGrowthRow {
    int64_t N = 0;
    double mean_count = 0.0;
    double mean_ratio = 0.0;  // mean B(N) / ln N
    double stderr_ratio = 0.0;
};
std::vector<BranchGrowthRow> branch_growth_experiment(const std::vector<int64_t>& Ns, size_t replicas,
                                                      uint64_t seed);

// Vertical Busemann increments X_y(j) = G_j(y+1) - G_j(y), one per rho, on every
// column of an SWFPP environment. The rightmost column is sampled as a joint
// V-kind multiline and pushed left with v_map.
struct BusemannColumns {
    std::vector<double> rho;                            // ascending
    std::vector<std::vector<MaskedWindow>> columns;     // [rho][column]
};
BusemannColumns busemann_columns(const Environment& env, const std::vector<double>& rho, uint64_t seed,
                                 size_t burn);

// Up when the increment is zero, otherwise right; stops at an invalid entry or
// the last column.
std::vector<Vertex> busemann_geodesic(const BusemannColumns& bc, size_t which, Vertex start = {});

struct HighwayFan {
    std::vector<std::vector<Vertex>> paths;
};
HighwayFan busemann_geodesic_fan(const Environment& env, const std::vector<double>& rho, uint64_t seed,
                                 size_t burn);
// Number of heights y <= n at which some fan path steps from column k to k+1.
int64_t highways_column_count(const HighwayFan& fan, int k, int n);

// Whether the vertical Busemann increment at the origin is zero, built from a
// single-rho column `columns` to the right and pushed back with v_map.
bool busemann_origin_zero(double rho, int columns, int height, uint64_t seed);

// Number of nonzero lines of a V-kind multiline over the rho grid at each
// height; rho* at that height falls in the matching grid cell.
std::vector<int> critical_angle_levels(const std::vector<double>& rho_ascending, size_t window,
                                       size_t burn, uint64_t seed);

struct AdjacentOrdering {
    double greater = 0.0;  // P(xi*(0) > xi*(e2)) = P(fewer nonzero lines at 0)
    double equal = 0.0;
    double less = 0.0;
    size_t pairs = 0;
};
AdjacentOrdering adjacent_ordering(const std::vector<int>& levels);

}  // namespace fpp
