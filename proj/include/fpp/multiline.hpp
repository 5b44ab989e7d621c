#pragma once

#include <cstdint>
#include <vector>

#include "fpp/laws.hpp"
#include "fpp/stores.hpp"

namespace fpp {

enum class MapKind { H, A, V };

MapKind parse_map_kind(const std::string& s);
std::string map_kind_name(MapKind k);

// Table of invariant marginals. param is rho >= 0 (exponential weights) or
// c in [0,1) (Bernoulli and Bernoulli-geometric weights); V and A need param > 0.
// The discrete A rows are the law of a V-row value plus an independent H-row
// input, Ber(ac/(ac+c(1-p))) Geom+(c) (a = 1 for Bernoulli weights).
WeightLaw invariant_marginal(MapKind kind, const WeightLaw& weights, double param);
// Same, but with the discrete A rows as commonly tabulated, Ber(1-c+cp) Geom+(c)
// and Ber((ac+cp)/(ac+c)) Geom+(c). Those agree with the invariant law only at
// p = 0 or 1; kept for comparison.
WeightLaw tabulated_marginal(MapKind kind, const WeightLaw& weights, double param);
// Inverse of param -> mean of invariant_marginal.
double param_for_mean(MapKind kind, const WeightLaw& weights, double mean);
// Admissible means: (0, mean(weights)) for H, (0, inf) for V and A.
double max_invariant_mean(MapKind kind, const WeightLaw& weights);

// One update of an i.i.d. line with the given law: n post-update entries away
// from the edges (burn entries dropped where the store starts).
std::vector<double> single_map_sample(MapKind kind, const WeightLaw& weights, const WeightLaw& line, size_t n,
                                      size_t burn, uint64_t seed);

struct MeanVector {
    MapKind kind = MapKind::H;
    std::vector<double> rho;  // strictly decreasing means
    void validate(const WeightLaw& weights) const;
};

struct MultiLineSample {
    MapKind kind = MapKind::H;
    std::vector<double> means;
    std::vector<WeightLaw> laws;       // marginal of each line
    std::vector<Window> inputs;        // I^1..I^n
    std::vector<MaskedWindow> lines;   // J^1..J^n
    size_t lo = 0, hi = 0;             // common valid range [lo, hi)
};

// J^1 = I^1, J^k = H(I^k, J^{k-1}); A-kind lines use the store run right to
// left. burn entries at the upstream edge are masked.
MultiLineSample sample_multiline(const MeanVector& mv, const WeightLaw& weights, size_t window_len,
                                 uint64_t seed, size_t burn);

// Build lines from given inputs (same recursion as sample_multiline).
std::vector<MaskedWindow> multiline_from_inputs(MapKind kind, const std::vector<Window>& inputs,
                                                size_t burn);

// Apply the matching update map to every line with one shared weight window.
std::vector<MaskedWindow> update_lines(MapKind kind, const std::vector<MaskedWindow>& lines,
                                       const Window& W);

struct LppOutput {
    MaskedWindow out;
    std::vector<double> J;  // J_0..J_n
};
// D: out_k = W_k + (I_k - J_k)^+, J_{k+1} = W_k + (J_k - I_k)^+.
LppOutput lpp_d(const Window& I, const Window& W, double J0 = 0.0);
// R: out_k = I_k ^ J_k with the same J recursion.
LppOutput lpp_r(const Window& I, const Window& W, double J0 = 0.0);
// D run from right to left.
Window lpp_d_reversed(const Window& I, const Window& W);

// max |H(I,W) - sigma_{-1} R(sigma_1 W, I)| (store empty at the left edge).
double h_equals_r_residual(const Window& I, const Window& W);

struct Residual {
    double max_abs = 0.0;
    size_t compared = 0;
};

// A(<-H(Y3,Y2),Y1) against <-H(A(Y3,W^),A(Y2,Y1)), W^_k = W*_{k+1}; margin entries
// at each edge are excluded.
Residual intertwine_residual_a(const Window& Y1, const Window& Y2, const Window& Y3, size_t margin);
// V(H(X3,X2),X1) against H(V(X3,Z~),Z2) with Z2 = V(X2,X1), Z~_k = Z_{k-1},
// Z the V reverse weights; X1 are the (Bernoulli) weights.
Residual intertwine_residual_v(const Window& X1, const Window& X2, const Window& X3, size_t margin);

struct NestedSample {
    std::vector<std::vector<double>> lhs;  // (I^n, H(I^{n-1},I^n), ...)
    std::vector<std::vector<double>> rhs;  // (<-D^(n)(...), ..., I^1)
};
// rho are exponential rates, 1 > rho_1 > ... > rho_n > 0; the two sides use
// independent inputs.
NestedSample nested_h_vs_d(const std::vector<double>& rho, size_t window, uint64_t seed);

}  // namespace fpp
