#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fpp/laws.hpp"

namespace fpp {

enum class ModelTag : uint32_t { SWFPP = 1, SJR = 2, General = 3 };

struct ModelKind {
    ModelTag tag = ModelTag::SWFPP;
    double alpha_s = 0.5;       // SJR switch probability (horizontal)
    WeightLaw vertical{};       // General only

    static ModelKind swfpp() { return {}; }
    static ModelKind sjr(double alpha_s);
    static ModelKind general(const WeightLaw& vertical);
    std::string name() const;
};

// Weights on the quadrant grid [0,width) x [0,height), row-major by y.
// w1 at (x,y) belongs to the edge (x-1,y)->(x,y), w2 to (x,y-1)->(x,y).
struct Environment {
    int width = 0;
    int height = 0;
    ModelKind model{};
    WeightLaw law{};
    uint64_t seed = 0;
    std::vector<double> w1;
    std::vector<double> w2;

    size_t index(int x, int y) const { return size_t(y) * size_t(width) + size_t(x); }
    double h(int x, int y) const { return w1[index(x, y)]; }
    double v(int x, int y) const { return w2[index(x, y)]; }
};

// Per-vertex draw from a counter stream keyed by (row, col), independent of
// the grid extent: any sub-grid of a larger environment with the same seed agrees.
std::pair<double, double> vertex_weights(const ModelKind& model, const WeightLaw& law,
                                         uint64_t seed, int x, int y);

Environment generate_environment(const ModelKind& model, const WeightLaw& law, int width,
                                  int height, uint64_t seed);
Environment generate_environment_serial(const ModelKind& model, const WeightLaw& law, int width,
                                         int height, uint64_t seed);

enum class CompatibleFamily { H, Any };

// Law in the anchor's compatible one-parameter family with the given mean.
// Family H is the set of H-column laws and needs 0 < target < mean(anchor).
WeightLaw solve_compatible(CompatibleFamily family, const WeightLaw& anchor, double target_mean);

// Direction xi(rho) for Exp(1) SWFPP; Busemann function of H-column Exp(1+rho).
std::pair<double, double> rho_to_direction(double rho);
double direction_to_rho(double xi1);

// Binary format: magic, version, width, height, model tag, alpha_s, seed,
// law string, then w1 and w2 as little-endian f64 row-major.
void write_environment(std::ostream& os, const Environment& env);
Environment read_environment(std::istream& is);
std::string environment_to_json(const Environment& env);
Environment environment_from_json(const std::string& text);

}  // namespace fpp
