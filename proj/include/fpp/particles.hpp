#pragma once

#include <cstdint>
#include <vector>

#include "fpp/environment.hpp"
#include "fpp/laws.hpp"
#include "fpp/stats.hpp"
#include "fpp/window.hpp"

namespace fpp {

// Positions eta_k, k = offset..offset+n-1, nondecreasing; +-inf allowed at the
// ends. The particle in front of the last one sits at `front` (default +inf).
struct ParticleConfig {
    int64_t offset = 0;
    std::vector<double> eta;
    double front = INFINITY;

    bool ordered() const;
};

// eta'_k = (eta_k + W_k) ^ eta_{k+1}, all particles at once.
ParticleConfig parallel_step(const ParticleConfig& c, const Window& W);
ParticleConfig parallel_step_omp(const ParticleConfig& c, const Window& W);
// eta'_k = (eta_k + W_k) ^ eta'_{k+1}: the front particle moves first, so a
// particle can follow its neighbour's move within the same step.
ParticleConfig sequential_step(const ParticleConfig& c, const Window& W);

enum class StepKind { Parallel, Sequential };

// T steps with W_{k,t} drawn from a stream keyed by (t, k).
std::vector<ParticleConfig> run(StepKind kind, const ParticleConfig& init, int T, const WeightLaw& law,
                                uint64_t seed);

// eta_{k,t} against L(0, t e1 + k(e1 - e2)), k in [-K, 0], t in [0, T], t + k >= 0,
// started from eta_{k,0} = 0 (k <= 0) with particle 1 at +inf.
double passage_identity_residual(const Environment& env, int K, int T);

std::vector<uint8_t> occupation_from_gaps(const std::vector<double>& gaps);
std::vector<double> gaps_from_occupation(const std::vector<uint8_t>& occ);

struct ClassReport {
    double mean_before = 0.0;
    double mean_after = 0.0;
    TestResult law_before;
    TestResult law_after;
    TestResult before_vs_after;
};

struct MulticlassReport {
    std::vector<ClassReport> classes;
    bool ordered = true;  // class-k gaps dominate class-(k+1) gaps after every step
    size_t compared = 0;
    bool pass() const;
};

// Gap lines from the A-kind multiline with the given jump law (Bernoulli or
// Bernoulli-geometric), run as particle systems under parallel TASEP with
// shared jumps for T steps.
MulticlassReport multiclass_invariance_experiment(const std::vector<double>& means, const WeightLaw& jumps,
                                                  size_t window, int T, uint64_t seed, double alpha = 1e-3);

}  // namespace fpp
