#include "fpp/particles.hpp"

#include <algorithm>
#include <cmath>

#include "fpp/errors.hpp"
#include "fpp/multiline.hpp"
#include "fpp/percolation.hpp"

namespace fpp {

bool ParticleConfig::ordered() const {
    for (size_t k = 0; k + 1 < eta.size(); ++k)
        if (eta[k] > eta[k + 1]) return false;
    return eta.empty() || eta.back() <= front;
}

static void check_step(const ParticleConfig& c, const Window& W) {
    if (W.size() != c.eta.size()) throw MisalignedWindows("jump window must match the particle window");
}

ParticleConfig parallel_step(const ParticleConfig& c, const Window& W) {
    check_step(c, W);
    ParticleConfig o = c;
    const size_t n = c.eta.size();
    for (size_t k = 0; k < n; ++k) {
        const double ahead = k + 1 < n ? c.eta[k + 1] : c.front;
        o.eta[k] = std::min(c.eta[k] + W[k], ahead);
    }
    return o;
}

ParticleConfig parallel_step_omp(const ParticleConfig& c, const Window& W) {
    check_step(c, W);
    ParticleConfig o = c;
    const long long n = (long long)c.eta.size();
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < n; ++k) {
        const double ahead = k + 1 < n ? c.eta[size_t(k) + 1] : c.front;
        o.eta[size_t(k)] = std::min(c.eta[size_t(k)] + W[size_t(k)], ahead);
    }
    return o;
}

ParticleConfig sequential_step(const ParticleConfig& c, const Window& W) {
    check_step(c, W);
    ParticleConfig o = c;
    double ahead = c.front;
    for (size_t k = c.eta.size(); k-- > 0;) {
        o.eta[k] = std::min(c.eta[k] + W[k], ahead);
        ahead = o.eta[k];
    }
    return o;
}

std::vector<ParticleConfig> run(StepKind kind, const ParticleConfig& init, int T, const WeightLaw& law,
                                uint64_t seed) {
    if (T < 0) throw ParameterRange("T must be >= 0");
    law.validate();
    std::vector<ParticleConfig> traj{init};
    Window W{std::vector<double>(init.eta.size())};
    for (int t = 0; t < T; ++t) {
        for (size_t k = 0; k < W.size(); ++k) {
            RngStream rng = site_rng(seed, t, init.offset + int64_t(k));
            W[k] = law.sample(rng);
        }
        traj.push_back(kind == StepKind::Parallel ? parallel_step(traj.back(), W)
                                                  : sequential_step(traj.back(), W));
    }
    return traj;
}

double passage_identity_residual(const Environment& env, int K, int T) {
    if (K < 0 || T < 0) throw ParameterRange("K and T must be >= 0");
    if (env.model.tag != ModelTag::SWFPP) throw ParameterRange("passage identity needs an SWFPP environment");
    if (env.width < T + 2 || env.height < K + 1) throw InsufficientWindow("environment too small for the index ranges");
    const PassageField f = passage_field(env, {0, 0});
    ParticleConfig c;
    c.offset = -K;
    c.eta.assign(size_t(K) + 1, 0.0);
    double res = 0.0;
    Window W{std::vector<double>(size_t(K) + 1)};
    for (int t = 0;; ++t) {
        for (int k = -K; k <= 0; ++k) {
            if (t + k < 0) continue;
            res = std::max(res, std::abs(c.eta[size_t(k + K)] - f.at(t + k, -k)));
        }
        if (t == T) break;
        for (int k = -K; k <= 0; ++k) {
            const int x = t + 1 + k;
            W[size_t(k + K)] = x >= 1 ? env.h(x, -k) : 0.0;  // x <= 0: particle is jammed
        }
        c = parallel_step(c, W);
    }
    return res;
}

std::vector<uint8_t> occupation_from_gaps(const std::vector<double>& gaps) {
    std::vector<uint8_t> occ{1};
    for (double g : gaps) {
        if (g < 0.0 || g != std::floor(g)) throw ParameterRange("gaps must be nonnegative integers");
        occ.insert(occ.end(), size_t(g), 0);
        occ.push_back(1);
    }
    return occ;
}

std::vector<double> gaps_from_occupation(const std::vector<uint8_t>& occ) {
    std::vector<double> gaps;
    bool seen = false;
    double run = 0.0;
    for (uint8_t o : occ) {
        if (o) {
            if (seen) gaps.push_back(run);
            seen = true;
            run = 0.0;
        } else if (seen) {
            run += 1.0;
        }
    }
    return gaps;
}

bool MulticlassReport::pass() const {
    if (!ordered) return false;
    for (const auto& c : classes)
        if (!c.law_before.pass || !c.law_after.pass || !c.before_vs_after.pass) return false;
    return true;
}

MulticlassReport multiclass_invariance_experiment(const std::vector<double>& means, const WeightLaw& jumps,
                                                  size_t window, int T, uint64_t seed, double alpha) {
    if (jumps.kind != LawKind::Bernoulli && jumps.kind != LawKind::BerGeomPlus)
        throw InvalidLaw("multiclass experiment needs Bernoulli or Bernoulli-geometric jumps");
    if (T < 0) throw ParameterRange("T must be >= 0");
    const size_t burn = window / 10;
    const MultiLineSample ml = sample_multiline(MeanVector{MapKind::A, means}, jumps, window, seed, burn);
    const size_t n = ml.lines.size();
    // particle gaps run opposite to the A-map index: G_i = Y_{m-1-i}
    std::vector<ParticleConfig> sys(n);
    std::vector<std::vector<double>> before(n);
    for (size_t c = 0; c < n; ++c) {
        const auto& y = ml.lines[c].window.values;
        sys[c].eta.assign(window + 1, 0.0);
        for (size_t i = 0; i < window; ++i) sys[c].eta[i + 1] = sys[c].eta[i] + y[window - 1 - i];
    }
    // valid gap indices: the multiline's own burn-in sits at the rear, the
    // free front particle disturbs one more gap per step
    const size_t lo = burn + window / 10;
    const size_t hi = window > size_t(T) + 1 + window / 10 ? window - size_t(T) - 1 - window / 10 : lo;
    if (hi <= lo + 10) throw InsufficientWindow("window too short for T steps");
    auto gaps = [&](const ParticleConfig& p) {
        std::vector<double> g;
        for (size_t i = lo; i < hi; ++i) g.push_back(p.eta[i + 1] - p.eta[i]);
        return g;
    };
    for (size_t c = 0; c < n; ++c) before[c] = gaps(sys[c]);
    MulticlassReport rep;
    Window W{std::vector<double>(window + 1)};
    for (int t = 0; t < T; ++t) {
        for (size_t i = 0; i <= window; ++i) {
            RngStream rng = site_rng(derive_seed(seed, 0x7A5E), t, int64_t(i));
            W[i] = jumps.sample(rng);
        }
        for (auto& s : sys) s = parallel_step(s, W);
        for (size_t c = 0; c + 1 < n; ++c)
            for (size_t i = lo; i < hi; ++i)
                if (sys[c].eta[i + 1] - sys[c].eta[i] < sys[c + 1].eta[i + 1] - sys[c + 1].eta[i]) rep.ordered = false;
    }
    for (size_t c = 0; c < n; ++c) {
        ClassReport cr;
        const auto after = gaps(sys[c]);
        for (double v : before[c]) cr.mean_before += v;
        for (double v : after) cr.mean_after += v;
        cr.mean_before /= double(before[c].size());
        cr.mean_after /= double(after.size());
        cr.law_before = ks_law(before[c], ml.laws[c], alpha);
        cr.law_after = ks_law(after, ml.laws[c], alpha);
        cr.before_vs_after = ks_two_sample(before[c], after, alpha);
        rep.classes.push_back(cr);
    }
    rep.compared = hi - lo;
    return rep;
}

}  // namespace fpp
