#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fpp/laws.hpp"
#include "fpp/rng.hpp"

namespace fpp {

struct TestResult {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
    size_t n = 0;
    double alpha = 1e-3;
    bool pass = true;
    std::string note;
};

// Kolmogorov limiting tail P(sup|B| > lambda).
double kolmogorov_tail(double lambda);

// Continuous reference CDF.
TestResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf,
                         double alpha = 1e-3);
// Against a weight law: atoms at zero by an exact binomial test, the continuous
// part by KS on the conditioned sample; integer laws by the discrete KS
// statistic (conservative Kolmogorov p-value) together with a chi-square test.
TestResult ks_law(const std::vector<double>& samples, const WeightLaw& law, double alpha = 1e-3);
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 1e-3);
// Pearson; dof = bins - 1 - fitted.
TestResult chi_square(const std::vector<double>& observed, const std::vector<double>& expected,
                      double alpha = 1e-3, int fitted = 0);
// Merge adjacent bins (from the right) until each expected count is >= min_expected.
void pool_bins(std::vector<double>& observed, std::vector<double>& expected, double min_expected = 5.0);
// Two-sided exact binomial test of k successes in n trials.
TestResult binomial_test(uint64_t k, uint64_t n, double p, double alpha = 1e-3);

struct MeanCI {
    double mean = 0.0;
    double half_width = 0.0;
    double stderr_ = 0.0;
};
MeanCI mean_ci(const std::vector<double>& samples, double level = 0.95);
double normal_quantile(double p);
double gamma_q(double a, double x);

// Replica runner: replica i gets its own stream derived from (seed, i); results
// are stored by index so the output does not depend on the thread schedule.
// An exception from any replica is rethrown after the loop (lowest index wins).
template <class R, class F>
std::vector<R> run_replicas(size_t replicas, uint64_t seed, F&& f, bool parallel = true) {
    std::vector<R> out(replicas);
    if (parallel) {
        std::vector<std::exception_ptr> errors(replicas);
#pragma omp parallel for schedule(dynamic, 1)
        for (long long i = 0; i < (long long)replicas; ++i) {
            try {
                RngStream rng(derive_seed(seed, uint64_t(i)), 0);
                out[size_t(i)] = f(size_t(i), rng);
            } catch (...) {
                errors[size_t(i)] = std::current_exception();
            }
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (size_t i = 0; i < replicas; ++i) {
            RngStream rng(derive_seed(seed, uint64_t(i)), 0);
            out[i] = f(i, rng);
        }
    }
    return out;
}

}  // namespace fpp
