#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fpp {

// smoke ~ 1/100 of the desk sample sizes, full ~ 100x; desk is what the
// acceptance suite runs.
enum class Budget { Smoke, Desk, Full };
Budget parse_budget(const std::string& s);
std::string budget_name(Budget b);

// Tolerances and sample sizes, read from the versioned acceptance manifest.
// Keys are "<criterion>.<name>", e.g. "3.tolerance".
struct Thresholds {
    std::string version;
    std::string path;
    std::map<std::string, double> values;

    double get(int criterion, const std::string& key) const;
    // sample-size entry scaled for the budget (at least `floor`)
    size_t count(int criterion, const std::string& key, Budget b, size_t floor = 1) const;
};
Thresholds load_thresholds(const std::string& path);

struct Check {
    std::string name;
    double value = 0.0;
    std::string bound;  // human-readable comparison, e.g. "<= 0.03"
    bool pass = true;
};

struct CriterionReport {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    std::string details;  // JSON object
    double seconds = 0.0;

    bool pass() const;
    std::string summary_line() const;
};

inline constexpr int kCriteria = 11;
std::string criterion_title(int id);
CriterionReport run_criterion(int id, const Thresholds& th, Budget budget, uint64_t seed);

// Registered Monte Carlo experiments for the `run` plumbing: id -> JSON bundle.
struct ExperimentSpec {
    std::string id;
    std::map<std::string, std::string> params;
    size_t replicas = 1;
    uint64_t seed = 0;
    bool parallel = true;
};
std::vector<std::string> experiment_ids();
// Deterministic given the ExperimentSpec; the bundle does not depend on `parallel`.
std::string run_experiment(const ExperimentSpec& spec);

}  // namespace fpp
