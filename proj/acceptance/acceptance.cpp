// Acceptance runner: one PASS/FAIL line per criterion, details as JSON.
#include <fstream>
#include <iostream>
#include <vector>

#include "CLI11.hpp"

#include "fpp/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::vector<int> criteria;
    std::string budget = "desk";
    std::string thresholds = FPP_THRESHOLDS;
    std::string details;
    uint64_t seed = 20240607;
    app.add_option("-c,--criterion", criteria, "criterion ids (default: all)")->check(CLI::Range(1, fpp::kCriteria));
    app.add_option("--budget", budget, "smoke, desk or full")->check(CLI::IsMember({"smoke", "desk", "full"}));
    app.add_option("--thresholds", thresholds, "threshold manifest");
    app.add_option("--details", details, "append per-criterion JSON lines to this file");
    app.add_option("--seed", seed, "base seed");
    CLI11_PARSE(app, argc, argv);
    if (criteria.empty())
        for (int i = 1; i <= fpp::kCriteria; ++i) criteria.push_back(i);

    try {
        const fpp::Thresholds th = fpp::load_thresholds(thresholds);
        std::cout << "thresholds " << th.path << " version " << th.version << ", budget " << budget << "\n";
        bool all = true;
        for (int id : criteria) {
            const fpp::CriterionReport r = fpp::run_criterion(id, th, fpp::parse_budget(budget), seed);
            std::cout << r.summary_line() << "\n";
            for (const auto& c : r.checks)
                std::cout << "    " << (c.pass ? "ok  " : "FAIL") << " " << c.name << " = " << c.value << " "
                          << c.bound << "\n";
            std::cout << "    details " << r.details << "\n" << std::flush;
            if (!details.empty()) {
                std::ofstream out(details, std::ios::app);
                out << r.details << "\n";
            }
            all = all && r.pass();
        }
        return all ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
