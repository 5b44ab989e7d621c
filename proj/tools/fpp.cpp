// fpp: command-line front end for environments, store maps, particle systems
// and the acceptance suite. Every output file gets a sibling .json manifest
// with the full command spec, enough to replay the run.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpp/asymptotics.hpp"
#include "fpp/environment.hpp"
#include "fpp/errors.hpp"
#include "fpp/experiments.hpp"
#include "fpp/multiline.hpp"
#include "fpp/particles.hpp"
#include "fpp/percolation.hpp"
#include "fpp/stats.hpp"
#include "fpp/stores.hpp"

using json = nlohmann::json;
using namespace fpp;

namespace {

constexpr int kOk = 0, kInvalid = 1, kFailed = 2;
const char* kVersion = "1.0.0";

const char* kLawHelp =
    "law grammar: exp:RATE | berexp:P,RATE | ber:P | bergeom:P,A | geom0:C | zero";

uint64_t default_seed() {
    if (const char* s = std::getenv("FPP_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw ParameterRange(std::string("FPP_SEED is not an unsigned integer: ") + s);
        }
    }
    return 1;
}

ModelKind parse_model(const std::string& s) {
    if (s == "swfpp") return ModelKind::swfpp();
    if (s.rfind("sjr:", 0) == 0) return ModelKind::sjr(std::stod(s.substr(4)));
    if (s == "sjr") return ModelKind::sjr(0.5);
    if (s.rfind("general:", 0) == 0) return ModelKind::general(WeightLaw::parse(s.substr(8)));
    throw ParameterRange("unknown model '" + s + "' (swfpp, sjr:ALPHA, general:LAW)");
}

std::pair<int, int> parse_pair(const std::string& s, char sep, const char* what) {
    const auto p = s.find(sep);
    try {
        if (p == std::string::npos) throw std::invalid_argument(s);
        return {std::stoi(s.substr(0, p)), std::stoi(s.substr(p + 1))};
    } catch (const std::exception&) {
        throw ParameterRange(std::string(what) + " must look like A" + sep + "B, got '" + s + "'");
    }
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ParameterRange("not a number in list: '" + tok + "'");
        }
    return out;
}

size_t budget_replicas(Budget b) {
    switch (b) {
        case Budget::Smoke:
            return 100;
        case Budget::Desk:
            return 10000;
        case Budget::Full:
            return 1000000;
    }
    return 100;
}

// Common record of one invocation.
struct Run {
    std::string command;
    json spec = json::object();
    json result = json::object();
    std::string output;  // data file, if any

    json manifest() const {
        json m{{"tool", "fpp"}, {"version", kVersion}, {"command", command}, {"spec", spec}, {"result", result}};
        if (!output.empty()) m["data"] = output;
        return m;
    }
    void finish() const {
        const json m = manifest();
        if (!output.empty()) {
            std::ofstream out(output + ".json");
            if (!out) throw FormatError("cannot write " + output + ".json");
            out << m.dump(2) << "\n";
        }
        std::cout << m.dump(2) << "\n";
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    return out;
}

Environment load_or_generate(const std::string& input, const std::string& model, const std::string& law,
                             const std::string& size, uint64_t seed, json& spec) {
    if (!input.empty()) {
        std::ifstream in(input, std::ios::binary);
        if (!in) throw FormatError("cannot read " + input);
        spec["input"] = input;
        return read_environment(in);
    }
    const auto [w, h] = parse_pair(size, 'x', "--size");
    spec["model"] = model;
    spec["law"] = law;
    spec["size"] = size;
    spec["seed"] = seed;
    return generate_environment(parse_model(model), WeightLaw::parse(law), w, h, seed);
}

Window read_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path);
    Window w;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        try {
            w.values.push_back(std::stod(line.substr(0, line.find(','))));
        } catch (const std::exception&) {
            throw FormatError("bad value in " + path + ": '" + line + "'");
        }
    }
    return w;
}

Window draw(const WeightLaw& law, size_t n, uint64_t seed) {
    RngStream rng(seed);
    Window w{std::vector<double>(n)};
    for (auto& v : w.values) v = law.sample(rng);
    return w;
}

void write_masked_csv(std::ostream& os, const MaskedWindow& m) {
    os << "k,value,valid\n";
    os.precision(17);
    for (size_t k = 0; k < m.size(); ++k) os << m.window.offset + int64_t(k) << "," << m[k] << "," << int(m.valid[k]) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("first-passage percolation toolkit\n") + kLawHelp};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    uint64_t seed = 0;
    bool seed_given = false;
    std::string budget = "smoke", rep_budget = "desk";
    auto add_seed = [&](CLI::App* c) {
        c->add_option_function<uint64_t>(
            "--seed",
            [&](const uint64_t& v) {
                seed = v;
                seed_given = true;
            },
            "random seed (default: $FPP_SEED or 1)");
    };
    auto add_budget = [&](CLI::App* c, std::string& target) {
        c->add_option("--budget", target, "smoke, desk or full")
            ->check(CLI::IsMember({"smoke", "desk", "full"}))
            ->capture_default_str();
    };

    // gen-env
    std::string model = "swfpp", law = "exp:1", size = "64x64", out, input;
    auto* gen = app.add_subcommand("gen-env", "sample an environment to a binary file");
    gen->add_option("--model", model, "swfpp | sjr:ALPHA | general:VERTICAL_LAW")->capture_default_str();
    gen->add_option("--law", law, kLawHelp)->capture_default_str();
    gen->add_option("--size", size, "WIDTHxHEIGHT")->capture_default_str();
    gen->add_option("-o,--output", out, "output file (binary; .json manifest next to it)")->required();
    add_seed(gen);

    // passage
    std::string from = "0,0", to;
    auto* pas = app.add_subcommand("passage", "passage times from a source");
    pas->add_option("-i,--input", input, "environment file (otherwise generated from the flags below)");
    pas->add_option("--model", model)->capture_default_str();
    pas->add_option("--law", law, kLawHelp)->capture_default_str();
    pas->add_option("--size", size)->capture_default_str();
    pas->add_option("--from", from, "source X,Y")->capture_default_str();
    pas->add_option("--to", to, "report L at X,Y (default: far corner)");
    pas->add_option("-o,--output", out, "write the whole field as CSV");
    add_seed(pas);

    // geodesic
    auto* geo = app.add_subcommand("geodesic", "optimal path from the origin");
    geo->add_option("-i,--input", input, "environment file");
    geo->add_option("--model", model)->capture_default_str();
    geo->add_option("--law", law, kLawHelp)->capture_default_str();
    geo->add_option("--size", size)->capture_default_str();
    geo->add_option("--to", to, "target X,Y (default: far corner)");
    geo->add_option("-o,--output", out, "write the path as CSV");
    add_seed(geo);

    // map-apply
    std::string map = "h", weights = "exp:1", line_law = "exp:2", in_file, w_file;
    size_t window = 1000;
    auto* mapc = app.add_subcommand("map-apply", "apply H, A, V or the SJR update to one window");
    mapc->add_option("--map", map, "h | a | v | sjr")->check(CLI::IsMember({"h", "a", "v", "sjr"}))->capture_default_str();
    mapc->add_option("--weights", weights, "weight law")->capture_default_str();
    mapc->add_option("--line", line_law, "law of the input line")->capture_default_str();
    mapc->add_option("--input", in_file, "input line from a file (one value per line)");
    mapc->add_option("--weights-file", w_file, "weights from a file (one value per line)");
    mapc->add_option("--window", window, "window length when drawing")->capture_default_str();
    mapc->add_option("-o,--output", out, "write k,value,valid CSV");
    add_seed(mapc);

    // multiline
    std::string means;
    size_t burn = 1000;
    auto* ml = app.add_subcommand("multiline", "sample a multiline configuration");
    ml->add_option("--map", map, "h | a | v")->check(CLI::IsMember({"h", "a", "v"}))->capture_default_str();
    ml->add_option("--weights", weights, "weight law")->capture_default_str();
    ml->add_option("--means", means, "strictly decreasing line means, comma separated")->required();
    ml->add_option("--window", window)->capture_default_str();
    ml->add_option("--burn", burn)->capture_default_str();
    ml->add_option("-o,--output", out, "binary line data (.json manifest next to it)");
    add_seed(ml);

    // invariance
    double param = 0.5, alpha = 1e-3;
    auto* inv = app.add_subcommand("invariance", "one-sample KS of a map output against its invariant marginal");
    inv->add_option("--map", map, "h | a | v")->check(CLI::IsMember({"h", "a", "v"}))->capture_default_str();
    inv->add_option("--weights", weights, "weight law")->capture_default_str();
    inv->add_option("--param", param, "rho (exponential weights) or c (discrete weights)")->capture_default_str();
    inv->add_option("--window", window, "entries tested")->capture_default_str();
    inv->add_option("--burn", burn)->capture_default_str();
    inv->add_option("--alpha", alpha)->capture_default_str();
    add_seed(inv);

    // intertwine
    auto* itw = app.add_subcommand("intertwine", "exact intertwining residual");
    itw->add_option("--map", map, "a | v")->check(CLI::IsMember({"a", "v"}))->capture_default_str();
    itw->add_option("--window", window)->capture_default_str();
    add_seed(itw);

    // tasep
    std::string kind = "parallel", gaps = "geom0:0.5";
    size_t particles = 100;
    int steps = 100;
    auto* tas = app.add_subcommand("tasep", "run discrete-time TASEP");
    tas->add_option("--kind", kind, "parallel | sequential")->check(CLI::IsMember({"parallel", "sequential"}))->capture_default_str();
    tas->add_option("--jumps", law, "jump law")->capture_default_str();
    tas->add_option("--gaps", gaps, "law of the initial gaps")->capture_default_str();
    tas->add_option("--particles", particles)->capture_default_str();
    tas->add_option("--steps", steps)->capture_default_str();
    tas->add_option("-o,--output", out, "final positions as CSV");
    add_seed(tas);

    // branch, convoy, competition: replica experiments
    double t = 0.5, rho = 1.0;
    double level = 1e6, n_len = 1e6;
    int n_comp = 64, column = -1;
    size_t replicas = 0;
    auto* br = app.add_subcommand("branch", "branch process value at time t");
    br->add_option("--t", t)->capture_default_str();
    br->add_option("--level", level, "level cap")->capture_default_str();
    auto* cv = app.add_subcommand("convoy", "convoy renewal count / sqrt(n)");
    cv->add_option("--rho", rho)->capture_default_str();
    cv->add_option("--n", n_len)->capture_default_str();
    auto* cp = app.add_subcommand("competition", "P(r_n >= column) for the competition interface");
    cp->add_option("--n", n_comp)->capture_default_str();
    cp->add_option("--column", column, "threshold column (default 3n)");
    for (auto* c : {br, cv, cp}) {
        c->add_option("--replicas", replicas, "override the budget replica count");
        c->add_flag("--serial", "run replicas serially");
        add_budget(c, budget);
        add_seed(c);
    }

    // reproduce-all
    std::string thresholds = FPP_THRESHOLDS_DEFAULT, details;
    std::vector<int> criteria;
    auto* rep = app.add_subcommand("reproduce-all", "run the acceptance suite; exit 0 iff every criterion passes");
    rep->add_option("--thresholds", thresholds)->capture_default_str();
    rep->add_option("-c,--criterion", criteria, "subset of criteria")->check(CLI::Range(1, kCriteria));
    rep->add_option("--details", details, "append per-criterion JSON lines here");
    add_budget(rep, rep_budget);
    add_seed(rep);

    // plot-data
    std::string what = "sigma-series";
    auto* pd = app.add_subcommand("plot-data", "CSV series for figures");
    pd->add_option("--what", what, "sigma-series | limit-shape | branch-growth | convoy-candidates")
        ->check(CLI::IsMember({"sigma-series", "limit-shape", "branch-growth", "convoy-candidates"}))
        ->capture_default_str();
    pd->add_option("--rho", rho, "walk parameter")->capture_default_str();
    pd->add_option("--replicas", replicas);
    pd->add_option("-o,--output", out, "CSV file (default stdout)");
    add_seed(pd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (!seed_given) seed = default_seed();
        Run rec;
        rec.command = app.get_subcommands().front()->get_name();
        rec.spec["seed"] = seed;
        rec.output = out;

        if (*gen) {
            const auto [w, h] = parse_pair(size, 'x', "--size");
            const Environment env = generate_environment(parse_model(model), WeightLaw::parse(law), w, h, seed);
            auto os = open_out(out);
            write_environment(os, env);
            rec.spec.update({{"model", model}, {"law", law}, {"size", size}});
            rec.result = {{"width", w}, {"height", h}, {"format", "fpp binary environment"}};
            rec.finish();
            return kOk;
        }

        if (*pas || *geo) {
            const Environment env = load_or_generate(input, model, law, size, seed, rec.spec);
            const Vertex src = *pas ? Vertex{parse_pair(from, ',', "--from").first, parse_pair(from, ',', "--from").second}
                                    : Vertex{0, 0};
            if (src.x < 0 || src.y < 0 || src.x >= env.width || src.y >= env.height)
                throw ParameterRange("source outside the environment");
            Vertex tgt{env.width - 1, env.height - 1};
            if (!to.empty()) {
                const auto p = parse_pair(to, ',', "--to");
                tgt = {p.first, p.second};
            }
            if (tgt.x < 0 || tgt.y < 0 || tgt.x >= env.width || tgt.y >= env.height)
                throw ParameterRange("target outside the environment");
            const PassageField f = passage_field_parallel(env, src);
            rec.spec["from"] = {src.x, src.y};
            rec.spec["to"] = {tgt.x, tgt.y};
            rec.result["passage_time"] = f.at(tgt.x, tgt.y);
            if (*pas && !out.empty()) {
                auto os = open_out(out);
                os.precision(17);
                os << "x,y,L\n";
                for (int y = 0; y < f.height; ++y)
                    for (int x = 0; x < f.width; ++x) os << x << "," << y << "," << f.at(x, y) << "\n";
            }
            if (*geo) {
                const Geodesic g = geodesic(env, f, tgt);
                rec.result["length"] = g.path.size();
                rec.result["ties"] = g.ties;
                if (!out.empty()) {
                    auto os = open_out(out);
                    os << "x,y\n";
                    for (const Vertex& v : g.path) os << v.x << "," << v.y << "\n";
                }
            }
            rec.finish();
            return kOk;
        }

        if (*mapc) {
            const WeightLaw wl = WeightLaw::parse(weights);
            Window I = in_file.empty() ? draw(WeightLaw::parse(line_law), window, derive_seed(seed, 1)) : read_column(in_file);
            Window W = w_file.empty() ? draw(wl, I.size(), derive_seed(seed, 2)) : read_column(w_file);
            rec.spec.update({{"map", map}, {"weights", w_file.empty() ? weights : "file:" + w_file},
                             {"line", in_file.empty() ? line_law : "file:" + in_file}, {"window", I.size()}});
            MaskedWindow o;
            if (map == "h") o = h_map(I, W);
            else if (map == "a") o = a_map(I, W);
            else if (map == "v") o = v_map(I, W);
            else {
                const Window s = sjr_update(I, W);
                o = MaskedWindow{s, std::vector<uint8_t>(s.size(), 1)};
            }
            size_t valid = 0;
            double sum = 0.0;
            for (size_t k = 0; k < o.size(); ++k)
                if (o.valid[k]) {
                    ++valid;
                    sum += o[k];
                }
            rec.result = {{"valid", valid}, {"mean", valid ? sum / double(valid) : 0.0}};
            if (!out.empty()) {
                auto os = open_out(out);
                write_masked_csv(os, o);
            }
            rec.finish();
            return kOk;
        }

        if (*ml) {
            const WeightLaw wl = WeightLaw::parse(weights);
            const MeanVector mv{parse_map_kind(map), parse_list(means)};
            const MultiLineSample s = sample_multiline(mv, wl, window, seed, burn);
            rec.spec.update({{"map", map}, {"weights", weights}, {"means", mv.rho}, {"window", window}, {"burn", burn}});
            json laws = json::array();
            for (const auto& l : s.laws) laws.push_back(l.to_string());
            rec.result = {{"laws", laws}, {"valid_range", {s.lo, s.hi}}, {"lines", s.lines.size()}};
            if (!out.empty()) {
                // per line: window values (float64, little endian) then validity bytes
                auto os = open_out(out);
                for (const auto& l : s.lines) {
                    os.write(reinterpret_cast<const char*>(l.window.values.data()),
                             std::streamsize(l.window.values.size() * sizeof(double)));
                    os.write(reinterpret_cast<const char*>(l.valid.data()), std::streamsize(l.valid.size()));
                }
                rec.result["layout"] = "lines x (window float64 values, window uint8 valid flags)";
            }
            rec.finish();
            return kOk;
        }

        if (*inv) {
            const WeightLaw wl = WeightLaw::parse(weights);
            const MapKind mk = parse_map_kind(map);
            const WeightLaw line = invariant_marginal(mk, wl, param);
            const TestResult r = ks_law(single_map_sample(mk, wl, line, window, burn, seed), line, alpha);
            rec.spec.update({{"map", map}, {"weights", weights}, {"param", param}, {"window", window},
                             {"burn", burn}, {"alpha", alpha}});
            rec.result = {{"law", line.to_string()}, {"statistic", r.statistic}, {"p_value", r.p_value},
                          {"n", r.n}, {"pass", r.pass}, {"note", r.note}};
            rec.finish();
            return r.pass ? kOk : kFailed;
        }

        if (*itw) {
            rec.spec.update({{"map", map}, {"window", window}});
            Residual r;
            if (map == "a") {
                // dyadic draws keep both sides exact
                auto dy = [&](double rate, uint64_t tag) {
                    Window w = draw(WeightLaw::exponential(rate), window, derive_seed(seed, tag));
                    for (auto& v : w.values) v = std::ldexp(std::round(std::ldexp(v, 20)), -20);
                    return w;
                };
                r = intertwine_residual_a(dy(1.0, 1), dy(1.0, 2), dy(2.0, 3), 1);
            } else {
                r = intertwine_residual_v(draw(WeightLaw::bernoulli(0.5), window, derive_seed(seed, 1)),
                                          draw(WeightLaw::geom0(0.4), window, derive_seed(seed, 2)),
                                          draw(WeightLaw::geom0(0.6), window, derive_seed(seed, 3)), 1);
            }
            rec.result = {{"residual", r.max_abs}, {"compared", r.compared}};
            rec.finish();
            return kOk;
        }

        if (*tas) {
            if (steps < 0) throw ParameterRange("--steps must be >= 0");
            const WeightLaw gl = WeightLaw::parse(gaps);
            RngStream rng(derive_seed(seed, 1));
            ParticleConfig c;
            double x = 0.0;
            for (size_t i = 0; i < particles; ++i) {
                c.eta.push_back(x);
                x += gl.sample(rng);
            }
            const auto traj = run(kind == "parallel" ? StepKind::Parallel : StepKind::Sequential, c, steps,
                                  WeightLaw::parse(law), derive_seed(seed, 2));
            const ParticleConfig& fin = traj.back();
            rec.spec.update({{"kind", kind}, {"jumps", law}, {"gaps", gaps}, {"particles", particles}, {"steps", steps}});
            rec.result = {{"first", fin.eta.empty() ? 0.0 : fin.eta.front()},
                          {"last", fin.eta.empty() ? 0.0 : fin.eta.back()}, {"ordered", fin.ordered()}};
            if (!out.empty()) {
                auto os = open_out(out);
                os.precision(17);
                os << "k,initial,final\n";
                for (size_t k = 0; k < fin.eta.size(); ++k) os << k << "," << c.eta[k] << "," << fin.eta[k] << "\n";
            }
            rec.finish();
            return kOk;
        }

        if (*br || *cv || *cp) {
            auto* sub = app.get_subcommands().front();
            ExperimentSpec s;
            s.seed = seed;
            s.replicas = replicas ? replicas : budget_replicas(parse_budget(budget));
            s.parallel = sub->count("--serial") == 0;
            if (*br) {
                s.id = "branch";
                s.params = {{"t", std::to_string(t)}, {"level", std::to_string(level)}};
            } else if (*cv) {
                s.id = "convoy";
                s.params = {{"rho", std::to_string(rho)}, {"n", std::to_string(n_len)}};
            } else {
                s.id = "competition";
                s.params = {{"n", std::to_string(n_comp)}, {"column", std::to_string(column < 0 ? 3 * n_comp : column)}};
            }
            rec.spec.update({{"budget", budget}, {"replicas", s.replicas}, {"params", s.params}});
            json bundle = json::parse(run_experiment(s));
            bundle.erase("values");
            rec.result = bundle;
            rec.finish();
            return kOk;
        }

        if (*rep) {
            const Thresholds th = load_thresholds(thresholds);
            if (criteria.empty())
                for (int i = 1; i <= kCriteria; ++i) criteria.push_back(i);
            bool all = true;
            json lines = json::array();
            for (int id : criteria) {
                const CriterionReport r = run_criterion(id, th, parse_budget(rep_budget), seed);
                std::cerr << r.summary_line() << "\n";
                lines.push_back({{"id", id}, {"title", r.title}, {"pass", r.pass()}, {"seconds", r.seconds}});
                if (!details.empty()) {
                    std::ofstream d(details, std::ios::app);
                    d << r.details << "\n";
                }
                all = all && r.pass();
            }
            rec.spec.update({{"budget", rep_budget}, {"thresholds", th.path}, {"thresholds_version", th.version},
                             {"criteria", criteria}});
            rec.result = {{"criteria", lines}, {"all_pass", all}};
            rec.finish();
            return all ? kOk : kFailed;
        }

        if (*pd) {
            std::ofstream file;
            if (!out.empty()) file = open_out(out);
            std::ostream& os = out.empty() ? std::cout : file;
            os.precision(12);
            rec.spec.update({{"what", what}, {"rho", rho}});
            if (what == "sigma-series") {
                const WalkParams w = step_probabilities(rho);
                const auto p = sigma_series(w.beta, 1000);
                os << "k,p,k32p\n";
                for (size_t k = 0; k < p.size(); ++k) os << k << "," << p[k] << "," << p[k] * std::pow(double(k), 1.5) << "\n";
                rec.result["tail_constant"] = sigma_tail_constant(w);
            } else if (what == "limit-shape") {
                os << "s,t,g\n";
                for (int i = 0; i <= 100; ++i) {
                    const double s = i / 100.0;
                    os << s << "," << 1.0 - s << "," << limit_shape_exp1(s, 1.0 - s) << "\n";
                }
            } else if (what == "branch-growth") {
                const std::vector<int64_t> Ns{10, 100, 1000, 10000, 100000, 1000000};
                const size_t reps = replicas ? replicas : 200;
                os << "N,mean_count,mean_ratio,stderr_ratio\n";
                for (const auto& r : branch_growth_experiment(Ns, reps, seed))
                    os << r.N << "," << r.mean_count << "," << r.mean_ratio << "," << r.stderr_ratio << "\n";
                rec.spec["replicas"] = reps;
            } else {
                os << "rho,long_form,simplified_form,thinned_form\n";
                for (double r : {0.25, 0.5, 1.0, 2.0, 4.0}) {
                    const ConvoyCandidates c = convoy_constant_candidates(r);
                    os << r << "," << c.long_form << "," << c.simplified_form << "," << c.thinned_form << "\n";
                }
            }
            if (!out.empty()) rec.finish();
            return kOk;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: invalid argument: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}
