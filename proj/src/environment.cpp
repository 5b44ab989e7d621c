#include "fpp/environment.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "fpp/errors.hpp"

namespace fpp {

namespace {

constexpr char kMagic[8] = {'F', 'P', 'P', 'E', 'N', 'V', '0', '1'};
constexpr uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated environment file");
    return v;
}

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) throw ParameterRange("environment dimensions must be positive");
}

}  // namespace

ModelKind ModelKind::sjr(double alpha_s) {
    if (!(alpha_s > 0.0 && alpha_s < 1.0)) throw ParameterRange("sjr: need 0 < alpha_s < 1");
    ModelKind m;
    m.tag = ModelTag::SJR;
    m.alpha_s = alpha_s;
    return m;
}

ModelKind ModelKind::general(const WeightLaw& vertical) {
    vertical.validate();
    ModelKind m;
    m.tag = ModelTag::General;
    m.vertical = vertical;
    return m;
}

std::string ModelKind::name() const {
    switch (tag) {
        case ModelTag::SWFPP:
            return "swfpp";
        case ModelTag::SJR:
            return "sjr";
        case ModelTag::General:
            return "general";
    }
    return "?";
}

std::pair<double, double> vertex_weights(const ModelKind& model, const WeightLaw& law,
                                         uint64_t seed, int x, int y) {
    RngStream rng = site_rng(seed, y, x);
    switch (model.tag) {
        case ModelTag::SWFPP:
            return {law.sample(rng), 0.0};
        case ModelTag::SJR: {
            const bool horizontal = rng.uniform() < model.alpha_s;
            const double w = law.sample(rng);
            return horizontal ? std::pair{w, 0.0} : std::pair{0.0, w};
        }
        case ModelTag::General: {
            const double a = law.sample(rng);
            return {a, model.vertical.sample(rng)};
        }
    }
    return {0.0, 0.0};
}

static Environment blank(const ModelKind& model, const WeightLaw& law, int width, int height,
                         uint64_t seed) {
    check_dims(width, height);
    law.validate();
    Environment env;
    env.width = width;
    env.height = height;
    env.model = model;
    env.law = law;
    env.seed = seed;
    env.w1.assign(size_t(width) * size_t(height), 0.0);
    env.w2.assign(size_t(width) * size_t(height), 0.0);
    return env;
}

Environment generate_environment(const ModelKind& model, const WeightLaw& law, int width,
                                  int height, uint64_t seed) {
    Environment env = blank(model, law, width, height, seed);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const auto [a, b] = vertex_weights(model, law, seed, x, y);
            env.w1[env.index(x, y)] = a;
            env.w2[env.index(x, y)] = b;
        }
    }
    return env;
}

Environment generate_environment_serial(const ModelKind& model, const WeightLaw& law, int width,
                                         int height, uint64_t seed) {
    Environment env = blank(model, law, width, height, seed);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const auto [a, b] = vertex_weights(model, law, seed, x, y);
            env.w1[env.index(x, y)] = a;
            env.w2[env.index(x, y)] = b;
        }
    }
    return env;
}

static WeightLaw exp_family(const WeightLaw& anchor, double m) {
    if (anchor.p == 1.0) return WeightLaw::exponential(1.0 / m);
    const double k = anchor.rate * anchor.p / (1.0 - anchor.p);
    const double s = std::sqrt(m * k);
    const double q = 2.0 * s / (s + std::sqrt(m * k + 4.0));
    return WeightLaw::ber_exp(q, q / m);
}

// Ber(q)Geom+(b) with b q / ((1-b)(1-q)) = K and q/b = m.
static WeightLaw geom_family(double p, double a, double m) {
    if (p == 1.0) {
        if (m < 1.0) throw ParameterRange("geometric family with p = 1 needs mean >= 1");
        return WeightLaw::ber_geom_plus(1.0, 1.0 / m);
    }
    if (a == 1.0) {
        if (m > 1.0) throw ParameterRange("bernoulli family needs mean <= 1");
        return WeightLaw::bernoulli(m);
    }
    const double k = a / (1.0 - a) * p / (1.0 - p);
    const double hi_b = std::min(1.0, 1.0 / m);
    double lo = 0.0;
    double hi = hi_b;
    for (int it = 0; it < 200; ++it) {
        const double b = 0.5 * (lo + hi);
        const double q = m * b;
        const double f = b * q / ((1.0 - b) * (1.0 - q));
        if (f < k) lo = b;
        else hi = b;
    }
    const double b = 0.5 * (lo + hi);
    if (b >= 1.0) return WeightLaw::bernoulli(m);
    return WeightLaw::ber_geom_plus(std::min(1.0, m * b), b);
}

WeightLaw solve_compatible(CompatibleFamily family, const WeightLaw& anchor, double target_mean) {
    anchor.validate();
    if (!(target_mean > 0.0) || !std::isfinite(target_mean))
        throw ParameterRange("target mean must be positive");
    if (family == CompatibleFamily::H && !(target_mean < anchor.mean()))
        throw ParameterRange("H family needs 0 < target mean < anchor mean");
    if (family == CompatibleFamily::Any && target_mean == anchor.mean()) return anchor;
    switch (anchor.kind) {
        case LawKind::BerExp:
            return exp_family(anchor, target_mean);
        case LawKind::BerGeomPlus:
            return geom_family(anchor.p, anchor.a, target_mean);
        case LawKind::Bernoulli:
            return geom_family(anchor.p, 1.0, target_mean);
        case LawKind::Geom0:
            return geom_family(1.0 - anchor.a, anchor.a, target_mean);
        case LawKind::Zero:
            break;
    }
    throw ParameterRange("zero law has no compatible family");
}

std::pair<double, double> rho_to_direction(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterRange("rho must be positive");
    const double r = rho / (1.0 + rho);
    return {1.0 - r * r, r * r};
}

double direction_to_rho(double xi1) {
    if (!(xi1 > 0.0 && xi1 < 1.0)) throw ParameterRange("xi1 must be in (0,1)");
    const double r = std::sqrt(1.0 - xi1);
    return r / (1.0 - r);
}

void write_environment(std::ostream& os, const Environment& env) {
    os.write(kMagic, sizeof kMagic);
    put<uint32_t>(os, kVersion);
    put<uint32_t>(os, uint32_t(env.width));
    put<uint32_t>(os, uint32_t(env.height));
    put<uint32_t>(os, uint32_t(env.model.tag));
    put<double>(os, env.model.alpha_s);
    put<uint64_t>(os, env.seed);
    for (const std::string& s : {env.law.to_string(), env.model.vertical.to_string()}) {
        put<uint32_t>(os, uint32_t(s.size()));
        os.write(s.data(), std::streamsize(s.size()));
    }
    os.write(reinterpret_cast<const char*>(env.w1.data()), std::streamsize(env.w1.size() * 8));
    os.write(reinterpret_cast<const char*>(env.w2.data()), std::streamsize(env.w2.size() * 8));
}

Environment read_environment(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw FormatError("bad environment magic");
    if (get<uint32_t>(is) != kVersion) throw FormatError("unsupported environment version");
    Environment env;
    env.width = int(get<uint32_t>(is));
    env.height = int(get<uint32_t>(is));
    env.model.tag = ModelTag(get<uint32_t>(is));
    env.model.alpha_s = get<double>(is);
    env.seed = get<uint64_t>(is);
    std::string laws[2];
    for (auto& s : laws) {
        const uint32_t n = get<uint32_t>(is);
        if (n > 4096) throw FormatError("bad law string length");
        s.resize(n);
        if (!is.read(s.data(), n)) throw FormatError("truncated environment file");
    }
    env.law = WeightLaw::parse(laws[0]);
    env.model.vertical = WeightLaw::parse(laws[1]);
    check_dims(env.width, env.height);
    const size_t n = size_t(env.width) * size_t(env.height);
    env.w1.resize(n);
    env.w2.resize(n);
    if (!is.read(reinterpret_cast<char*>(env.w1.data()), std::streamsize(n * 8)) ||
        !is.read(reinterpret_cast<char*>(env.w2.data()), std::streamsize(n * 8)))
        throw FormatError("truncated environment body");
    return env;
}

std::string environment_to_json(const Environment& env) {
    nlohmann::json j;
    j["width"] = env.width;
    j["height"] = env.height;
    j["model"] = env.model.name();
    j["alpha_s"] = env.model.alpha_s;
    j["law"] = env.law.to_string();
    j["vertical_law"] = env.model.vertical.to_string();
    j["seed"] = env.seed;
    j["w1"] = env.w1;
    j["w2"] = env.w2;
    return j.dump();
}

Environment environment_from_json(const std::string& text) {
    Environment env;
    try {
        const auto j = nlohmann::json::parse(text);
        env.width = j.at("width");
        env.height = j.at("height");
        const std::string model = j.at("model");
        env.model.tag = model == "sjr" ? ModelTag::SJR : model == "general" ? ModelTag::General : ModelTag::SWFPP;
        env.model.alpha_s = j.at("alpha_s");
        env.law = WeightLaw::parse(j.at("law"));
        env.model.vertical = WeightLaw::parse(j.at("vertical_law"));
        env.seed = j.at("seed");
        env.w1 = j.at("w1").get<std::vector<double>>();
        env.w2 = j.at("w2").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("environment json: ") + e.what());
    }
    check_dims(env.width, env.height);
    const size_t n = size_t(env.width) * size_t(env.height);
    if (env.w1.size() != n || env.w2.size() != n) throw FormatError("environment json: weight array size");
    return env;
}

}  // namespace fpp
