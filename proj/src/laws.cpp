#include "fpp/laws.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool in_open01(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

WeightLaw WeightLaw::bernoulli(double p) {
    WeightLaw w;
    w.kind = LawKind::Bernoulli;
    w.p = p;
    w.validate();
    return w;
}

WeightLaw WeightLaw::ber_exp(double p, double rate) {
    WeightLaw w;
    w.kind = LawKind::BerExp;
    w.p = p;
    w.rate = rate;
    w.validate();
    return w;
}

WeightLaw WeightLaw::ber_geom_plus(double p, double a) {
    WeightLaw w;
    w.kind = LawKind::BerGeomPlus;
    w.p = p;
    w.a = a;
    w.validate();
    return w;
}

WeightLaw WeightLaw::geom0(double c) {
    WeightLaw w;
    w.kind = LawKind::Geom0;
    w.a = c;
    w.validate();
    return w;
}

void WeightLaw::validate() const {
    switch (kind) {
        case LawKind::Zero:
            return;
        case LawKind::Bernoulli:
            if (!(p > 0.0 && p <= 1.0)) throw ParameterRange("bernoulli: need 0 < p <= 1");
            return;
        case LawKind::BerExp:
            if (!(p > 0.0 && p <= 1.0)) throw ParameterRange("berexp: need 0 < p <= 1");
            if (!(rate > 0.0 && std::isfinite(rate))) throw ParameterRange("berexp: need rate > 0");
            return;
        case LawKind::BerGeomPlus:
            if (!(p > 0.0 && p <= 1.0)) throw ParameterRange("bergeom: need 0 < p <= 1");
            if (!(a > 0.0 && a <= 1.0)) throw ParameterRange("bergeom: need 0 < a <= 1");
            return;
        case LawKind::Geom0:
            if (!in_open01(a)) throw ParameterRange("geom0: need 0 < c < 1");
            return;
    }
}

WeightLaw WeightLaw::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string fam = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                size_t used = 0;
                args.push_back(std::stod(item, &used));
                if (used != item.size()) throw InvalidLaw("bad number '" + item + "' in " + text);
            } catch (const std::logic_error&) {
                throw InvalidLaw("bad number '" + item + "' in " + text);
            }
        }
    }
    auto need = [&](size_t n) {
        if (args.size() != n)
            throw InvalidLaw(fam + " takes " + std::to_string(n) + " parameter(s): " + text);
    };
    if (fam == "zero") {
        need(0);
        return zero();
    }
    if (fam == "exp") {
        need(1);
        return exponential(args[0]);
    }
    if (fam == "ber") {
        need(1);
        return bernoulli(args[0]);
    }
    if (fam == "berexp") {
        need(2);
        return ber_exp(args[0], args[1]);
    }
    if (fam == "bergeom") {
        need(2);
        return ber_geom_plus(args[0], args[1]);
    }
    if (fam == "geom0") {
        need(1);
        return geom0(args[0]);
    }
    throw InvalidLaw("unknown law family '" + fam + "'");
}

std::string WeightLaw::to_string() const {
    switch (kind) {
        case LawKind::Zero:
            return "zero";
        case LawKind::Bernoulli:
            return "ber:" + fmt_num(p);
        case LawKind::BerExp:
            return p == 1.0 ? "exp:" + fmt_num(rate) : "berexp:" + fmt_num(p) + "," + fmt_num(rate);
        case LawKind::BerGeomPlus:
            return "bergeom:" + fmt_num(p) + "," + fmt_num(a);
        case LawKind::Geom0:
            return "geom0:" + fmt_num(a);
    }
    return "?";
}

double WeightLaw::mean() const {
    switch (kind) {
        case LawKind::Zero:
            return 0.0;
        case LawKind::Bernoulli:
            return p;
        case LawKind::BerExp:
            return p / rate;
        case LawKind::BerGeomPlus:
            return p / a;
        case LawKind::Geom0:
            return (1.0 - a) / a;
    }
    return 0.0;
}

double WeightLaw::variance() const {
    switch (kind) {
        case LawKind::Zero:
            return 0.0;
        case LawKind::Bernoulli:
            return p * (1.0 - p);
        case LawKind::BerExp:
            return p * (2.0 - p) / (rate * rate);
        case LawKind::BerGeomPlus: {
            const double m2 = (2.0 - a) / (a * a);
            return p * m2 - (p / a) * (p / a);
        }
        case LawKind::Geom0:
            return (1.0 - a) / (a * a);
    }
    return 0.0;
}

double WeightLaw::atom_at_zero() const {
    switch (kind) {
        case LawKind::Zero:
            return 1.0;
        case LawKind::Bernoulli:
        case LawKind::BerExp:
        case LawKind::BerGeomPlus:
            return 1.0 - p;
        case LawKind::Geom0:
            return a;
    }
    return 0.0;
}

double WeightLaw::cdf(double x) const {
    if (x < 0.0) return 0.0;
    switch (kind) {
        case LawKind::Zero:
            return 1.0;
        case LawKind::Bernoulli:
            return x < 1.0 ? 1.0 - p : 1.0;
        case LawKind::BerExp:
            return 1.0 - p * std::exp(-rate * x);
        case LawKind::BerGeomPlus: {
            const double k = std::floor(x);
            return 1.0 - p * std::pow(1.0 - a, k);
        }
        case LawKind::Geom0: {
            const double k = std::floor(x);
            return 1.0 - std::pow(1.0 - a, k + 1.0);
        }
    }
    return 1.0;
}

double WeightLaw::pmf(long k) const {
    if (k < 0) return 0.0;
    switch (kind) {
        case LawKind::Zero:
            return k == 0 ? 1.0 : 0.0;
        case LawKind::Bernoulli:
            return k == 0 ? 1.0 - p : (k == 1 ? p : 0.0);
        case LawKind::BerExp:
            return k == 0 ? 1.0 - p : 0.0;
        case LawKind::BerGeomPlus:
            return k == 0 ? 1.0 - p : p * a * std::pow(1.0 - a, double(k - 1));
        case LawKind::Geom0:
            return a * std::pow(1.0 - a, double(k));
    }
    return 0.0;
}

double WeightLaw::sample(RngStream& rng) const {
    switch (kind) {
        case LawKind::Zero:
            return 0.0;
        case LawKind::Bernoulli:
            return rng.uniform() < p ? 1.0 : 0.0;
        case LawKind::BerExp: {
            if (p < 1.0 && !(rng.uniform() < p)) return 0.0;
            return rng.exponential(rate);
        }
        case LawKind::BerGeomPlus: {
            if (p < 1.0 && !(rng.uniform() < p)) return 0.0;
            return 1.0 + double(rng.geometric0(a));
        }
        case LawKind::Geom0:
            return double(rng.geometric0(a));
    }
    return 0.0;
}

}  // namespace fpp
