#pragma once

#include <string>

#include "fpp/rng.hpp"

namespace fpp {

enum class LawKind { Zero, Bernoulli, BerExp, BerGeomPlus, Geom0 };

// Marginal law of a weight or an increment. Atoms at zero are explicit:
// BerExp(p, rate) is 0 w.p. 1-p and Exp(rate) otherwise, BerGeomPlus(p, a) is
// 0 w.p. 1-p and Geom+(a) (P(k)=a(1-a)^(k-1), k>=1) otherwise,
// Geom0(c) has P(k)=c(1-c)^k, k>=0.
struct WeightLaw {
    LawKind kind = LawKind::Zero;
    double p = 0.0;
    double rate = 0.0;
    double a = 0.0;

    static WeightLaw zero() { return {}; }
    static WeightLaw bernoulli(double p);
    static WeightLaw exponential(double rate) { return ber_exp(1.0, rate); }
    static WeightLaw ber_exp(double p, double rate);
    static WeightLaw ber_geom_plus(double p, double a);
    static WeightLaw geom0(double c);

    // Parse "exp:1", "berexp:0.5,2", "ber:0.3", "bergeom:0.5,0.25", "geom0:0.4", "zero".
    static WeightLaw parse(const std::string& text);
    std::string to_string() const;

    void validate() const;
    bool discrete() const { return kind != LawKind::BerExp; }
    bool integer_valued() const { return kind != LawKind::BerExp; }

    double mean() const;
    double variance() const;
    double atom_at_zero() const;
    double cdf(double x) const;
    // P(X = k) for integer-valued laws
    double pmf(long k) const;

    double sample(RngStream& rng) const;

    bool operator==(const WeightLaw&) const = default;
};


}  // namespace fpp
