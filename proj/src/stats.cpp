#include "fpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fpp/errors.hpp"

namespace fpp {

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.0) {
        // small-lambda form: 1 - sqrt(2 pi)/lambda sum exp(-(2k-1)^2 pi^2 / (8 lambda^2))
        const double c = M_PI * M_PI / (8.0 * lambda * lambda);
        double s = 0.0;
        for (int k = 1; k <= 50; ++k) s += std::exp(-double((2 * k - 1) * (2 * k - 1)) * c);
        return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-300) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

static double ks_p(double d, double n_eff) {
    const double sn = std::sqrt(n_eff);
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

TestResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf, double alpha) {
    TestResult r;
    r.name = "ks_one_sample";
    r.n = x.size();
    r.alpha = alpha;
    if (x.size() < 10) throw ParameterRange("ks needs at least 10 samples");
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double d = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    if (x.front() == x.back()) r.note = "degenerate sample (all values equal)";
    r.statistic = d;
    r.p_value = ks_p(d, n);
    r.pass = r.p_value >= alpha;
    return r;
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
    TestResult r;
    r.name = "ks_two_sample";
    r.alpha = alpha;
    r.n = a.size() + b.size();
    if (a.size() < 10 || b.size() < 10) throw ParameterRange("ks needs at least 10 samples per side");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0.0;
    const double na = double(a.size()), nb = double(b.size());
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    r.statistic = d;
    r.p_value = ks_p(d, na * nb / (na + nb));
    r.pass = r.p_value >= alpha;
    return r;
}

double gamma_q(double a, double x) { return boost::math::gamma_q(a, x); }

double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

void pool_bins(std::vector<double>& o, std::vector<double>& e, double min_expected) {
    std::vector<double> po, pe;
    double ao = 0.0, ae = 0.0;
    for (size_t i = 0; i < e.size(); ++i) {
        ao += o[i];
        ae += e[i];
        if (ae >= min_expected) {
            po.push_back(ao);
            pe.push_back(ae);
            ao = ae = 0.0;
        }
    }
    if (ae > 0.0 || ao > 0.0) {
        if (pe.empty()) {
            po.push_back(ao);
            pe.push_back(ae);
        } else {
            po.back() += ao;
            pe.back() += ae;
        }
    }
    o = po;
    e = pe;
}

TestResult chi_square(const std::vector<double>& o, const std::vector<double>& e, double alpha, int fitted) {
    if (o.size() != e.size()) throw ParameterRange("chi_square: observed/expected size mismatch");
    TestResult r;
    r.name = "chi_square";
    r.alpha = alpha;
    double stat = 0.0, tot = 0.0;
    for (size_t i = 0; i < o.size(); ++i) {
        tot += o[i];
        if (e[i] > 0.0) stat += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
        else if (o[i] > 0.0) stat = INFINITY;
    }
    r.n = size_t(tot);
    r.statistic = stat;
    const int dof = int(o.size()) - 1 - fitted;
    if (dof < 1) {
        r.p_value = stat == 0.0 ? 1.0 : 0.0;
        r.note = "no degrees of freedom";
    } else {
        r.p_value = std::isfinite(stat) ? gamma_q(0.5 * dof, 0.5 * stat) : 0.0;
    }
    r.pass = r.p_value >= alpha;
    return r;
}

TestResult binomial_test(uint64_t k, uint64_t n, double p, double alpha) {
    TestResult r;
    r.name = "binomial_test";
    r.alpha = alpha;
    r.n = n;
    r.statistic = n ? double(k) / double(n) : 0.0;
    if (p <= 0.0 || p >= 1.0) {
        const bool ok = (p <= 0.0 && k == 0) || (p >= 1.0 && k == n);
        r.p_value = ok ? 1.0 : 0.0;
    } else {
        boost::math::binomial_distribution<double> bd(double(n), p);
        const double lo = boost::math::cdf(bd, double(k));
        const double hi = k == 0 ? 1.0 : boost::math::cdf(boost::math::complement(bd, double(k - 1)));
        r.p_value = std::min(1.0, 2.0 * std::min(lo, hi));
    }
    r.pass = r.p_value >= alpha;
    return r;
}

TestResult ks_law(const std::vector<double>& x, const WeightLaw& law, double alpha) {
    law.validate();
    if (x.size() < 10) throw ParameterRange("ks needs at least 10 samples");
    TestResult r;
    r.alpha = alpha;
    r.n = x.size();
    const double atom = law.atom_at_zero();
    if (law.kind == LawKind::BerExp) {
        r.name = "ks_mixed";
        std::vector<double> pos;
        uint64_t zeros = 0;
        for (double v : x) {
            if (v == 0.0) ++zeros;
            else pos.push_back(v);
        }
        const TestResult bt = binomial_test(zeros, x.size(), atom, alpha);
        TestResult kt;
        if (pos.size() >= 10) {
            const double rate = law.rate;
            kt = ks_one_sample(pos, [rate](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-rate * v); }, alpha);
        }
        r.statistic = kt.statistic;
        r.p_value = std::min(bt.p_value, kt.p_value);
        r.pass = bt.pass && kt.pass;
        r.note = "atom p=" + std::to_string(bt.p_value) + ", continuous part p=" + std::to_string(kt.p_value);
        return r;
    }
    r.name = "ks_discrete";
    long kmax = 0;
    for (double v : x) {
        if (v < 0.0 || v != std::floor(v)) {
            r.pass = false;
            r.p_value = 0.0;
            r.note = "non-integer sample for an integer law";
            return r;
        }
        kmax = std::max(kmax, long(v));
    }
    std::vector<double> counts(size_t(kmax) + 2, 0.0);
    for (double v : x) counts[size_t(v)] += 1.0;
    const double n = double(x.size());
    double cum = 0.0, d = 0.0;
    std::vector<double> expected(counts.size());
    double ecum = 0.0;
    for (size_t k = 0; k + 1 < counts.size(); ++k) {
        cum += counts[k];
        d = std::max(d, std::abs(cum / n - law.cdf(double(k))));
        expected[k] = n * law.pmf(long(k));
        ecum += expected[k];
    }
    expected.back() = std::max(0.0, n - ecum);  // tail bin beyond the sample maximum
    r.statistic = d;
    const double pks = ks_p(d, n);
    std::vector<double> o = counts, e = expected;
    pool_bins(o, e);
    const TestResult ct = chi_square(o, e, alpha);
    r.p_value = std::min(pks, ct.p_value);
    r.pass = pks >= alpha && ct.pass;
    r.note = "ks p=" + std::to_string(pks) + ", chi-square p=" + std::to_string(ct.p_value);
    return r;
}

MeanCI mean_ci(const std::vector<double>& x, double level) {
    if (x.empty()) throw ParameterRange("mean_ci needs samples");
    if (!(level > 0.0 && level < 1.0)) throw ParameterRange("level must be in (0,1)");
    // two-pass for accuracy
    const double n = double(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    MeanCI ci;
    ci.mean = m;
    ci.stderr_ = x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    ci.half_width = normal_quantile(0.5 + 0.5 * level) * ci.stderr_;
    return ci;
}

}  // namespace fpp
