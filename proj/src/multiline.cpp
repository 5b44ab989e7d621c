#include "fpp/multiline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fpp/errors.hpp"

namespace fpp {

MapKind parse_map_kind(const std::string& s) {
    if (s == "h" || s == "H") return MapKind::H;
    if (s == "a" || s == "A") return MapKind::A;
    if (s == "v" || s == "V") return MapKind::V;
    throw ParameterRange("unknown map kind '" + s + "' (expected h, a or v)");
}

std::string map_kind_name(MapKind k) {
    switch (k) {
        case MapKind::H:
            return "H";
        case MapKind::A:
            return "A";
        case MapKind::V:
            return "V";
    }
    return "?";
}

namespace {

bool exponential_weights(const WeightLaw& w) { return w.kind == LawKind::BerExp; }

void check_weights(const WeightLaw& w) {
    w.validate();
    if (w.kind != LawKind::BerExp && w.kind != LawKind::BerGeomPlus && w.kind != LawKind::Bernoulli)
        throw InvalidLaw("invariant table covers Bernoulli, BerExp and BerGeomPlus weights only");
}

}  // namespace

WeightLaw invariant_marginal(MapKind kind, const WeightLaw& weights, double param) {
    check_weights(weights);
    const double p = weights.p;
    if (exponential_weights(weights)) {
        const double al = weights.rate, rho = param;
        if (!(rho >= 0.0) || !std::isfinite(rho)) throw ParameterRange("rho must be >= 0");
        if (kind != MapKind::H && rho == 0.0) throw ParameterRange("rho must be > 0 for V and A");
        switch (kind) {
            case MapKind::H:
                return WeightLaw::ber_exp(al * p / (al + (1.0 - p) * rho), al + rho);
            case MapKind::V:
                return WeightLaw::ber_exp(al / (al + rho), rho);
            case MapKind::A:
                return WeightLaw::ber_exp(al / (al + (1.0 - p) * rho), rho);
        }
    }
    const double c = param;
    if (!(c >= 0.0 && c < 1.0)) throw ParameterRange("c must be in [0,1)");
    if (kind != MapKind::H && c == 0.0) throw ParameterRange("c must be > 0 for V and A");
    if (weights.kind == LawKind::Bernoulli) {
        switch (kind) {
            case MapKind::H:
                return WeightLaw::bernoulli((1.0 - c) * p / (1.0 - c * p));
            case MapKind::V:
                return WeightLaw::geom0(c);
            case MapKind::A:
                // V law plus one H input; the tabulated 1 - c + cp is not invariant
                return WeightLaw::ber_geom_plus((1.0 - c) / (1.0 - c * p), c);
        }
    }
    const double a = weights.a;
    const double ac = a * (1.0 - c);
    switch (kind) {
        case MapKind::H:
            return WeightLaw::ber_geom_plus(ac * p / (ac + c * (1.0 - p)), ac + c);
        case MapKind::V:
            return WeightLaw::ber_geom_plus(ac / (ac + c), c);
        case MapKind::A:
            return WeightLaw::ber_geom_plus(ac / (ac + c * (1.0 - p)), c);
    }
    return weights;
}

WeightLaw tabulated_marginal(MapKind kind, const WeightLaw& weights, double param) {
    check_weights(weights);
    if (kind != MapKind::A || exponential_weights(weights)) return invariant_marginal(kind, weights, param);
    const double c = param, p = weights.p;
    if (!(c > 0.0 && c < 1.0)) throw ParameterRange("c must be in (0,1) for A");
    if (weights.kind == LawKind::Bernoulli) return WeightLaw::ber_geom_plus(1.0 - c + c * p, c);
    const double ac = weights.a * (1.0 - c);
    return WeightLaw::ber_geom_plus((ac + c * p) / (ac + c), c);
}

double max_invariant_mean(MapKind kind, const WeightLaw& weights) {
    check_weights(weights);
    return kind == MapKind::H ? weights.mean() : INFINITY;
}

double param_for_mean(MapKind kind, const WeightLaw& weights, double mean) {
    check_weights(weights);
    if (!(mean > 0.0) || !(mean < max_invariant_mean(kind, weights)))
        throw ParameterRange("mean outside the admissible range of the " + map_kind_name(kind) + " family");
    auto m = [&](double x) { return invariant_marginal(kind, weights, x).mean(); };
    double lo = 0.0, hi = 1.0;
    if (exponential_weights(weights)) {
        // mean decreases in rho
        while (m(hi) > mean) hi *= 2.0;
        if (kind != MapKind::H) {
            lo = hi;
            while (m(lo) < mean) lo *= 0.5;
        }
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (m(mid) > mean) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

static Window iid_line(const WeightLaw& law, size_t n, uint64_t seed) {
    RngStream rng(seed);
    Window w{std::vector<double>(n)};
    for (auto& v : w.values) v = law.sample(rng);
    return w;
}

static std::vector<double> valid_between(const MaskedWindow& w, size_t lo, size_t hi) {
    std::vector<double> out;
    for (size_t k = lo; k < std::min(hi, w.size()); ++k)
        if (w.valid[k]) out.push_back(w[k]);
    return out;
}

std::vector<double> single_map_sample(MapKind kind, const WeightLaw& weights, const WeightLaw& line, size_t n,
                                      size_t burn, uint64_t seed) {
    const size_t len = n + burn;
    const Window X = iid_line(line, len, derive_seed(seed, 1));
    const Window W = iid_line(weights, len, derive_seed(seed, 2));
    switch (kind) {
        case MapKind::H:
            return valid_between(h_map(X, W), burn, len);
        case MapKind::V:
            return valid_between(v_map(X, W), 0, n);
        case MapKind::A:
            return valid_between(a_map(X, W), 1, n + 1);
    }
    return {};
}

void MeanVector::validate(const WeightLaw& weights) const {
    if (rho.empty()) throw ParameterRange("mean vector is empty");
    for (size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0)) throw ParameterRange("means must be positive");
        if (i > 0 && !(rho[i] < rho[i - 1])) throw ParameterRange("rho-vector not strictly decreasing");
    }
    if (!(rho[0] < max_invariant_mean(kind, weights)))
        throw ParameterRange("largest mean must be below the weight mean for H lines");
}

std::vector<MaskedWindow> multiline_from_inputs(MapKind kind, const std::vector<Window>& inputs,
                                                size_t burn) {
    std::vector<MaskedWindow> lines;
    for (size_t k = 0; k < inputs.size(); ++k) {
        if (k == 0) {
            MaskedWindow j{inputs[0], std::vector<uint8_t>(inputs[0].size(), 1)};
            lines.push_back(j);
            continue;
        }
        const Window& prev = lines.back().window;
        MaskedWindow j = kind == MapKind::A ? h_map_reversed(inputs[k], prev) : h_map(inputs[k], prev);
        const size_t n = j.size();
        const size_t b = std::min(burn, n);
        for (size_t i = 0; i < b; ++i) {
            if (kind == MapKind::A) j.valid[n - 1 - i] = 0;
            else j.valid[i] = 0;
        }
        for (size_t i = 0; i < n; ++i) j.valid[i] = j.valid[i] && lines.back().valid[i];
        lines.push_back(std::move(j));
    }
    return lines;
}

MultiLineSample sample_multiline(const MeanVector& mv, const WeightLaw& weights, size_t window_len,
                                 uint64_t seed, size_t burn) {
    mv.validate(weights);
    if (window_len <= burn) throw ParameterRange("window must be longer than the burn-in");
    MultiLineSample s;
    s.kind = mv.kind;
    s.means = mv.rho;
    for (size_t k = 0; k < mv.rho.size(); ++k) {
        const WeightLaw law = invariant_marginal(mv.kind, weights, param_for_mean(mv.kind, weights, mv.rho[k]));
        s.laws.push_back(law);
        RngStream rng(derive_seed(seed, 0x11E5 + k));
        Window w{std::vector<double>(window_len)};
        for (auto& v : w.values) v = law.sample(rng);
        s.inputs.push_back(std::move(w));
    }
    s.lines = multiline_from_inputs(mv.kind, s.inputs, burn);
    if (mv.rho.size() == 1) {
        s.lo = 0;
        s.hi = window_len;
    } else if (mv.kind == MapKind::A) {
        s.lo = 0;
        s.hi = window_len - burn;
    } else {
        s.lo = burn;
        s.hi = window_len;
    }
    return s;
}

std::vector<MaskedWindow> update_lines(MapKind kind, const std::vector<MaskedWindow>& lines, const Window& W) {
    std::vector<MaskedWindow> out;
    for (const auto& line : lines) {
        Window in = line.window;
        in.left = Boundary::ZeroPad;
        in.right = Boundary::Unbounded;
        Window w = W;
        w.offset = in.offset;
        MaskedWindow o;
        switch (kind) {
            case MapKind::H:
                o = h_map(in, w);
                break;
            case MapKind::A:
                o = a_map(in, w);
                break;
            case MapKind::V:
                o = v_map(in, w);
                break;
        }
        for (size_t i = 0; i < o.size(); ++i) o.valid[i] = o.valid[i] && line.valid[i];
        out.push_back(std::move(o));
    }
    return out;
}

static LppOutput lpp(const Window& I, const Window& W, double J0, bool departures) {
    require_aligned(I, W, departures ? "lpp_d" : "lpp_r");
    if (!(J0 >= 0.0)) throw ParameterRange("initial J must be >= 0");
    LppOutput o;
    o.out.window = Window(std::vector<double>(I.size()), I.offset);
    o.out.valid.assign(I.size(), 1);
    o.J.resize(I.size() + 1);
    double J = J0;
    o.J[0] = J;
    for (size_t k = 0; k < I.size(); ++k) {
        o.out.window.values[k] = departures ? W[k] + std::max(I[k] - J, 0.0) : std::min(I[k], J);
        J = W[k] + std::max(J - I[k], 0.0);
        o.J[k + 1] = J;
    }
    return o;
}

LppOutput lpp_d(const Window& I, const Window& W, double J0) { return lpp(I, W, J0, true); }
LppOutput lpp_r(const Window& I, const Window& W, double J0) { return lpp(I, W, J0, false); }

Window lpp_d_reversed(const Window& I, const Window& W) {
    return reversed(lpp_d(reversed(I), reversed(W)).out.window);
}

double h_equals_r_residual(const Window& I, const Window& W) {
    require_aligned(I, W, "h_equals_r_residual");
    const size_t n = I.size();
    const MaskedWindow lhs = h_map(I, W);
    Window ib{std::vector<double>(n + 1, 0.0)};
    Window wb{std::vector<double>(n + 1, 0.0)};
    for (size_t k = 0; k < n; ++k) {
        ib[k + 1] = W[k];
        wb[k] = I[k];
    }
    const LppOutput r = lpp_r(ib, wb, 0.0);
    double res = 0.0;
    for (size_t k = 0; k < n; ++k) res = std::max(res, std::abs(lhs[k] - r.out[k + 1]));
    return res;
}

static void residual_on(Residual& r, const MaskedWindow& a, const MaskedWindow& b, size_t margin) {
    const size_t n = a.size();
    for (size_t k = margin; k + margin < n; ++k) {
        if (!a.valid[k] || !b.valid[k]) continue;
        r.max_abs = std::max(r.max_abs, std::abs(a[k] - b[k]));
        ++r.compared;
    }
}

Residual intertwine_residual_a(const Window& Y1in, const Window& Y2in, const Window& Y3in, size_t margin) {
    require_aligned(Y1in, Y2in, "intertwine_residual_a");
    require_aligned(Y1in, Y3in, "intertwine_residual_a");
    Window Y1 = Y1in, Y2 = Y2in, Y3 = Y3in;
    for (Window* w : {&Y1, &Y2, &Y3}) w->left = Boundary::ZeroPad;
    const size_t n = Y1.size();
    const MaskedWindow lhs = a_map(h_map_reversed(Y3, Y2).window, Y1);
    MaskedWindow W2 = a_map(Y2, Y1);
    const MaskedWindow ws = reverse_weights_a(Y2, Y1);
    Window wh(std::vector<double>(n), Y1.offset);
    wh.left = Boundary::ZeroPad;
    for (size_t k = 0; k + 1 < n; ++k) wh[k] = ws[k + 1];
    if (n > 0) wh[n - 1] = std::min(Y2[n - 1], Y1[n - 1]);  // zero extension beyond the window
    Window inner = a_map(Y3, wh).window;
    MaskedWindow rhs = h_map_reversed(inner, W2.window);
    if (n > 0) rhs.valid[n - 1] = 0;
    Residual r;
    residual_on(r, lhs, rhs, margin);
    return r;
}

Residual intertwine_residual_v(const Window& X1in, const Window& X2in, const Window& X3in, size_t margin) {
    require_aligned(X1in, X2in, "intertwine_residual_v");
    require_aligned(X1in, X3in, "intertwine_residual_v");
    Window X1 = X1in, X2 = X2in, X3 = X3in;
    for (Window* w : {&X1, &X2, &X3}) {
        w->left = Boundary::ZeroPad;
        w->right = Boundary::Unbounded;
    }
    const size_t n = X1.size();
    const MaskedWindow lhs = v_map(h_map(X3, X2).window, X1);
    const MaskedWindow Z2 = v_map(X2, X1);
    const MaskedWindow Z1 = reverse_weights_v(X2, X1);
    Window zt(std::vector<double>(n, 0.0), X1.offset);
    std::vector<uint8_t> zt_ok(n, 0);
    // With everything zero to the left, the reverse weight at index -1 is
    // f'(M_0, 0, 0) = M_0, the inflow at 0; further left they vanish, so the
    // empty-store start of both H maps is exact.
    if (n > 0) {
        const MaskedWindow M = v_inflow(X2, X1);
        zt[0] = M.valid[0] ? M[0] : 0.0;
        zt_ok[0] = M.valid[0];
    }
    for (size_t k = 1; k < n; ++k) {
        // unknown reverse weights become zero weights, which block
        zt[k] = Z1.valid[k - 1] ? Z1[k - 1] : 0.0;
        zt_ok[k] = Z1.valid[k - 1];
    }
    const MaskedWindow inner = v_map(X3, zt);
    Window z2 = Z2.window;
    MaskedWindow rhs = h_map(inner.window, z2);
    for (size_t k = 0; k < n; ++k) rhs.valid[k] = inner.valid[k] && Z2.valid[k] && zt_ok[k];
    Residual r;
    residual_on(r, lhs, rhs, margin);
    return r;
}

NestedSample nested_h_vs_d(const std::vector<double>& rho, size_t window, uint64_t seed) {
    if (rho.empty()) throw ParameterRange("need at least one rate");
    for (size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0 && rho[i] < 1.0)) throw ParameterRange("rates must lie in (0,1)");
        if (i > 0 && !(rho[i] < rho[i - 1])) throw ParameterRange("rho-vector not strictly decreasing");
    }
    const size_t n = rho.size();
    auto draw = [&](uint64_t tag) {
        std::vector<Window> I;
        for (size_t k = 0; k < n; ++k) {
            RngStream rng(derive_seed(seed, tag * 64 + k));
            Window w{std::vector<double>(window)};
            for (auto& v : w.values) v = rng.exponential(rho[k]);
            I.push_back(std::move(w));
        }
        return I;
    };
    NestedSample out;
    {
        const auto I = draw(1);
        Window cur = I[n - 1];
        out.lhs.push_back(cur.values);
        for (size_t j = 1; j < n; ++j) {
            cur = h_map(I[n - 1 - j], cur).window;
            out.lhs.push_back(cur.values);
        }
    }
    {
        const auto I = draw(2);
        out.rhs.assign(n, {});
        Window cur = I[0];
        out.rhs[n - 1] = cur.values;
        for (size_t m = 1; m < n; ++m) {
            cur = lpp_d_reversed(I[m], cur);
            out.rhs[n - 1 - m] = cur.values;
        }
    }
    return out;
}

}  // namespace fpp
