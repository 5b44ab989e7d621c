#include "fpp/stores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

MaskedWindow make_out(const Window& like) {
    MaskedWindow out;
    out.window.offset = like.offset;
    out.window.values.assign(like.size(), 0.0);
    out.window.left = Boundary::Unbounded;
    out.window.right = Boundary::Unbounded;
    out.valid.assign(like.size(), 1);
    return out;
}

// first k >= 1 with sum_{j<k}(I_j - W_j) < 0
size_t auto_anchor(const std::vector<double>& I, const std::vector<double>& W) {
    double s = 0.0;
    for (size_t k = 0; k < I.size(); ++k) {
        s += I[k] - W[k];
        if (s < 0.0) return k + 1;
    }
    throw NoAnchor("store never empties in this window (mean condition violated?)");
}

void h_kernel(const double* I, const double* W, size_t n, double* out) {
    double x = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double s = I[k] + x;
        out[k] = std::min(s, W[k]);
        x = std::max(s - W[k], 0.0);
    }
}

}  // namespace

Window reversed(const Window& w) {
    Window r = w;
    std::reverse(r.values.begin(), r.values.end());
    std::swap(r.left, r.right);
    std::swap(r.left_values, r.right_values);
    return r;
}

MaskedWindow reversed(const MaskedWindow& w) {
    MaskedWindow r{reversed(w.window), w.valid};
    std::reverse(r.valid.begin(), r.valid.end());
    return r;
}

MaskedWindow h_map(const Window& I, const Window& W, Anchor anchor) {
    require_aligned(I, W, "h_map");
    MaskedWindow out = make_out(I);
    out.window.left = Boundary::EmptyStore;
    h_kernel(I.values.data(), W.values.data(), I.size(), out.window.values.data());
    if (anchor == Anchor::AutoAnchor) {
        const size_t a = auto_anchor(I.values, W.values);
        for (size_t k = 0; k < std::min(a, out.size()); ++k) out.valid[k] = 0;
    }
    return out;
}

MaskedWindow h_map_reversed(const Window& I, const Window& W, Anchor anchor) {
    require_aligned(I, W, "h_map_reversed");
    return reversed(h_map(reversed(I), reversed(W), anchor));
}

Window h0_map(const Window& I, const Window& W, std::vector<double>* store) {
    require_aligned(I, W, "h0_map");
    Window out(std::vector<double>(I.size(), 0.0), I.offset);
    out.left = Boundary::EmptyStore;
    if (store) store->assign(I.size() + 1, 0.0);
    double x = 0.0;
    for (size_t k = 0; k < I.size(); ++k) {
        const double s = I[k] + x;
        out[k] = std::min(s, W[k]);
        x = std::max(s - W[k], 0.0);
        if (store) (*store)[k + 1] = x;
    }
    return out;
}

MaskedWindow a_map(const Window& Y, const Window& W) {
    require_aligned(Y, W, "a_map");
    MaskedWindow out = make_out(Y);
    const size_t n = Y.size();
    if (n == 0) return out;
    double y0 = 0.0, w0 = 0.0;
    double inflow = 0.0;
    if (Y.left_value(0, y0) && W.left_value(0, w0)) inflow = std::min(y0, w0);
    else out.valid[0] = 0;
    for (size_t k = 0; k < n; ++k) {
        out.window.values[k] = std::max(Y[k] - W[k], 0.0) + inflow;
        inflow = std::min(Y[k], W[k]);
    }
    return out;
}

namespace {

// Suffix minima with unknown-ness. Returns M for indices 0..n (M[n] is the
// value just beyond the window) plus a known flag.
void v_suffix(const Window& X, const Window& W, std::vector<double>& M, std::vector<uint8_t>& known) {
    const size_t n = X.size();
    // extend to the right using whatever the policies provide
    std::vector<double> xe, we;
    for (size_t j = 0;; ++j) {
        double xv = 0.0, wv = 0.0;
        const bool hx = X.right_value(j, xv);
        const bool hw = W.right_value(j, wv);
        if (!hw) break;
        if (!hx) {
            // unknown X beyond: only a zero weight blocks for sure
            if (wv == 0.0) {
                xe.push_back(0.0);
                we.push_back(0.0);
            }
            break;
        }
        xe.push_back(xv);
        we.push_back(wv);
        if (wv <= xv) break;  // blocking found, nothing further matters
        if (j > 1000000) break;
    }
    double m = std::numeric_limits<double>::infinity();
    bool mk = false;
    for (size_t j = xe.size(); j-- > 0;) {
        if (we[j] <= xe[j]) {
            m = we[j];
            mk = true;
        } else if (mk) {
            m = std::min(we[j], xe[j] + m);
        }
    }
    M.assign(n + 1, 0.0);
    known.assign(n + 1, 0);
    M[n] = m;
    known[n] = mk;
    for (size_t k = n; k-- > 0;) {
        if (known[k + 1]) {
            M[k] = std::min(W[k], X[k] + M[k + 1]);
            known[k] = 1;
        } else if (W[k] <= X[k]) {
            M[k] = W[k];
            known[k] = 1;
        }
    }
}

}  // namespace

MaskedWindow v_map(const Window& X, const Window& W) {
    require_aligned(X, W, "v_map");
    MaskedWindow out = make_out(X);
    std::vector<double> M;
    std::vector<uint8_t> known;
    v_suffix(X, W, M, known);
    for (size_t k = 0; k < X.size(); ++k) {
        if (known[k + 1]) out.window.values[k] = std::max(X[k] + M[k + 1] - W[k], 0.0);
        else out.valid[k] = 0;
    }
    return out;
}

MaskedWindow v_inflow(const Window& X, const Window& W) {
    require_aligned(X, W, "v_inflow");
    MaskedWindow out = make_out(X);
    std::vector<double> M;
    std::vector<uint8_t> known;
    v_suffix(X, W, M, known);
    for (size_t k = 0; k < X.size(); ++k) {
        out.window.values[k] = known[k] ? M[k] : 0.0;
        out.valid[k] = known[k];
    }
    return out;
}

namespace {
inline double pos(double v) { return v > 0.0 ? v : 0.0; }
inline double neg(double v) { return v < 0.0 ? -v : 0.0; }
}  // namespace

double sjr_flux(double y, double w) {
    return std::min(pos(y), pos(w)) - pos(neg(y) - neg(w));
}

Window sjr_update(const Window& Y, const Window& W) {
    require_aligned(Y, W, "sjr_update");
    Window out(std::vector<double>(Y.size(), 0.0), Y.offset);
    double yl = 0.0, wl = 0.0;
    if (!Y.left_value(0, yl)) yl = 0.0;
    if (!W.left_value(0, wl)) wl = 0.0;
    for (size_t i = 0; i < Y.size(); ++i) {
        out[i] = std::max(pos(Y[i]) - pos(W[i]), 0.0) - std::min(neg(Y[i]), neg(W[i])) +
                 std::min(pos(yl), pos(wl)) - pos(neg(yl) - neg(wl));
        yl = Y[i];
        wl = W[i];
    }
    return out;
}

std::pair<double, double> square_update(double I, double X, double W) {
    const double s = I + X;
    return {std::min(s, W), std::max(s - W, 0.0)};
}

std::pair<double, double> diamond_update(double I, double Y, double W) {
    return {std::min(Y, W), I + std::max(Y - W, 0.0)};
}

double reverse_square_bernoulli(double I, double X, double W) {
    return I + std::max(W - I - X, 0.0);
}

double reverse_diamond_exponential(double I, double Y, double W) {
    return I + std::max(W - Y, 0.0);
}

MaskedWindow reverse_weights_a(const Window& Y, const Window& W) {
    require_aligned(Y, W, "reverse_weights_a");
    MaskedWindow out = make_out(Y);
    if (Y.size() == 0) return out;
    double y0 = 0.0, w0 = 0.0;
    double inflow = 0.0;
    if (Y.left_value(0, y0) && W.left_value(0, w0)) inflow = std::min(y0, w0);
    else out.valid[0] = 0;
    for (size_t k = 0; k < Y.size(); ++k) {
        out.window.values[k] = reverse_diamond_exponential(inflow, Y[k], W[k]);
        inflow = std::min(Y[k], W[k]);
    }
    return out;
}

MaskedWindow reverse_weights_v(const Window& X, const Window& W) {
    require_aligned(X, W, "reverse_weights_v");
    MaskedWindow out = make_out(X);
    std::vector<double> M;
    std::vector<uint8_t> known;
    v_suffix(X, W, M, known);
    for (size_t k = 0; k < X.size(); ++k) {
        if (known[k + 1]) out.window.values[k] = reverse_square_bernoulli(M[k + 1], X[k], W[k]);
        else out.valid[k] = 0;
    }
    return out;
}

}  // namespace fpp
