#pragma once

#include <utility>

#include "fpp/window.hpp"

namespace fpp {

// EmptyAtLeft: store is empty at the window's upstream edge, every entry valid.
// AutoAnchor: entries are kept from the first time the partial sums of
// (input - service) drop strictly below their starting level; from there on the
// output is the same for any small enough initial store content.
enum class Anchor { EmptyAtLeft, AutoAnchor };

// I'_k = (I_k + X_k) ^ W_k, X_{k+1} = (I_k + X_k - W_k)^+, left to right.
MaskedWindow h_map(const Window& I, const Window& W, Anchor anchor = Anchor::EmptyAtLeft);
// Same store run right to left (store flows toward lower indices).
MaskedWindow h_map_reversed(const Window& I, const Window& W, Anchor anchor = Anchor::EmptyAtLeft);

// One-sided store from index 0 with X_0 = 0; optionally returns the store content.
Window h0_map(const Window& I, const Window& W, std::vector<double>* store = nullptr);

// Y'_k = (Y_k - W_k)^+ + Y_{k-1} ^ W_{k-1}; index -1 comes from the left policies.
MaskedWindow a_map(const Window& Y, const Window& W);

// Right-to-left: M_k = W_k ^ (X_k + M_{k+1}), X'_k = (X_k + M_{k+1} - W_k)^+.
// Entry k is valid iff a blocking index l > k (W_l <= X_l) is known.
MaskedWindow v_map(const Window& X, const Window& W);
// The suffix minima M_k (valid iff some l >= k blocks).
MaskedWindow v_inflow(const Window& X, const Window& W);

// Signed-material update: positive mass moves as in a_map, negative mass is
// annihilated by the negative part of W and pushed to the right.
Window sjr_update(const Window& Y, const Window& W);
// F_k = Y+_k ^ W+_k - (Y-_k - W-_k)^+, the flux from k to k+1; Y'_k = Y_k - F_k + F_{k-1}.
double sjr_flux(double y, double w);

std::pair<double, double> square_update(double I, double X, double W);
std::pair<double, double> diamond_update(double I, double Y, double W);

// f'(I, X, W) = I + (W - I - X)^+ for Bernoulli W.
double reverse_square_bernoulli(double I, double X, double W);
// f*(I, Y, W) = I + (W - Y)^+ for exponential W.
double reverse_diamond_exponential(double I, double Y, double W);

// W*_k = f*(Y_{k-1} ^ W_{k-1}, Y_k, W_k).
MaskedWindow reverse_weights_a(const Window& Y, const Window& W);
// Z_k = f'(M_{k+1}, X_k, W_k), the reverse weights of the V column.
MaskedWindow reverse_weights_v(const Window& X, const Window& W);

Window reversed(const Window& w);
MaskedWindow reversed(const MaskedWindow& w);

}  // namespace fpp
