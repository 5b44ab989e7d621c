#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fpp {

// What lies beyond a finite window edge.
//   EmptyStore: a store map starts (or ends) empty at this edge
//   ZeroPad:    the sequence is 0 outside
//   Explicit:   the listed values continue the sequence outward (nearest first)
//   Unbounded:  unknown; entries that depend on it are masked out
enum class Boundary { EmptyStore, ZeroPad, Explicit, Unbounded };

struct Window {
    int64_t offset = 0;
    std::vector<double> values;
    Boundary left = Boundary::ZeroPad;
    Boundary right = Boundary::Unbounded;
    std::vector<double> left_values;
    std::vector<double> right_values;

    Window() = default;
    explicit Window(std::vector<double> v, int64_t off = 0) : offset(off), values(std::move(v)) {}

    size_t size() const { return values.size(); }
    double operator[](size_t k) const { return values[k]; }
    double& operator[](size_t k) { return values[k]; }
    // value at index -1-j (j>=0) according to the left policy; false if unknown
    bool left_value(size_t j, double& out) const;
    bool right_value(size_t j, double& out) const;
};

struct MaskedWindow {
    Window window;
    std::vector<uint8_t> valid;

    size_t size() const { return window.size(); }
    double operator[](size_t k) const { return window.values[k]; }
    bool all_valid() const;
    // first and one-past-last valid index of the longest valid run
    std::pair<size_t, size_t> valid_range() const;
};

void require_aligned(const Window& a, const Window& b, const char* what);

std::string boundary_name(Boundary b);
Boundary parse_boundary(const std::string& s);
std::string window_to_json(const Window& w);
Window window_from_json(const std::string& text);
std::string masked_to_json(const MaskedWindow& w);

}  // namespace fpp
