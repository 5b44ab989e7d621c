#include "fpp/window.hpp"

#include "fpp/errors.hpp"
#include "json.hpp"

namespace fpp {

bool Window::left_value(size_t j, double& out) const {
    switch (left) {
        case Boundary::ZeroPad:
        case Boundary::EmptyStore:
            out = 0.0;
            return true;
        case Boundary::Explicit:
            if (j < left_values.size()) {
                out = left_values[j];
                return true;
            }
            return false;
        case Boundary::Unbounded:
            return false;
    }
    return false;
}

bool Window::right_value(size_t j, double& out) const {
    switch (right) {
        case Boundary::ZeroPad:
        case Boundary::EmptyStore:
            out = 0.0;
            return true;
        case Boundary::Explicit:
            if (j < right_values.size()) {
                out = right_values[j];
                return true;
            }
            return false;
        case Boundary::Unbounded:
            return false;
    }
    return false;
}

bool MaskedWindow::all_valid() const {
    for (auto v : valid)
        if (!v) return false;
    return true;
}

std::pair<size_t, size_t> MaskedWindow::valid_range() const {
    size_t best_lo = 0, best_hi = 0;
    size_t k = 0;
    while (k < valid.size()) {
        if (!valid[k]) {
            ++k;
            continue;
        }
        size_t e = k;
        while (e < valid.size() && valid[e]) ++e;
        if (e - k > best_hi - best_lo) {
            best_lo = k;
            best_hi = e;
        }
        k = e;
    }
    return {best_lo, best_hi};
}

void require_aligned(const Window& a, const Window& b, const char* what) {
    if (a.offset != b.offset || a.size() != b.size())
        throw MisalignedWindows(std::string(what) + ": windows must share offset and length");
}

std::string boundary_name(Boundary b) {
    switch (b) {
        case Boundary::EmptyStore:
            return "empty";
        case Boundary::ZeroPad:
            return "zero";
        case Boundary::Explicit:
            return "explicit";
        case Boundary::Unbounded:
            return "unbounded";
    }
    return "?";
}

Boundary parse_boundary(const std::string& s) {
    if (s == "empty") return Boundary::EmptyStore;
    if (s == "zero") return Boundary::ZeroPad;
    if (s == "explicit") return Boundary::Explicit;
    if (s == "unbounded") return Boundary::Unbounded;
    throw FormatError("unknown boundary policy '" + s + "'");
}

static nlohmann::json to_j(const Window& w) {
    nlohmann::json j;
    j["offset"] = w.offset;
    j["values"] = w.values;
    j["left"] = boundary_name(w.left);
    j["right"] = boundary_name(w.right);
    if (!w.left_values.empty()) j["left_values"] = w.left_values;
    if (!w.right_values.empty()) j["right_values"] = w.right_values;
    return j;
}

std::string window_to_json(const Window& w) { return to_j(w).dump(); }

Window window_from_json(const std::string& text) {
    Window w;
    try {
        const auto j = nlohmann::json::parse(text);
        w.offset = j.value("offset", int64_t(0));
        w.values = j.at("values").get<std::vector<double>>();
        w.left = parse_boundary(j.value("left", std::string("zero")));
        w.right = parse_boundary(j.value("right", std::string("unbounded")));
        if (j.contains("left_values")) w.left_values = j["left_values"].get<std::vector<double>>();
        if (j.contains("right_values")) w.right_values = j["right_values"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("window json: ") + e.what());
    }
    return w;
}

std::string masked_to_json(const MaskedWindow& w) {
    auto j = to_j(w.window);
    j["valid"] = w.valid;
    return j.dump();
}

}  // namespace fpp
