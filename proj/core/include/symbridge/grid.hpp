#pragma once

#include <array>
#include <string>
#include <vector>

#include "symbridge/errors.hpp"

namespace symbridge {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;

// Uniform interior discretization of a closed box.  Per axis a, the n[a]
// interior points are lo[a] + i*h, i = 1..n[a], with h = (hi-lo)/(n+1);
// grid functions are implicitly zero on the boundary layer (Dirichlet).
// Flat indices are row-major (last axis fastest).
struct Grid {
    int dim = 1;
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};
    std::array<int, kMaxDim> n{};

    static Grid make(int dim, const std::vector<double>& lo,
                     const std::vector<double>& hi, const std::vector<int>& n);

    double spacing(int axis) const { return (hi[axis] - lo[axis]) / (n[axis] + 1); }

    int points() const {
        int p = 1;
        for (int a = 0; a < dim; ++a) p *= n[a];
        return p;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing(a);
        return v;
    }

    double box_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= hi[a] - lo[a];
        return v;
    }

    std::array<int, kMaxDim> unflat(int flat) const {
        std::array<int, kMaxDim> idx{};
        for (int a = dim - 1; a >= 0; --a) {
            idx[a] = flat % n[a];
            flat /= n[a];
        }
        return idx;
    }

    int flat(const std::array<int, kMaxDim>& idx) const {
        int f = 0;
        for (int a = 0; a < dim; ++a) f = f * n[a] + idx[a];
        return f;
    }

    Point coord(int flat) const {
        auto idx = unflat(flat);
        Point x{};
        for (int a = 0; a < dim; ++a) x[a] = lo[a] + spacing(a) * (idx[a] + 1);
        return x;
    }

    bool inside_box(const Point& x) const {
        for (int a = 0; a < dim; ++a)
            if (x[a] < lo[a] || x[a] > hi[a]) return false;
        return true;
    }

    // Nearest interior grid point, or -1 when x is on/outside the boundary
    // layer closer than half a spacing.
    int nearest_interior(const Point& x) const;

    bool operator==(const Grid& o) const = default;
};

struct GridFunction {
    Grid grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(Grid g, std::vector<double> v);
    static GridFunction constant(const Grid& g, double c);

    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
};

// JSON document {"grid": {"dim":..., "lo":[...], "hi":[...], "n":[...]},
// "values": [...]} with row-major values.
GridFunction load_grid_function(const std::string& path);
void save_grid_function(const std::string& path, const GridFunction& f);
GridFunction parse_grid_function(const std::string& json_text);
std::string grid_function_json(const GridFunction& f);

}  // namespace symbridge
