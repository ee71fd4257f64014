#include "symbridge/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace symbridge {

using nlohmann::json;

Grid Grid::make(int dim, const std::vector<double>& lo, const std::vector<double>& hi,
                const std::vector<int>& n) {
    if (dim < 1 || dim > kMaxDim)
        throw config_error("grid: dim must be in 1..3, got " + std::to_string(dim));
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim ||
        static_cast<int>(n.size()) != dim)
        throw config_error("grid: lo/hi/n must each have length dim");
    Grid g;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) {
        if (!(hi[a] > lo[a]))
            throw config_error("grid: hi must exceed lo on every axis");
        if (n[a] < 1) throw config_error("grid: n must be >= 1 on every axis");
        g.lo[a] = lo[a];
        g.hi[a] = hi[a];
        g.n[a] = n[a];
    }
    return g;
}

int Grid::nearest_interior(const Point& x) const {
    std::array<int, kMaxDim> idx{};
    for (int a = 0; a < dim; ++a) {
        double h = spacing(a);
        double t = (x[a] - lo[a]) / h;  // interior points at t = 1..n
        int i = static_cast<int>(std::lround(t)) - 1;
        if (i < 0 || i >= n[a]) return -1;
        idx[a] = i;
    }
    return flat(idx);
}

GridFunction::GridFunction(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.points())
        throw config_error("grid function: got " + std::to_string(values.size()) +
                           " values for " + std::to_string(grid.points()) +
                           " interior points");
}

GridFunction GridFunction::constant(const Grid& g, double c) {
    return GridFunction(g, std::vector<double>(g.points(), c));
}

namespace {
// "n" may be a scalar (replicated per axis) or an array
std::vector<int> json_counts(const json& jn, int dim) {
    if (jn.is_number_integer()) return std::vector<int>(dim, jn.get<int>());
    return jn.get<std::vector<int>>();
}
}  // namespace

Grid grid_from_json(const json& jg) {
    int dim = jg.at("dim").get<int>();
    return Grid::make(dim, jg.at("lo").get<std::vector<double>>(),
                      jg.at("hi").get<std::vector<double>>(),
                      json_counts(jg.at("n"), dim));
}

GridFunction parse_grid_function(const std::string& text) {
    json j = json::parse(text);
    if (!j.contains("grid") || !j.contains("values"))
        throw config_error("grid function json: required keys 'grid' and 'values'");
    Grid g = grid_from_json(j["grid"]);
    return GridFunction(g, j["values"].get<std::vector<double>>());
}

GridFunction load_grid_function(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open grid function file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grid_function(ss.str());
}

std::string grid_function_json(const GridFunction& f) {
    json jg;
    jg["dim"] = f.grid.dim;
    jg["lo"] = std::vector<double>(f.grid.lo.begin(), f.grid.lo.begin() + f.grid.dim);
    jg["hi"] = std::vector<double>(f.grid.hi.begin(), f.grid.hi.begin() + f.grid.dim);
    jg["n"] = std::vector<int>(f.grid.n.begin(), f.grid.n.begin() + f.grid.dim);
    json j;
    j["grid"] = jg;
    j["values"] = f.values;
    return j.dump();
}

void save_grid_function(const std::string& path, const GridFunction& f) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write grid function file: " + path);
    out << grid_function_json(f) << "\n";
}

}  // namespace symbridge
