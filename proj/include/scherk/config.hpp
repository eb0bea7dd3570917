#pragma once

// Run configuration: flat `key = value` lines, `#` comments.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scherk {

struct RunConfig {
    int k = 3;
    std::optional<double> y;  // absent: mesh/verify use mesh_y
    std::optional<double> x;  // absent: solved on the period curve
    double mesh_y = 0.1;
    int resolution = 64;
    double end_cutoff = 1e-2;
    int copies = 1;
    std::map<std::string, double> tol{{"quad", 1e-10}, {"solver", 1e-8}, {"solver_quad", 1e-11}, {"weld", 1e-6}};
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    std::pair<double, double> x_window{-0.99, -0.01};
    std::vector<double> y_grid{0.05, 0.10, 0.15, 0.20, 0.25, 0.30};

    void validate() const;
    double tolerance(const std::string& name) const;
};

RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string serialize_config(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);  // FNV-1a of the serialized form

std::pair<double, double> parse_window(const std::string& s);  // "lo:hi"

}  // namespace scherk
