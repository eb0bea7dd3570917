#include "scherk/config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "scherk/errors.hpp"
#include "scherk/mesh_io.hpp"

namespace scherk {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double d = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), d);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
    return d;
}

long long to_int(const std::string& key, const std::string& v) {
    long long i = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), i);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
    return i;
}

std::string num(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

}  // namespace

std::pair<double, double> parse_window(const std::string& s) {
    const auto c = s.find(':');
    if (c == std::string::npos) throw ConfigError("window must look like lo:hi, got '" + s + "'");
    return {to_double("x_window", trim(s.substr(0, c))), to_double("x_window", trim(s.substr(c + 1)))};
}

void RunConfig::validate() const {
    if (k < 3) throw ConfigError("k must be >= 3");
    if (y && !(*y > 0 && *y < 1)) throw ConfigError("y must lie in (0,1)");
    if (x && !(*x > -1 && *x < 0)) throw ConfigError("x must lie in (-1,0)");
    if (!(mesh_y > 0 && mesh_y < 1)) throw ConfigError("mesh_y must lie in (0,1)");
    if (resolution < 8) throw ConfigError("resolution must be >= 8");
    if (!(end_cutoff > 0)) throw ConfigError("end_cutoff must be positive");
    if (copies < 1) throw ConfigError("copies must be >= 1");
    for (const auto& [name, v] : tol)
        if (!(v > 0)) throw ConfigError("tolerance " + name + " must be positive");
    if (!(x_window.first > -1 && x_window.second < 0 && x_window.first < x_window.second))
        throw ConfigError("x_window must be an interval inside (-1,0)");
    if (y_grid.empty()) throw ConfigError("y_grid is empty");
}

double RunConfig::tolerance(const std::string& name) const {
    auto it = tol.find(name);
    if (it == tol.end()) throw ConfigError("unknown tolerance " + name);
    return it->second;
}

RunConfig parse_config(const std::string& text, RunConfig cfg) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key == "k") cfg.k = int(to_int(key, val));
        else if (key == "y") cfg.y = val.empty() ? std::nullopt : std::optional<double>(to_double(key, val));
        else if (key == "x") cfg.x = val.empty() ? std::nullopt : std::optional<double>(to_double(key, val));
        else if (key == "mesh_y") cfg.mesh_y = to_double(key, val);
        else if (key == "resolution") cfg.resolution = int(to_int(key, val));
        else if (key == "end_cutoff") cfg.end_cutoff = to_double(key, val);
        else if (key == "copies") cfg.copies = int(to_int(key, val));
        else if (key.rfind("tol.", 0) == 0) cfg.tol[key.substr(4)] = to_double(key, val);
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "seed") cfg.seed = std::uint64_t(to_int(key, val));
        else if (key == "x_window") cfg.x_window = parse_window(val);
        else if (key == "y_grid") {
            cfg.y_grid.clear();
            std::istringstream ys(val);
            std::string item;
            while (std::getline(ys, item, ',')) cfg.y_grid.push_back(to_double(key, trim(item)));
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    return parse_config(io::read_text(path), std::move(base));  // IoError passes through
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    o << "k = " << c.k << "\n";
    o << "y = " << (c.y ? num(*c.y) : "") << "\n";
    o << "x = " << (c.x ? num(*c.x) : "") << "\n";
    o << "mesh_y = " << num(c.mesh_y) << "\n";
    o << "resolution = " << c.resolution << "\n";
    o << "end_cutoff = " << num(c.end_cutoff) << "\n";
    o << "copies = " << c.copies << "\n";
    for (const auto& [name, v] : c.tol) o << "tol." << name << " = " << num(v) << "\n";
    o << "output_dir = " << c.output_dir << "\n";
    o << "seed = " << c.seed << "\n";
    o << "x_window = " << num(c.x_window.first) << ":" << num(c.x_window.second) << "\n";
    o << "y_grid = ";
    for (size_t i = 0; i < c.y_grid.size(); ++i) o << (i ? "," : "") << num(c.y_grid[i]);
    o << "\n";
    return o.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : serialize_config(cfg)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace scherk
