#include "rbmflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rbmflow {

void ExperimentConfig::validate() const {
    if (replicas < 1) throw ConfigError("config: replicas must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("config: dt must be positive");
    if (!(r > 0.0)) throw ConfigError("config: r must be positive");
    if (eps.empty()) throw ConfigError("config: eps schedule must be nonempty");
    for (double e : eps)
        if (!(e > 0.0)) throw ConfigError("config: eps values must be strictly positive");
    for (std::size_t i = 1; i < eps.size(); ++i)
        if (!(eps[i] < eps[i - 1]))
            throw ConfigError("config: eps schedule must be sorted strictly descending");
    if (!(c0 > 0.0)) throw ConfigError("config: c0 must be positive");
    if (budget < 1) throw ConfigError("config: budget must be >= 1");
    if (threads < 0) throw ConfigError("config: threads must be >= 0");
    if (!(time_horizon > 0.0)) throw ConfigError("config: time horizon must be positive");
    if (displacement < 0.0) throw ConfigError("config: displacement must be >= 0");
    if (steps < 1) throw ConfigError("config: steps must be >= 1");
    if (eps_star < 0.0) throw ConfigError("config: eps_star must be >= 0");
    for (double b : thresholds)
        if (!(b > 0.0)) throw ConfigError("config: thresholds must be positive");
}

Vec ExperimentConfig::start_point(const Domain& dom) const {
    Vec z;
    if (!z0.empty()) {
        if (static_cast<int>(z0.size()) != dom.dim())
            throw ConfigError("config: z0 dimension does not match the domain");
        z = Vec(dom.dim());
        for (int i = 0; i < dom.dim(); ++i) z(i) = z0[static_cast<std::size_t>(i)];
    } else {
        z = dom.center();
        z(0) += 0.2;
    }
    if (!dom.in_closure(z))
        throw ConfigError("config: start point z0 lies outside the domain closure");
    return z;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, int line_no) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line_no) + ": bad number '" + token +
                          "'");
    }
    if (pos != token.size())
        throw ConfigError("config line " + std::to_string(line_no) + ": bad number '" + token +
                          "'");
    return value;
}

TomlValue parse_value(const std::string& raw, int line_no) {
    const std::string token = trim(raw);
    if (token.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": missing value");
    if (token.front() == '"') {
        if (token.size() < 2 || token.back() != '"')
            throw ConfigError("config line " + std::to_string(line_no) + ": unterminated string");
        return token.substr(1, token.size() - 2);
    }
    if (token == "true") return true;
    if (token == "false") return false;
    if (token.front() == '[') {
        if (token.back() != ']')
            throw ConfigError("config line " + std::to_string(line_no) + ": unterminated array");
        std::vector<double> values;
        std::stringstream ss(token.substr(1, token.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            values.push_back(parse_number(item, line_no));
        }
        return values;
    }
    return parse_number(token, line_no);
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
    std::map<std::string, TomlValue> out;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            // keep '#' inside quoted strings
            auto quote = line.find('"');
            if (quote == std::string::npos || hash < quote) line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[')
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": tables are not supported; use flat key = value entries");
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        out[key] = parse_value(line.substr(eq + 1), line_no);
    }
    return out;
}

namespace {

double want_number(const TomlValue& v, const std::string& key) {
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw ConfigError("config: key '" + key + "' must be a number");
}

std::string want_string(const TomlValue& v, const std::string& key) {
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError("config: key '" + key + "' must be a quoted string");
}

std::vector<double> want_array(const TomlValue& v, const std::string& key) {
    if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    if (const double* d = std::get_if<double>(&v)) return {*d};
    throw ConfigError("config: key '" + key + "' must be an array of numbers");
}

std::int64_t want_integer(const TomlValue& v, const std::string& key) {
    const double d = want_number(v, key);
    const double rounded = std::nearbyint(d);
    if (rounded != d) throw ConfigError("config: key '" + key + "' must be an integer");
    return static_cast<std::int64_t>(rounded);
}

}  // namespace

void apply_toml(ExperimentConfig& config, const std::map<std::string, TomlValue>& values) {
    for (const auto& [key, value] : values) {
        if (key == "domain")
            config.domain = want_string(value, key);
        else if (key == "dt")
            config.dt = want_number(value, key);
        else if (key == "r")
            config.r = want_number(value, key);
        else if (key == "eps")
            config.eps = want_array(value, key);
        else if (key == "c0")
            config.c0 = want_number(value, key);
        else if (key == "replicas")
            config.replicas = static_cast<int>(want_integer(value, key));
        else if (key == "seed")
            config.base_seed = static_cast<std::uint64_t>(want_integer(value, key));
        else if (key == "directions")
            config.directions = static_cast<int>(want_integer(value, key));
        else if (key == "out")
            config.out_dir = want_string(value, key);
        else if (key == "budget")
            config.budget = static_cast<std::size_t>(want_integer(value, key));
        else if (key == "threads")
            config.threads = static_cast<int>(want_integer(value, key));
        else if (key == "time")
            config.time_horizon = want_number(value, key);
        else if (key == "thresholds")
            config.thresholds = want_array(value, key);
        else if (key == "displacement")
            config.displacement = want_number(value, key);
        else if (key == "steps")
            config.steps = static_cast<std::size_t>(want_integer(value, key));
        else if (key == "eps_star")
            config.eps_star = want_number(value, key);
        else if (key == "z0")
            config.z0 = want_array(value, key);
        else
            throw ConfigError("config: unknown key '" + key + "'");
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    ExperimentConfig config;
    apply_toml(config, parse_toml(buffer.str()));
    return config;
}

}  // namespace rbmflow
