#include "fk/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fk {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (trim(text.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("model file: bad numeric value for '" + key + "': '" + text + "'");
}

std::int64_t parse_integer(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(text, &used);
        if (trim(text.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("model file: bad integer value for '" + key + "': '" + text + "'");
}

std::vector<double> parse_series(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("model file: empty entry in '" + key + "' series");
        out.push_back(parse_number(key, item));
    }
    if (out.empty()) throw ConfigError("model file: empty series for '" + key + "'");
    return out;
}

}  // namespace

ModelFile parse_model_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("model file line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("model file line " + std::to_string(lineno) + ": empty key or value");
        }
        if (kv.count(key)) {
            throw ConfigError("model file: duplicate key '" + key + "'");
        }
        kv[key] = value;
    }

    ModelFile out;
    bool have_k = false;
    for (const auto& [key, value] : kv) {
        if (key == "k") {
            out.spec.onsite_strength = parse_number(key, value);
            have_k = true;
        } else if (key == "mu") {
            out.spec.spring_offset = parse_number(key, value);
        } else if (key == "F_DC") {
            out.spec.forcing.f_dc = parse_number(key, value);
        } else if (key == "F_AC") {
            out.spec.forcing.f_ac = parse_number(key, value);
        } else if (key == "nu0") {
            out.spec.forcing.nu0 = parse_number(key, value);
        } else if (key == "p") {
            out.p = parse_integer(key, value);
        } else if (key == "q") {
            out.q = parse_integer(key, value);
        } else if (key == "W_series") {
            out.spec.w_series = parse_series(key, value);
        } else if (key == "V_series") {
            out.spec.v_series = parse_series(key, value);
        } else {
            throw ConfigError("model file: unknown key '" + key + "'");
        }
    }
    if (!out.spec.v_series.empty() && have_k) {
        throw ConfigError("model file: 'k' conflicts with 'V_series' (custom on-site potential)");
    }
    if (out.q < 1) throw ConfigError("model file: q must be >= 1");
    try {
        out.spec.validate();
    } catch (const ModelError& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }
    return out;
}

ModelFile parse_model_file(const std::string& path) { return parse_model_text(read_file(path)); }

std::vector<PeriodicConfiguration> parse_configuration_text(const std::string& text) {
    std::vector<PeriodicConfiguration> out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::int64_t p = 0, q = 0;
        if (!(ls >> p >> q) || q < 1) {
            throw ConfigError("configuration file line " + std::to_string(lineno) +
                              ": expected 'p q u0 ... u_{q-1}'");
        }
        PeriodicConfiguration c;
        c.winding = p;
        c.base.resize(static_cast<std::size_t>(q));
        for (std::int64_t j = 0; j < q; ++j) {
            if (!(ls >> c.base[static_cast<std::size_t>(j)])) {
                throw ConfigError("configuration file line " + std::to_string(lineno) +
                                  ": expected " + std::to_string(q) + " positions");
            }
        }
        double extra = 0.0;
        if (ls >> extra) {
            throw ConfigError("configuration file line " + std::to_string(lineno) +
                              ": trailing values");
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<PeriodicConfiguration> parse_configuration_file(const std::string& path) {
    return parse_configuration_text(read_file(path));
}

std::string format_configuration_line(const PeriodicConfiguration& c) {
    std::string line = std::to_string(c.winding) + " " + std::to_string(c.q());
    for (const double u : c.base) line += " " + format_double(u);
    return line;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

}  // namespace fk
