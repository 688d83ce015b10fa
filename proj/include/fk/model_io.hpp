#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fk/model.hpp"

namespace fk {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model specification file: `key = value` lines, '#' comments. Accepted keys:
// k, mu, F_DC, F_AC, nu0, p, q, W_series, V_series (comma-separated
// coefficient lists). Unknown keys are errors; duplicate keys are errors;
// `k` conflicts with V_series.
struct ModelFile {
    ModelSpec spec;
    std::int64_t p = 0;
    std::int64_t q = 1;
};

ModelFile parse_model_text(const std::string& text);
ModelFile parse_model_file(const std::string& path);

// Configuration list files (ensembles, portrait initial conditions):
// one configuration per line as `p q u0 u1 ... u_{q-1}`.
std::vector<PeriodicConfiguration> parse_configuration_text(const std::string& text);
std::vector<PeriodicConfiguration> parse_configuration_file(const std::string& path);
std::string format_configuration_line(const PeriodicConfiguration& c);

// Deterministic float formatting used for every CSV/JSON export ("%.12g").
std::string format_double(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace fk
