#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "torsim/budget.hpp"

namespace torsim {

// Thrown with a field-path diagnostic when the configuration document is
// invalid (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EstimationConfig {
    double f_min_hz = 10.0;
    double f_max_hz = 500.0;
    std::size_t points = 400;
    std::size_t segment_length = 1024;
    double overlap = 0.5;
};

struct SimulateConfig {
    double sample_rate_hz = 1000.0;
    double line_hz = 73.0;              // common-mode vibration line
    double line_amplitude_m = 1e-12;    // displacement amplitude in channel A
    double alpha_true = 0.88;           // channel gain ratio B/A for common-mode input
    double sensing_noise_asd_m = 3e-15; // independent white noise per channel
};

struct CslConfig {
    double r_min_m = 1e-9;
    double r_max_m = 1e-4;
    std::size_t points = 200;
    double band_lo_hz = 80.0;
    double band_hi_hz = 120.0;
};

struct Config {
    int schema_version = 1;
    BudgetConfig budget;
    double alpha_readout = 0.88;
    EstimationConfig estimation;
    SimulateConfig simulate;
    CslConfig csl;
    std::string raw;       // document bytes, for provenance hashing
    std::string hash;      // FNV-1a of raw

    FrequencyGrid budget_grid() const;
};

Config load_config(const std::string& path);
Config parse_config(const std::string& json_text, const std::string& origin = "<string>");

}  // namespace torsim
