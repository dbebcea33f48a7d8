#pragma once

#include <string>
#include <vector>

#include "torsim/spectra.hpp"

namespace torsim {

// Thrown for unreadable or malformed data files (CLI exit code 3).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Provenance block written at the top of every emitted file: `#`-prefixed
// tool version and config hash lines.
struct FileMeta {
    std::string tool_version;
    std::string config_hash;
    std::vector<std::string> extra;  // additional "key value" lines
};

// FNV-1a over the raw config bytes; stable across runs.
std::string hash_hex(const std::string& bytes);

// All writers go through a temp file + rename so partially written
// artifacts never appear under the final name.
void write_text_atomic(const std::string& path, const std::string& content);

// `frequency_hz, value` with a unit-tagged header.
void write_psd_csv(const std::string& path, const SpectralDensity& s, const FileMeta& meta);
SpectralDensity read_psd_csv(const std::string& path, Unit unit);

// `frequency_hz, re, im`.
void write_transfer_csv(const std::string& path, const TransferFunction& h, const FileMeta& meta);

// `frequency_hz, magnitude_db, phase_deg` (measured response ingestion).
TransferFunction read_transfer_magphase_csv(const std::string& path);

// `time_s, value`; sample rate inferred, spacing must be uniform to 1e-9.
void write_timeseries_csv(const std::string& path, const TimeSeries& x, const FileMeta& meta);
TimeSeries read_timeseries_csv(const std::string& path, Unit unit);

// Two-channel variant `time_s, x_a, x_b` for the readout pair.
void write_pair_csv(const std::string& path, const TimeSeries& x_a, const TimeSeries& x_b,
                    const FileMeta& meta);
std::pair<TimeSeries, TimeSeries> read_pair_csv(const std::string& path, Unit unit);

}  // namespace torsim
