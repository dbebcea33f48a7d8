#include "torsim/csv.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "torsim/constants.hpp"

namespace torsim {

namespace {

std::string meta_block(const FileMeta& meta) {
    std::ostringstream os;
    if (!meta.tool_version.empty()) os << "# tool torsim " << meta.tool_version << "\n";
    if (!meta.config_hash.empty()) os << "# config_hash " << meta.config_hash << "\n";
    for (const auto& line : meta.extra) os << "# " << line << "\n";
    return os.str();
}

struct CsvReader {
    std::string path;
    std::ifstream in;
    std::size_t lineno = 0;

    explicit CsvReader(const std::string& p) : path(p), in(p) {
        if (!in) throw DataError("cannot open " + p);
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError(path + ":" + std::to_string(lineno) + ": " + what);
    }

    // next non-comment, non-empty line; false at EOF
    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        return false;
    }
};

std::vector<double> parse_numbers(CsvReader& r, const std::string& line, std::size_t expected) {
    std::vector<double> out;
    std::istringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(field, &pos));
        } catch (const std::exception&) {
            r.fail("malformed number '" + field + "'");
        }
    }
    if (out.size() != expected)
        r.fail("expected " + std::to_string(expected) + " columns, got " + std::to_string(out.size()));
    return out;
}

bool is_header_row(const std::string& line) {
    return line.find_first_of("abcdfghijklmnopqrstuvwxyzABCDFGHIJKLMNOPQRSTUVWXYZ_") != std::string::npos;
}

double infer_sample_rate(CsvReader& r, const std::vector<double>& t) {
    if (t.size() < 2) r.fail("need at least two samples");
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) r.fail("time column must be strictly increasing");
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double d = t[i] - t[i - 1];
        if (std::abs(d - dt) > 1e-9 * dt)
            throw DataError(r.path + ": non-uniform sampling at row " + std::to_string(i) + " (" +
                            std::to_string(d) + " vs " + std::to_string(dt) + " s)");
    }
    return 1.0 / dt;
}

}  // namespace

std::string hash_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << h;
    return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << content;
        if (!out.good()) throw DataError("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_psd_csv(const std::string& path, const SpectralDensity& s, const FileMeta& meta) {
    std::ostringstream os;
    os << meta_block(meta);
    os << "# unit " << psd_unit_name(s.unit) << "\n";
    os << "frequency_hz,value\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < s.size(); ++i) os << s.grid[i] << "," << s.values[i] << "\n";
    write_text_atomic(path, os.str());
}

SpectralDensity read_psd_csv(const std::string& path, Unit unit) {
    CsvReader r(path);
    std::string line;
    std::vector<double> f, v;
    bool first = true;
    while (r.next(line)) {
        if (first && is_header_row(line)) {
            first = false;
            continue;
        }
        first = false;
        const auto nums = parse_numbers(r, line, 2);
        f.push_back(nums[0]);
        v.push_back(nums[1]);
    }
    if (f.empty()) throw DataError(path + ": no data rows");
    try {
        return SpectralDensity(FrequencyGrid(std::move(f)), std::move(v), unit);
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_transfer_csv(const std::string& path, const TransferFunction& h, const FileMeta& meta) {
    std::ostringstream os;
    os << meta_block(meta);
    os << "# unit_ratio " << unit_name(h.output) << "/" << unit_name(h.input) << "\n";
    os << "frequency_hz,re,im\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < h.size(); ++i)
        os << h.grid[i] << "," << h.values[i].real() << "," << h.values[i].imag() << "\n";
    write_text_atomic(path, os.str());
}

TransferFunction read_transfer_magphase_csv(const std::string& path) {
    CsvReader r(path);
    std::string line;
    std::vector<double> f;
    std::vector<std::complex<double>> v;
    bool first = true;
    while (r.next(line)) {
        if (first && is_header_row(line)) {
            first = false;
            continue;
        }
        first = false;
        const auto nums = parse_numbers(r, line, 3);
        const double mag = std::pow(10.0, nums[1] / 20.0);
        const double ph = nums[2] * constants::pi / 180.0;
        f.push_back(nums[0]);
        v.emplace_back(mag * std::cos(ph), mag * std::sin(ph));
    }
    if (f.empty()) throw DataError(path + ": no data rows");
    try {
        return TransferFunction(FrequencyGrid(std::move(f)), std::move(v), Unit::dimensionless,
                                Unit::dimensionless);
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_timeseries_csv(const std::string& path, const TimeSeries& x, const FileMeta& meta) {
    std::ostringstream os;
    os << meta_block(meta);
    os << "# unit " << unit_name(x.unit) << "\n";
    os << "time_s,value\n";
    os << std::setprecision(17);
    const double dt = 1.0 / x.sample_rate_hz;
    for (std::size_t i = 0; i < x.size(); ++i) os << static_cast<double>(i) * dt << "," << x.samples[i] << "\n";
    write_text_atomic(path, os.str());
}

TimeSeries read_timeseries_csv(const std::string& path, Unit unit) {
    CsvReader r(path);
    std::string line;
    std::vector<double> t, v;
    bool first = true;
    while (r.next(line)) {
        if (first && is_header_row(line)) {
            first = false;
            continue;
        }
        first = false;
        const auto nums = parse_numbers(r, line, 2);
        t.push_back(nums[0]);
        v.push_back(nums[1]);
    }
    if (t.size() < 2) throw DataError(path + ": need at least two samples");
    const double fs = infer_sample_rate(r, t);
    return TimeSeries(fs, std::move(v), unit);
}

void write_pair_csv(const std::string& path, const TimeSeries& x_a, const TimeSeries& x_b,
                    const FileMeta& meta) {
    if (x_a.size() != x_b.size() || x_a.sample_rate_hz != x_b.sample_rate_hz)
        throw std::invalid_argument("write_pair_csv: channel mismatch");
    std::ostringstream os;
    os << meta_block(meta);
    os << "# unit " << unit_name(x_a.unit) << "\n";
    os << "time_s,x_a,x_b\n";
    os << std::setprecision(17);
    const double dt = 1.0 / x_a.sample_rate_hz;
    for (std::size_t i = 0; i < x_a.size(); ++i)
        os << static_cast<double>(i) * dt << "," << x_a.samples[i] << "," << x_b.samples[i] << "\n";
    write_text_atomic(path, os.str());
}

std::pair<TimeSeries, TimeSeries> read_pair_csv(const std::string& path, Unit unit) {
    CsvReader r(path);
    std::string line;
    std::vector<double> t, a, b;
    bool first = true;
    while (r.next(line)) {
        if (first && is_header_row(line)) {
            first = false;
            continue;
        }
        first = false;
        const auto nums = parse_numbers(r, line, 3);
        t.push_back(nums[0]);
        a.push_back(nums[1]);
        b.push_back(nums[2]);
    }
    if (t.size() < 2) throw DataError(path + ": need at least two samples");
    const double fs = infer_sample_rate(r, t);
    return {TimeSeries(fs, std::move(a), unit), TimeSeries(fs, std::move(b), unit)};
}

}  // namespace torsim
