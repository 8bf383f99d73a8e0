#pragma once

// File formats.
//
//  * CSV: comma separated, one header row, numbers in full-precision
//    scientific notation ("%.16e") so every double parses back exactly.
//    Leading lines starting with '#' form the provenance block
//    ("# key: value") and are skipped by readers.
//  * Instrument map: one line per regressor, "j: l1 l2 ..." with 1-based
//    regressor and instrument indices (commas or spaces between instruments).
//    '#' starts a comment.

#include "ivsel/simgen.hpp"
#include "ivsel/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ivsel {

std::string format_double(double x);

/// Ordered provenance entries rendered as "# key: value" lines.
struct Provenance {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value);
    void add(std::string key, double value);
    /// Looks up a key; nullopt if absent.
    std::optional<std::string> get(const std::string& key) const;
};

/// Version, RNG algorithm, config hash and any extra entries.
Provenance make_provenance(const std::string& config_text);

/// FNV-1a 64-bit, rendered as 16 hex digits.
std::string config_hash(const std::string& text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    Provenance provenance;

    std::size_t column(const std::string& name) const;  ///< throws ParseError if absent
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

double parse_double(const std::string& cell, const std::string& where);

/// Numeric matrix with one column per header entry.
Matrix read_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* names = nullptr);
void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      const Matrix& values, const Provenance& provenance = {});

/// Parsed map file: entry j holds the 0-based instrument list for regressor j,
/// or nullopt when the file does not mention it.
std::vector<std::optional<std::vector<int>>> read_instrument_map(const std::filesystem::path& path,
                                                                 Index p, Index q);
void write_instrument_map(const std::filesystem::path& path, const InstrumentMap& map,
                          const Provenance& provenance = {});

struct LoadedDataset {
    DesignData data;
    InstrumentMap map;
};

/// Reads y, X, W (and optionally the map), validates shapes and normalizes
/// the instruments. Regressors missing from the map instrument themselves
/// through the W column carrying the same header name.
LoadedDataset load_dataset(const std::filesystem::path& y_path, const std::filesystem::path& x_path,
                           const std::filesystem::path& w_path,
                           const std::filesystem::path& map_path = {});

/// Writes y.csv, X.csv, W.csv and map.txt into `dir`. Normalized instruments
/// are multiplied back by their stored scales, so W.csv holds the original
/// columns and loading the directory recovers the scales.
void write_dataset(const std::filesystem::path& dir, const DesignData& data, const InstrumentMap& map,
                   const Provenance& provenance = {});

/// truth.csv: one column "theta_star".
void write_truth(const std::filesystem::path& path, const GroundTruth& truth,
                 const Provenance& provenance = {});
Vector read_truth(const std::filesystem::path& path);

}  // namespace ivsel
