#include "ivsel/io.hpp"

#include "ivsel/error.hpp"
#include "ivsel/model.hpp"
#include "ivsel/rng.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ivsel {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(begin, end - begin + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
    return out;
}

void write_provenance(std::ostream& out, const Provenance& prov) {
    for (const auto& [k, v] : prov.entries) out << "# " << k << ": " << v << '\n';
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

void Provenance::add(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
}

void Provenance::add(std::string key, double value) { add(std::move(key), format_double(value)); }

std::optional<std::string> Provenance::get(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    return std::nullopt;
}

std::string config_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Provenance make_provenance(const std::string& config_text) {
    Provenance prov;
    prov.add("ivsel-version", std::string(IVSEL_VERSION_STRING));
    prov.add("rng", std::string(Rng::algorithm));
    prov.add("config-hash", config_hash(config_text));
    return prov;
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorKind::ParseError, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto body = line.substr(1);
            const auto colon = body.find(':');
            if (colon != std::string::npos) table.provenance.add(trim(body.substr(0, colon)), trim(body.substr(colon + 1)));
            continue;
        }
        auto cells = split_cells(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            fail(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                            std::to_string(table.header.size()) + " cells, found " +
                                            std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) fail(ErrorKind::ParseError, path.string() + ": missing header row");
    return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    auto out = open_out(path);
    write_provenance(out, table.provenance);
    auto write_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    write_row(table.header);
    for (const auto& row : table.rows) write_row(row);
    if (!out) fail(ErrorKind::IoError, "failed writing " + path.string());
}

double parse_double(const std::string& cell, const std::string& where) {
    if (cell.empty()) fail(ErrorKind::ParseError, where + ": empty cell");
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || (errno == ERANGE && std::isinf(value)))
        fail(ErrorKind::ParseError, where + ": not a number '" + cell + "'");
    return value;
}

Matrix read_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* names) {
    const CsvTable table = read_csv(path);
    Matrix m(static_cast<Index>(table.rows.size()), static_cast<Index>(table.header.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            m(static_cast<Index>(r), static_cast<Index>(c)) = parse_double(
                table.rows[r][c], path.string() + " row " + std::to_string(r + 1) + " column " + table.header[c]);
        }
    }
    if (names) *names = table.header;
    return m;
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      const Matrix& values, const Provenance& provenance) {
    require(static_cast<Index>(names.size()) == values.cols(), ErrorKind::DimensionMismatch,
            "column names differ from matrix width");
    auto out = open_out(path);
    write_provenance(out, provenance);
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << '\n';
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
        out << '\n';
    }
    if (!out) fail(ErrorKind::IoError, "failed writing " + path.string());
}

std::vector<std::optional<std::vector<int>>> read_instrument_map(const std::filesystem::path& path,
                                                                 Index p, Index q) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    std::vector<std::optional<std::vector<int>>> groups(static_cast<std::size_t>(p));
    std::string line;
    std::size_t line_no = 0;
    auto parse_error = [&](const std::string& what) {
        fail(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    auto parse_index = [&](const std::string& token, Index bound, const char* what) {
        char* end = nullptr;
        const long v = std::strtol(token.c_str(), &end, 10);
        if (token.empty() || end != token.c_str() + token.size()) parse_error(std::string("bad ") + what + " '" + token + "'");
        if (v < 1 || v > bound) parse_error(std::string(what) + " " + token + " out of range");
        return static_cast<int>(v - 1);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) parse_error("expected 'regressor: instruments'");
        const int j = parse_index(trim(line.substr(0, colon)), p, "regressor index");
        auto& slot = groups[static_cast<std::size_t>(j)];
        if (slot) parse_error("regressor " + std::to_string(j + 1) + " mapped twice");

        std::string rest = line.substr(colon + 1);
        std::replace(rest.begin(), rest.end(), ',', ' ');
        std::istringstream is(rest);
        std::vector<int> list;
        std::string token;
        while (is >> token) list.push_back(parse_index(token, q, "instrument index"));
        if (list.empty()) parse_error("regressor " + std::to_string(j + 1) + " has no instruments");
        slot = std::move(list);
    }
    return groups;
}

void write_instrument_map(const std::filesystem::path& path, const InstrumentMap& map,
                          const Provenance& provenance) {
    auto out = open_out(path);
    write_provenance(out, provenance);
    for (std::size_t j = 0; j < map.groups.size(); ++j) {
        out << (j + 1) << ':';
        for (int l : map.groups[j]) out << ' ' << (l + 1);
        out << '\n';
    }
}

LoadedDataset load_dataset(const std::filesystem::path& y_path, const std::filesystem::path& x_path,
                           const std::filesystem::path& w_path, const std::filesystem::path& map_path) {
    LoadedDataset out;
    DesignData& d = out.data;
    std::vector<std::string> y_names;
    const Matrix y = read_matrix_csv(y_path, &y_names);
    if (y.cols() != 1)
        fail(ErrorKind::DimensionMismatch, y_path.string() + ": expected one column, found " + std::to_string(y.cols()));
    d.y = y.col(0);
    d.X = read_matrix_csv(x_path, &d.x_names);
    d.W = read_matrix_csv(w_path, &d.w_names);
    if (d.X.rows() != d.n() || d.W.rows() != d.n()) {
        fail(ErrorKind::DimensionMismatch, "row counts differ: y " + std::to_string(d.n()) + ", X " +
                                               std::to_string(d.X.rows()) + ", W " + std::to_string(d.W.rows()));
    }
    d.validate();

    std::vector<std::optional<std::vector<int>>> listed(static_cast<std::size_t>(d.p()));
    if (!map_path.empty()) listed = read_instrument_map(map_path, d.p(), d.q());

    std::unordered_map<std::string, int> w_index;
    for (std::size_t l = 0; l < d.w_names.size(); ++l) w_index.emplace(d.w_names[l], static_cast<int>(l));

    out.map.groups.resize(static_cast<std::size_t>(d.p()));
    for (Index j = 0; j < d.p(); ++j) {
        auto& group = out.map.groups[static_cast<std::size_t>(j)];
        if (const auto& entry = listed[static_cast<std::size_t>(j)]) {
            group = *entry;
            continue;
        }
        const auto& name = d.x_names[static_cast<std::size_t>(j)];
        const auto it = w_index.find(name);
        if (it == w_index.end()) {
            fail(ErrorKind::UnmappedRegressor, "regressor " + std::to_string(j + 1) + " ('" + name +
                                                   "') has no instruments and no same-named instrument column");
        }
        group = {it->second};
    }
    out.map.validate(d.q());
    d = normalize_instruments(std::move(d));
    return out;
}

void write_dataset(const std::filesystem::path& dir, const DesignData& data, const InstrumentMap& map,
                   const Provenance& provenance) {
    std::filesystem::create_directories(dir);
    auto names = [](const std::vector<std::string>& given, Index count, const char* prefix) {
        if (static_cast<Index>(given.size()) == count) return given;
        std::vector<std::string> out;
        for (Index j = 0; j < count; ++j) out.push_back(prefix + std::to_string(j + 1));
        return out;
    };
    write_matrix_csv(dir / "y.csv", {"y"}, data.y, provenance);
    write_matrix_csv(dir / "X.csv", names(data.x_names, data.p(), "x"), data.X, provenance);
    const bool rescale = data.normalized && data.instrument_scales.size() == data.q();
    const Matrix w = rescale ? Matrix(data.W * data.instrument_scales.asDiagonal()) : data.W;
    write_matrix_csv(dir / "W.csv", names(data.w_names, data.q(), "w"), w, provenance);
    write_instrument_map(dir / "map.txt", map, provenance);
}

void write_truth(const std::filesystem::path& path, const GroundTruth& truth, const Provenance& provenance) {
    write_matrix_csv(path, {"theta_star"}, truth.theta_star, provenance);
}

Vector read_truth(const std::filesystem::path& path) {
    const Matrix m = read_matrix_csv(path);
    if (m.cols() != 1) fail(ErrorKind::DimensionMismatch, path.string() + ": expected one column");
    return m.col(0);
}

}  // namespace ivsel
