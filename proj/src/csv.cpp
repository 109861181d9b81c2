#include "nbrshap/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nbrshap/errors.hpp"

namespace nbrshap {
namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\r' && i + 1 == line.size()) {
            // tolerate CRLF
        } else {
            cur += c;
        }
    }
    if (quoted) {
        throw ConfigError("csv: unterminated quote on line " + std::to_string(line_no));
    }
    fields.push_back(std::move(cur));
    return fields;
}

double parse_number(const std::string& field, std::size_t line_no) {
    const char* text = field.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text, &end);
    while (end && (*end == ' ' || *end == '\t')) ++end;
    if (end == text || (end && *end != '\0')) {
        throw ConfigError("csv: non-numeric cell '" + field + "' on line " +
                          std::to_string(line_no));
    }
    return v;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::pair<std::string, FeatureKind>> read_schema_file(
    const std::filesystem::path& schema) {
    std::ifstream in(schema);
    if (!in) throw ConfigError("cannot open schema file: " + schema.string());
    std::vector<std::pair<std::string, FeatureKind>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto colon = line.rfind(':');
        if (colon == std::string::npos) {
            throw ConfigError("schema: expected name:kind on line " + std::to_string(line_no));
        }
        const std::string name = line.substr(0, colon);
        const std::string kind = line.substr(colon + 1);
        if (kind == "continuous") {
            out.emplace_back(name, FeatureKind::continuous);
        } else if (kind == "categorical") {
            out.emplace_back(name, FeatureKind::categorical);
        } else {
            throw ConfigError("schema: unknown kind '" + kind + "' on line " +
                              std::to_string(line_no));
        }
    }
    return out;
}

Dataset read_dataset_csv(const std::filesystem::path& csv,
                         const std::optional<std::filesystem::path>& schema) {
    std::ifstream in(csv);
    if (!in) throw ConfigError("cannot open dataset: " + csv.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv: empty file " + csv.string());
    const auto names = split_csv_line(line, 1);
    const std::size_t m = names.size();

    std::vector<FeatureKind> kinds(m, FeatureKind::continuous);
    if (schema) {
        const auto declared = read_schema_file(*schema);
        check_same_width(declared.size(), m, "schema");
        for (std::size_t j = 0; j < m; ++j) {
            if (declared[j].first != names[j]) {
                throw ConfigError("schema: feature '" + declared[j].first +
                                  "' does not match csv header '" + names[j] + "'");
            }
            kinds[j] = declared[j].second;
        }
    }

    std::vector<double> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const auto fields = split_csv_line(line, line_no);
        if (fields.size() != m) {
            throw ConfigError("csv: line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(m));
        }
        for (const auto& f : fields) rows.push_back(parse_number(f, line_no));
    }
    return Dataset(std::vector<std::string>(names.begin(), names.end()), std::move(kinds),
                   std::move(rows));
}

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& csv) {
    std::ofstream out(csv);
    if (!out) throw ConfigError("cannot write dataset: " + csv.string());
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        if (j) out << ',';
        out << csv_escape(ds.name(j));
    }
    out << '\n';
    for (std::size_t l = 0; l < ds.n_rows(); ++l) {
        for (std::size_t j = 0; j < ds.n_features(); ++j) {
            if (j) out << ',';
            out << format_g17(ds.at(l, j));
        }
        out << '\n';
    }
    if (!out) throw ConfigError("write failed: " + csv.string());
}

void write_schema_file(const Dataset& ds, const std::filesystem::path& schema) {
    std::ofstream out(schema);
    if (!out) throw ConfigError("cannot write schema: " + schema.string());
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        out << ds.name(j) << ':'
            << (ds.kind(j) == FeatureKind::categorical ? "categorical" : "continuous")
            << '\n';
    }
}

}  // namespace nbrshap
