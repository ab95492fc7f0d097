#include "codine/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace codine {

namespace {

std::vector<std::string> split_fields(const std::string &line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_double(const std::string &s, double &out) {
    if (s.empty()) return false;
    const char *begin = s.data();
    const char *end = begin + s.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Prefer the shorter form when it round-trips.
    char shorter[32];
    for (int prec = 1; prec < 17; ++prec) {
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back = 0.0;
        if (parse_double(shorter, back) && back == v) return shorter;
    }
    return buf;
}

CsvTable read_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open '" + path + "'");

    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool saw_data = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;

        std::vector<double> row(fields.size());
        bool numeric = true;
        std::size_t bad_col = 0;
        for (std::size_t c = 0; c < fields.size(); ++c)
            if (!parse_double(fields[c], row[c])) {
                numeric = false;
                bad_col = c;
                break;
            }

        if (!numeric) {
            if (!saw_data && table.header.empty()) {
                table.header = fields;
                width = fields.size();
                continue;
            }
            throw CsvError("'" + path + "': non-numeric field at line " +
                           std::to_string(line_no) + ", column " + std::to_string(bad_col + 1));
        }
        if (!saw_data && width == 0) width = fields.size();
        if (fields.size() != width)
            throw CsvError("'" + path + "': ragged row at line " + std::to_string(line_no) +
                           " (expected " + std::to_string(width) + " columns, got " +
                           std::to_string(fields.size()) + ")");
        saw_data = true;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw CsvError("'" + path + "': no data rows");

    table.data = Matrix(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j) table.data(i, j) = rows[i][j];
    return table;
}

void write_csv(const std::string &path, const std::vector<std::string> &header,
               const Matrix &data, const std::vector<std::string> &comments) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write '" + path + "'");
    for (const auto &c : comments) out << "# " << c << "\n";
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j)
            out << (j ? "," : "") << header[j];
        out << "\n";
    }
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < data.cols(); ++j)
            out << (j ? "," : "") << format_double(data(i, j));
        out << "\n";
    }
    if (!out) throw CsvError("write to '" + path + "' failed");
}

}  // namespace codine
