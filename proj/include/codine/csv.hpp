#ifndef CODINE_CSV_HPP
#define CODINE_CSV_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "codine/matrix.hpp"

namespace codine {

class CsvError : public std::runtime_error {
  public:
    explicit CsvError(const std::string &msg) : std::runtime_error(msg) {}
};

struct CsvTable {
    std::vector<std::string> header;  // empty when the file had none
    Matrix data;
};

// Comma-separated numeric table. Lines starting with '#' are comments; a
// first row with any non-numeric token is taken as the header. Ragged rows
// and unparsable fields raise CsvError with row/column context.
CsvTable read_csv(const std::string &path);

// Writes `comments` as '#'-prefixed lines, then the header (if nonempty),
// then the data with round-trip-exact doubles.
void write_csv(const std::string &path, const std::vector<std::string> &header,
               const Matrix &data, const std::vector<std::string> &comments = {});

std::string format_double(double v);  // shortest round-trip representation

}  // namespace codine

#endif  // CODINE_CSV_HPP
