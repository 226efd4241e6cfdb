#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "failsafe/estimator.hpp"

namespace failsafe::io {

using Json = nlohmann::ordered_json;

// Structural problem with an input file (missing header, bad quoting, ...).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem confined to one data row; `row` is 1-based and excludes the header.
class RowError : public FormatError {
 public:
  RowError(int row, std::string field, const std::string& what);
  int row() const { return row_; }
  const std::string& field() const { return field_; }

 private:
  int row_;
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StudyKind { ZScores, EffectSe };

struct StudyRow {
  int row;  // 1-based data row
  std::optional<std::string> label;
  double z;
  std::optional<double> effect;
  std::optional<double> se;
};

struct StudyTable {
  StudyKind kind = StudyKind::ZScores;
  std::vector<StudyRow> rows;

  StudySet to_study_set() const;
};

// Header must name either `z` or `effect,se`; an optional `label` (or
// `study`) column is kept. Other columns are ignored.
StudyTable parse_study_csv(std::istream& in);
StudyTable read_study_csv(const std::filesystem::path& path);

// RFC 4180 records: quoted fields may hold commas, quotes ("") and newlines.
// Accepts LF or CRLF line endings.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

// 17 significant digits; integral values keep a trailing ".0" so that the
// text always reads back as a floating-point number.
std::string format_number(double x);
std::string csv_escape(const std::string& field);

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::string to_csv() const;
  Json to_json() const;  // array of row objects keyed by column name
};

enum class Format { Json, Csv };

Format parse_format(const std::string& name);
std::string to_string(Format f);

// A command's output: `data` is the primary table; `sections` are further
// named JSON blocks (fit, ks, ...). JSON renders as
//   {"meta": ..., "data": [...], <sections>...}
// CSV renders only the data table.
struct Emission {
  Json meta = Json::object();
  Table data;
  Json sections = Json::object();

  std::string render(Format f) const;
  Json to_json() const;
};

// Writes `text` to `path`; "-" selects `stdout_stream`.
void write_text(const std::string& text, const std::string& path, std::ostream& stdout_stream);

// Renders and writes. Throws IoError when the path cannot be written.
void emit(const Emission& e, Format f, const std::string& path, std::ostream& stdout_stream);

}  // namespace failsafe::io
