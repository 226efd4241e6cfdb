#include "failsafe/cli/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "failsafe/error.hpp"

namespace failsafe::io {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank_record(const std::vector<std::string>& rec) {
  return std::all_of(rec.begin(), rec.end(), [](const std::string& f) { return trim(f).empty(); });
}

double parse_cell(const std::string& raw, int row, const std::string& field) {
  const std::string cell = trim(raw);
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw RowError(row, field, "value '" + cell + "' is not a number");
  }
  if (!std::isfinite(value)) throw RowError(row, field, "value must be finite");
  return value;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::initializer_list<const char*> names) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (const char* n : names) {
      if (header[i] == n) return i;
    }
  }
  return std::nullopt;
}

}  // namespace

RowError::RowError(int row, std::string field, const std::string& what)
    : FormatError("row " + std::to_string(row) + ", field `" + field + "`: " + what), row_(row), field_(std::move(field)) {}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool any = false;
  char c;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    any = false;
  };
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!trim(field).empty() || field_was_quoted) throw FormatError("csv: stray quote inside an unquoted field");
        field.clear();
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        if (field_was_quoted && c != ' ' && c != '\t') throw FormatError("csv: text after closing quote");
        field.push_back(c);
    }
  }
  if (in_quotes) throw FormatError("csv: unterminated quoted field");
  if (any) end_record();
  return records;
}

StudyTable parse_study_csv(std::istream& in) {
  auto records = parse_csv(in);
  records.erase(std::remove_if(records.begin(), records.end(), blank_record), records.end());
  if (records.empty()) throw FormatError("missing header: expected a `z` column or `effect,se` columns");

  std::vector<std::string> header;
  for (const auto& h : records.front()) header.push_back(lower(trim(h)));
  const auto z_col = find_column(header, {"z"});
  const auto effect_col = find_column(header, {"effect"});
  const auto se_col = find_column(header, {"se"});
  const auto label_col = find_column(header, {"label", "study"});

  StudyTable table;
  if (z_col && (effect_col || se_col)) {
    throw FormatError("mixed row kinds: header names both `z` and `effect`/`se`");
  } else if (z_col) {
    table.kind = StudyKind::ZScores;
  } else if (effect_col && se_col) {
    table.kind = StudyKind::EffectSe;
  } else if (effect_col || se_col) {
    throw FormatError("header names only one of `effect` and `se`");
  } else {
    throw FormatError("missing header: expected a `z` column or `effect,se` columns");
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const int row = static_cast<int>(r);
    if (rec.size() != header.size()) {
      throw RowError(row, "*", "expected " + std::to_string(header.size()) + " fields, found " +
                                   std::to_string(rec.size()));
    }
    StudyRow sr{};
    sr.row = row;
    if (label_col) sr.label = trim(rec[*label_col]);
    if (table.kind == StudyKind::ZScores) {
      sr.z = parse_cell(rec[*z_col], row, "z");
    } else {
      sr.effect = parse_cell(rec[*effect_col], row, "effect");
      sr.se = parse_cell(rec[*se_col], row, "se");
      if (!(*sr.se > 0.0)) throw RowError(row, "se", "standard error must be > 0");
      sr.z = *sr.effect / *sr.se;
    }
    table.rows.push_back(std::move(sr));
  }
  if (table.rows.empty()) throw FormatError("study table has a header but no rows");
  return table;
}

StudyTable read_study_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open study table '" + path.string() + "'");
  return parse_study_csv(in);
}

StudySet StudyTable::to_study_set() const {
  std::vector<double> z;
  z.reserve(rows.size());
  for (const auto& r : rows) z.push_back(r.z);
  return StudySet(std::move(z));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width does not match its columns");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_escape(columns[i]);
  out << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out << format_number(v);
            else if constexpr (std::is_same_v<T, long long>) out << v;
            else if constexpr (std::is_same_v<T, bool>) out << (v ? "true" : "false");
            else out << csv_escape(v);
          },
          row[i]);
    }
    out << "\r\n";
  }
  return out.str();
}

Json Table::to_json() const {
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              obj[columns[i]] = std::isfinite(v) ? Json(v) : Json(nullptr);
            } else {
              obj[columns[i]] = v;
            }
          },
          row[i]);
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

Format parse_format(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  throw DomainError("unknown format '" + name + "' (expected json or csv)");
}

std::string to_string(Format f) { return f == Format::Json ? "json" : "csv"; }

Json Emission::to_json() const {
  Json j = Json::object();
  j["meta"] = meta;
  j["data"] = data.to_json();
  for (const auto& [key, value] : sections.items()) j[key] = value;
  return j;
}

std::string Emission::render(Format f) const {
  if (f == Format::Csv) return data.to_csv();
  return to_json().dump(2) + "\n";
}

void write_text(const std::string& text, const std::string& path, std::ostream& stdout_stream) {
  if (path.empty() || path == "-") {
    stdout_stream << text;
    stdout_stream.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void emit(const Emission& e, Format f, const std::string& path, std::ostream& stdout_stream) {
  write_text(e.render(f), path, stdout_stream);
}

}  // namespace failsafe::io
