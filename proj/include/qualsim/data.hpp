#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qualsim/model.hpp"

namespace qualsim::data {

// Malformed input; row and column are 1-based and 0 when not applicable.
class ParseError : public DataError {
 public:
  ParseError(const std::string& file, std::size_t row, std::size_t column, const std::string& what);
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class ValidationError : public DataError {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct DatasetBundle {
  Dataset dataset;
  std::string provenance;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws ParseError naming `file` when the column is absent.
  std::size_t column(std::string_view name, const std::string& file) const;
};

// Comma-separated, optional double-quoted fields, first line is the header.
CsvTable parse_csv(std::string_view text, const std::string& file);

// Reads ranks.csv, coefficients.csv and elo.csv from `directory`.
// Throws ParseError for malformed files and ValidationError when the result
// fails validate_dataset.
DatasetBundle load_fixtures(const std::filesystem::path& directory, bool validate = true);

// Writes the three CSV files; load_fixtures(write_fixtures(b)) reproduces b.
void write_fixtures(const Dataset& dataset, const std::filesystem::path& directory);

// ---------------------------------------------------------------------------
// Club Elo snapshots

class FetchError : public std::runtime_error {
 public:
  FetchError(const std::string& what, bool retryable) : std::runtime_error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

// association -> club name as spelled by the Club Elo API, for one season.
struct ClubMapping {
  std::string season;
  std::map<std::string, std::string> club_of;
};

// CSV with header association,season,club.
std::vector<ClubMapping> load_club_mapping(const std::filesystem::path& path);

struct EloSnapshot {
  // Rows in the elo.csv schema, in mapping order.
  std::vector<std::vector<std::string>> rows;
  // Associations whose club was not present in the response.
  std::vector<std::string> missing;

  std::string to_csv() const;
};

// Filters a per-date API response (columns Rank,Club,Country,...,Elo,...) down
// to the mapped clubs. Throws FetchError("no rows") for an empty response.
EloSnapshot parse_clubelo_snapshot(std::string_view body, const ClubMapping& mapping);

// GET http://api.clubelo.com/<date>. `date` is YYYY-MM-DD.
std::string fetch_clubelo_body(const std::string& date, const std::string& host = "api.clubelo.com");

EloSnapshot fetch_clubelo_snapshot(const std::string& date, const ClubMapping& mapping);

}  // namespace qualsim::data
