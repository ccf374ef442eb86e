#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qualsim {

inline constexpr int kAssociationCount = 45;
inline constexpr int kSeasonCount = 5;
inline constexpr std::array<std::string_view, kSeasonCount> kSeasonLabels = {
    "2015/16", "2016/17", "2017/18", "2018/19", "2019/20"};

// Kosovo joined in 2017/18; earlier seasons carry a synthetic rank-55 row.
inline constexpr std::string_view kLateEntrant = "Kosovo";
inline constexpr int kLateEntrantFirstSeason = 2;
inline constexpr int kLateEntrantSyntheticRank = 55;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact decimal with six fractional digits. UEFA club coefficients carry up
// to three, so parsing and printing never round.
class Coefficient {
 public:
  constexpr Coefficient() = default;
  static constexpr Coefficient from_micros(std::int64_t micros) {
    Coefficient c;
    c.micros_ = micros;
    return c;
  }
  // Throws DataError on anything that is not a plain non-negative decimal.
  static Coefficient parse(std::string_view text);

  constexpr std::int64_t micros() const { return micros_; }
  double to_double() const { return static_cast<double>(micros_) / 1e6; }
  // Shortest exact form: "87.755", "20.5", "0".
  std::string to_string() const;

  constexpr auto operator<=>(const Coefficient&) const = default;

 private:
  std::int64_t micros_ = 0;
};

struct SeasonId {
  int index = 0;

  std::string_view label() const { return kSeasonLabels.at(index); }
  static std::optional<SeasonId> parse(std::string_view label);
  constexpr auto operator<=>(const SeasonId&) const = default;
};

struct AssociationId {
  std::string name;
  int index = 0;
};

struct ChampionProfile {
  Coefficient coefficient;
  double elo = 0.0;
};

struct NonParticipant {
  std::string name;
  int rank = 0;
};

// One season of ranks, coefficients and Elo, indexed by association index.
struct SeasonTable {
  SeasonId season;
  std::vector<std::optional<int>> ranks;
  // Empty for a synthetic row (an association that had no champion that season).
  std::vector<std::optional<ChampionProfile>> profiles;
  // Associations holding an access-list rank without fielding a champion.
  std::vector<NonParticipant> non_participants;

  bool present(int association) const { return profiles.at(association).has_value(); }
};

struct Dataset {
  std::vector<std::string> associations;
  std::vector<SeasonTable> seasons;

  int association_count() const { return static_cast<int>(associations.size()); }
  int season_count() const { return static_cast<int>(seasons.size()); }
  // -1 when unknown.
  int index_of(std::string_view name) const;
  AssociationId id(int index) const { return {associations.at(index), index}; }
};

enum class ViolationKind {
  season_count,
  association_count,
  duplicate_association,
  missing_association,
  duplicate_rank,
  rank_out_of_range,
  missing_profile,
  invalid_profile,
  late_entrant_presence,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

// Checks the shipped-dataset contract: five seasons, 45 associations with a
// rank in every season, distinct ranks, complete profiles except for the late
// entrant's synthetic seasons.
ValidationReport validate_dataset(const Dataset& dataset);

// ---------------------------------------------------------------------------
// Qualifying formats

enum class TieKind { one_leg, two_leg };
enum class RoundStructure { pairwise, mini_knockout };

std::string_view to_string(TieKind kind);
std::string_view to_string(RoundStructure structure);

struct RankRange {
  int first = 0;
  int last = -1;

  int size() const { return last - first + 1; }
  bool contains(int rank) const { return rank >= first && rank <= last; }
  bool operator==(const RankRange&) const = default;
};

struct RoundSpec {
  std::string label;
  std::optional<RankRange> entry;
  TieKind tie = TieKind::two_leg;
  RoundStructure structure = RoundStructure::pairwise;
  // True when the round is drawn after the previous round has finished, so
  // winners are potted with their own coefficients instead of carried ones.
  bool actual_coefficients = false;

  bool operator==(const RoundSpec&) const = default;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A qualifying regime. Ranks are access-list ranks; `vacancy_round` names the
// round whose rank interval absorbs non-participating associations.
struct FormatSpec {
  std::string name;
  RankRange direct;
  std::string vacancy_round;
  std::vector<RoundSpec> rounds;

  // Teams playing in each round, assuming exactly `vacancies` non-participants.
  std::vector<int> round_sizes(int vacancies = 1) const;
  int qualifiers_from_rounds(int vacancies = 1) const;
  int group_stage_teams(int vacancies = 1) const;
  // Matches or ties needed to play every round (a mini-knockout counts 3).
  int clash_count(int vacancies = 1) const;
  // Throws FormatError when the rounds cannot be played with `vacancies`.
  void validate(int vacancies = 1) const;

  bool operator==(const FormatSpec&) const = default;
};

FormatSpec parse_format(std::string_view text);
FormatSpec load_format(const std::string& path);
std::string format_to_text(const FormatSpec& format);

}  // namespace qualsim
