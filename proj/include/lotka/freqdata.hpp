#pragma once

// Size-frequency data: how many authors produced exactly n works.
//
// Ingestion (distribution files and author-paper records), right
// truncation, fixed-width binning and truncation-scale reports.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lotka/errors.hpp"

namespace lotka {

using Level = std::int64_t;
using Count = std::int64_t;

struct FrequencyEntry {
  Level level = 1;
  Count authors = 0;

  friend bool operator==(const FrequencyEntry&, const FrequencyEntry&) = default;
};

/// Immutable, validated frequency-of-frequency table.
///
/// Entries are kept sorted by level. Levels are unique and >= 1, counts are
/// non-negative and at least one count is positive. Zero-count entries may be
/// stored but never contribute to max_level().
class FrequencyDistribution {
 public:
  explicit FrequencyDistribution(std::vector<FrequencyEntry> entries,
                                 std::string name = {})
      : entries_(std::move(entries)), name_(std::move(name)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.level < b.level; });
    bool any_positive = false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.level < 1)
        throw InputError("level < 1: " + std::to_string(e.level));
      if (e.authors < 0)
        throw InputError("negative count at level " + std::to_string(e.level));
      if (i > 0 && entries_[i - 1].level == e.level)
        throw InputError("duplicate level " + std::to_string(e.level));
      if (e.authors > 0) {
        any_positive = true;
        total_authors_ += e.authors;
        total_works_ += e.level * e.authors;
        max_level_ = e.level;
      }
    }
    if (!any_positive)
      throw InputError("distribution has no authors");
  }

  std::span<const FrequencyEntry> entries() const { return entries_; }
  const std::string& name() const { return name_; }

  Count total_authors() const { return total_authors_; }
  Count total_works() const { return total_works_; }
  Level max_level() const { return max_level_; }

  Count authors_at(Level level) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), level,
        [](const FrequencyEntry& e, Level l) { return e.level < l; });
    return (it != entries_.end() && it->level == level) ? it->authors : 0;
  }

  /// Populated (authors > 0) levels in ascending order.
  std::vector<FrequencyEntry> populated() const {
    std::vector<FrequencyEntry> out;
    for (const auto& e : entries_)
      if (e.authors > 0) out.push_back(e);
    return out;
  }

  friend bool operator==(const FrequencyDistribution& a,
                         const FrequencyDistribution& b) {
    return a.entries_ == b.entries_ && a.name_ == b.name_;
  }

 private:
  std::vector<FrequencyEntry> entries_;
  std::string name_;
  Count total_authors_ = 0;
  Count total_works_ = 0;
  Level max_level_ = 0;
};

/// Builds a distribution from a level -> count tally.
inline FrequencyDistribution from_tally(const std::map<Level, Count>& tally,
                                        std::string name = {}) {
  std::vector<FrequencyEntry> entries;
  entries.reserve(tally.size());
  for (const auto& [level, n] : tally) entries.push_back({level, n});
  return FrequencyDistribution(std::move(entries), std::move(name));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string at_line(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

// Half-up rounding of 100*num/den to hundredths, in exact integer arithmetic.
inline std::int64_t percent_hundredths(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw InputError("percentage with non-positive denominator");
  return (2 * 10000 * num + den) / (2 * den);
}

}  // namespace detail

inline constexpr std::string_view kDistributionHeader = "level,count";
inline constexpr std::string_view kRecordsHeader = "paper_id,position,author";

/// Parses the `level,count` file format. Levels may appear in any order.
inline FrequencyDistribution parse_distribution(std::istream& in,
                                                std::string name = {}) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::vector<FrequencyEntry> entries;
  std::unordered_set<Level> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (!saw_header) {
      if (text != kDistributionHeader)
        throw InputError(detail::at_line(line_no) + "expected header '" +
                         std::string(kDistributionHeader) + "'");
      saw_header = true;
      continue;
    }
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos)
      throw InputError(detail::at_line(line_no) + "expected 'level,count'");
    const auto level = detail::parse_int(text.substr(0, comma));
    const auto count = detail::parse_int(text.substr(comma + 1));
    if (!level || !count)
      throw InputError(detail::at_line(line_no) + "malformed integer pair '" +
                       std::string(text) + "'");
    if (*level < 1)
      throw InputError(detail::at_line(line_no) + "level < 1");
    if (*count < 0)
      throw InputError(detail::at_line(line_no) + "negative count");
    if (!seen.insert(*level).second)
      throw InputError(detail::at_line(line_no) + "duplicate level " +
                       std::to_string(*level));
    entries.push_back({*level, *count});
  }
  if (!saw_header) throw InputError("empty input");
  if (entries.empty()) throw InputError("no data rows after header");
  return FrequencyDistribution(std::move(entries), std::move(name));
}

inline FrequencyDistribution parse_distribution(std::string_view text,
                                                std::string name = {}) {
  std::istringstream in{std::string(text)};
  return parse_distribution(in, std::move(name));
}

inline std::string serialize_distribution(const FrequencyDistribution& dist) {
  std::string out(kDistributionHeader);
  out += '\n';
  for (const auto& e : dist.entries()) {
    out += std::to_string(e.level);
    out += ',';
    out += std::to_string(e.authors);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Author-paper records

struct AuthorRecord {
  std::string paper_id;
  std::vector<std::string> authors;  // authors[0] is the senior author
};

/// Credits every paper to its first-listed author only and tallies how many
/// authors received 1, 2, 3, ... credits. Authors who are never first do not
/// appear. Names are compared after trimming surrounding whitespace.
inline FrequencyDistribution from_author_records(
    std::span<const AuthorRecord> records, std::string name = {}) {
  if (records.empty()) throw InputError("no author records");
  std::unordered_set<std::string> paper_ids;
  std::unordered_map<std::string, Count> credits;
  for (const auto& r : records) {
    if (r.paper_id.empty()) throw InputError("record with empty paper_id");
    if (!paper_ids.insert(r.paper_id).second)
      throw InputError("duplicate paper_id '" + r.paper_id + "'");
    if (r.authors.empty())
      throw InputError("paper '" + r.paper_id + "' has no authors");
    const auto senior = detail::trim(r.authors.front());
    if (senior.empty())
      throw InputError("paper '" + r.paper_id + "' has an empty senior author");
    ++credits[std::string(senior)];
  }
  std::map<Level, Count> tally;
  for (const auto& [author, n] : credits) ++tally[n];
  return from_tally(tally, std::move(name));
}

/// Parses the `paper_id,position,author` records file. Everything after the
/// second comma is the author name, so names may contain commas.
inline std::vector<AuthorRecord> parse_records(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::vector<std::string> order;
  std::unordered_map<std::string, std::map<std::int64_t, std::string>> papers;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (!saw_header) {
      if (text != kRecordsHeader)
        throw InputError(detail::at_line(line_no) + "expected header '" +
                         std::string(kRecordsHeader) + "'");
      saw_header = true;
      continue;
    }
    if (text.empty()) continue;
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string_view::npos)
      throw InputError(detail::at_line(line_no) +
                       "expected 'paper_id,position,author'");
    const auto paper = detail::trim(text.substr(0, c1));
    const auto position = detail::parse_int(text.substr(c1 + 1, c2 - c1 - 1));
    auto author = detail::trim(text.substr(c2 + 1));
    if (author.size() >= 2 && author.front() == '"' && author.back() == '"')
      author = detail::trim(author.substr(1, author.size() - 2));
    if (paper.empty())
      throw InputError(detail::at_line(line_no) + "empty paper_id");
    if (!position || *position < 1)
      throw InputError(detail::at_line(line_no) + "position must be >= 1");
    if (author.empty())
      throw InputError(detail::at_line(line_no) + "empty author name");
    auto [it, inserted] = papers.try_emplace(std::string(paper));
    if (inserted) order.emplace_back(paper);
    if (!it->second.emplace(*position, std::string(author)).second)
      throw InputError(detail::at_line(line_no) + "duplicate position " +
                       std::to_string(*position) + " for paper '" +
                       std::string(paper) + "'");
  }
  if (!saw_header) throw InputError("empty input");
  std::vector<AuthorRecord> records;
  records.reserve(order.size());
  for (const auto& id : order) {
    const auto& by_position = papers.at(id);
    if (by_position.begin()->first != 1)
      throw InputError("paper '" + id + "' has no position-1 author");
    AuthorRecord r{id, {}};
    for (const auto& [pos, author] : by_position) r.authors.push_back(author);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw InputError("no records after header");
  return records;
}

// ---------------------------------------------------------------------------
// Right truncation

/// Keeps only levels <= cutoff. The author total of the result is that of the
/// kept levels; callers that want the untruncated denominator pass it
/// explicitly when normalising.
inline FrequencyDistribution truncate_right(const FrequencyDistribution& dist,
                                            Level cutoff) {
  if (cutoff < 1) throw InputError("cutoff must be >= 1");
  std::vector<FrequencyEntry> kept;
  bool any_positive = false;
  for (const auto& e : dist.entries()) {
    if (e.level > cutoff) break;
    kept.push_back(e);
    any_positive = any_positive || e.authors > 0;
  }
  if (!any_positive)
    throw InputError("cutoff " + std::to_string(cutoff) +
                     " leaves no populated levels");
  return FrequencyDistribution(std::move(kept), dist.name());
}

struct TruncationReport {
  Level cutoff = 1;
  Level max_level = 1;
  Level removed_level_range = 0;
  Count removed_works = 0;
  // Always 0: the full author total stays in the denominator.
  Count removed_authors_from_denominator = 0;
  // Authors whose level exceeds the cutoff. Reported alongside, never used
  // in the percentages.
  Count removed_authors_physical = 0;
  Count total_works = 0;
  Count total_authors = 0;
  double pct_range = 0.0;
  double pct_works = 0.0;
  double pct_authors = 0.0;
};

inline TruncationReport truncation_report(const FrequencyDistribution& dist,
                                          Level cutoff) {
  if (cutoff < 1) throw InputError("cutoff must be >= 1");
  if (cutoff > dist.max_level())
    throw InputError("cutoff " + std::to_string(cutoff) +
                     " exceeds max level " + std::to_string(dist.max_level()));
  TruncationReport r;
  r.cutoff = cutoff;
  r.max_level = dist.max_level();
  r.total_works = dist.total_works();
  r.total_authors = dist.total_authors();
  r.removed_level_range = dist.max_level() - cutoff;
  for (const auto& e : dist.entries()) {
    if (e.level <= cutoff) continue;
    r.removed_works += e.level * e.authors;
    r.removed_authors_physical += e.authors;
  }
  r.pct_range = static_cast<double>(detail::percent_hundredths(
                    r.removed_level_range, r.max_level)) / 100.0;
  r.pct_works = static_cast<double>(detail::percent_hundredths(
                    r.removed_works, r.total_works)) / 100.0;
  r.pct_authors = static_cast<double>(detail::percent_hundredths(
                      r.removed_authors_from_denominator, r.total_authors)) /
                  100.0;
  return r;
}

/// "12.34%" from a value already rounded to hundredths.
inline std::string format_percent(double pct) {
  const auto hundredths = static_cast<std::int64_t>(pct * 100.0 + 0.5);
  std::string frac = std::to_string(hundredths % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(hundredths / 100) + "." + frac + "%";
}

// ---------------------------------------------------------------------------
// Binning

struct HistogramBin {
  Level range_start = 1;
  Level range_end = 1;
  Count author_count = 0;
  double author_percent = 0.0;
};

struct HistogramBins {
  Level bin_width = 1;
  std::vector<HistogramBin> bins;
};

/// Bin k covers levels [(k-1)*width + 1, k*width]; bins run up to the one
/// containing max_level. Percentages use the distribution's author total.
inline HistogramBins bin_histogram(const FrequencyDistribution& dist,
                                   Level bin_width) {
  if (bin_width < 1) throw InputError("bin width must be >= 1");
  const Level n_bins = (dist.max_level() + bin_width - 1) / bin_width;
  HistogramBins out{bin_width, {}};
  out.bins.reserve(static_cast<std::size_t>(n_bins));
  for (Level k = 0; k < n_bins; ++k)
    out.bins.push_back({k * bin_width + 1, (k + 1) * bin_width, 0, 0.0});
  for (const auto& e : dist.entries()) {
    if (e.authors == 0) continue;
    out.bins[static_cast<std::size_t>((e.level - 1) / bin_width)]
        .author_count += e.authors;
  }
  const auto total = static_cast<double>(dist.total_authors());
  for (auto& b : out.bins)
    b.author_percent = 100.0 * static_cast<double>(b.author_count) / total;
  return out;
}

}  // namespace lotka
