#include "semauto/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "semauto/io_util.hpp"
#include "semauto/rng.hpp"

namespace semauto {

namespace {

constexpr std::size_t kMaxSampleErrors = 10;

std::vector<std::string_view> split_by(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

bool parse_int(std::string_view s, std::int64_t& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

void ParseStats::record_error(std::size_t line_no, const std::string& what) {
  if (sample_errors.size() < kMaxSampleErrors) {
    sample_errors.push_back("line " + std::to_string(line_no) + ": " + what);
  }
}

bool InteractionDataset::add(const Rating& r) {
  if (r.stars < 1 || r.stars > 5) {
    throw ContractViolation("rating stars must be in [1,5], got " + std::to_string(r.stars));
  }
  auto& per_user = by_user_[r.user];
  auto it = per_user.find(r.item);
  if (it != per_user.end()) {
    ratings_[it->second] = r;  // last occurrence wins
    return false;
  }
  per_user.emplace(r.item, ratings_.size());
  ratings_.push_back(r);
  ++item_counts_[r.item];
  return true;
}

std::vector<UserId> InteractionDataset::users() const {
  std::vector<UserId> out;
  out.reserve(by_user_.size());
  for (const auto& [user, _] : by_user_) out.push_back(user);
  return out;
}

std::vector<ItemId> InteractionDataset::items() const {
  std::vector<ItemId> out;
  out.reserve(item_counts_.size());
  for (const auto& [item, _] : item_counts_) out.push_back(item);
  return out;
}

bool InteractionDataset::contains(UserId user, ItemId item) const {
  return find(user, item) != nullptr;
}

const Rating* InteractionDataset::find(UserId user, ItemId item) const {
  auto uit = by_user_.find(user);
  if (uit == by_user_.end()) return nullptr;
  auto iit = uit->second.find(item);
  if (iit == uit->second.end()) return nullptr;
  return &ratings_[iit->second];
}

std::vector<Rating> InteractionDataset::ratings_of(UserId user) const {
  std::vector<Rating> out;
  auto uit = by_user_.find(user);
  if (uit == by_user_.end()) return out;
  out.reserve(uit->second.size());
  for (const auto& [_, idx] : uit->second) out.push_back(ratings_[idx]);
  return out;
}

std::size_t InteractionDataset::rating_count(UserId user) const {
  auto uit = by_user_.find(user);
  return uit == by_user_.end() ? 0 : uit->second.size();
}

void GenreMap::set(ItemId item, std::vector<std::string> genres) {
  if (genres.empty()) throw ContractViolation("genre set for an item must be non-empty");
  std::sort(genres.begin(), genres.end());
  genres.erase(std::unique(genres.begin(), genres.end()), genres.end());
  genres_[item] = std::move(genres);
}

const std::vector<std::string>* GenreMap::find(ItemId item) const {
  auto it = genres_.find(item);
  return it == genres_.end() ? nullptr : &it->second;
}

std::vector<std::string> GenreMap::all_genres() const {
  std::vector<std::string> out;
  for (const auto& [_, gs] : genres_) out.insert(out.end(), gs.begin(), gs.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RatingsParseResult parse_movielens(const std::string& ratings_path,
                                   const std::string& separator) {
  if (separator.empty()) throw ContractViolation("separator must be non-empty");
  auto in = open_input(ratings_path);

  RatingsParseResult result;
  std::string raw;
  while (std::getline(*in, raw)) {
    ++result.stats.lines;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines, "empty line");
      continue;
    }
    const auto fields = split_by(line, separator);
    if (fields.size() < 3) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines, "expected at least 3 fields");
      continue;
    }
    std::int64_t user = 0, item = 0, stars = 0, ts = 0;
    if (!parse_int(fields[0], user) || !parse_int(fields[1], item) ||
        !parse_int(fields[2], stars)) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines, "non-integer field");
      continue;
    }
    if (stars < 1 || stars > 5) {
      ++result.stats.out_of_range;
      result.stats.record_error(result.stats.lines,
                                "stars out of range: " + std::to_string(stars));
      continue;
    }
    if (fields.size() >= 4) parse_int(fields[3], ts);  // optional; 0 when absent/bad

    Rating r{user, item, static_cast<int>(stars), ts};
    if (!result.dataset.add(r)) {
      ++result.stats.duplicates;
      result.stats.record_error(result.stats.lines, "duplicate (user,item), last wins");
    }
    ++result.stats.accepted;
  }
  return result;
}

GenreParseResult parse_genres(const std::string& movies_path, const std::string& separator) {
  if (separator.empty()) throw ContractViolation("separator must be non-empty");
  auto in = open_input(movies_path);

  GenreParseResult result;
  std::string raw;
  while (std::getline(*in, raw)) {
    ++result.stats.lines;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines, "empty line");
      continue;
    }
    const auto fields = split_by(line, separator);
    if (fields.size() < 3) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines, "expected 3 fields");
      continue;
    }
    std::int64_t item = 0;
    if (!parse_int(fields[0], item)) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines, "non-integer item id");
      continue;
    }
    // Genres are the last field; the title may in principle contain the
    // separator, so everything between is left alone.
    std::vector<std::string> genres;
    for (std::string_view g : split_by(fields.back(), "|")) {
      if (!g.empty()) genres.emplace_back(g);
    }
    if (genres.empty()) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines, "empty genre field, item omitted");
      continue;
    }
    if (result.genres.has(item)) {
      ++result.stats.duplicates;
      result.stats.record_error(result.stats.lines, "duplicate item id, last wins");
    }
    result.genres.set(item, std::move(genres));
    ++result.stats.accepted;
  }
  return result;
}

Real normalize_rating(int stars, Real eps) {
  if (stars < 1 || stars > 5) {
    throw ContractViolation("stars must be in [1,5], got " + std::to_string(stars));
  }
  if (!(eps >= 0 && eps < 0.5)) throw ContractViolation("eps must be in [0, 0.5)");
  const Real v = static_cast<Real>(stars - 1) / 4.0;
  return std::min(std::max(v, eps), 1.0 - eps);
}

SplitPair holdout_split(const InteractionDataset& dataset, Real train_fraction,
                        std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ContractViolation("train_fraction must be in (0,1)");
  }

  SplitPair split;
  for (UserId user : dataset.users()) {
    std::vector<Rating> ratings = dataset.ratings_of(user);  // item-ordered
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(user)));
    deterministic_shuffle(ratings, rng);

    std::size_t train_count =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<Real>(ratings.size()) + 0.5));
    if (ratings.size() == 1) train_count = 1;  // degenerate case: single rating stays in train
    train_count = std::min(train_count, ratings.size());

    for (std::size_t i = 0; i < ratings.size(); ++i) {
      (i < train_count ? split.train : split.test).add(ratings[i]);
    }
  }
  return split;
}

}  // namespace semauto
