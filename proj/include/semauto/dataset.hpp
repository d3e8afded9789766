#ifndef SEMAUTO_DATASET_HPP
#define SEMAUTO_DATASET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "semauto/errors.hpp"
#include "semauto/types.hpp"

namespace semauto {

struct Rating {
  UserId user = 0;
  ItemId item = 0;
  int stars = 0;                // 1..5
  std::int64_t timestamp = 0;   // carried through, never used

  friend bool operator==(const Rating& a, const Rating& b) {
    return a.user == b.user && a.item == b.item && a.stars == b.stars &&
           a.timestamp == b.timestamp;
  }
};

struct ParseStats {
  std::size_t lines = 0;
  std::size_t accepted = 0;
  std::size_t malformed = 0;
  std::size_t out_of_range = 0;
  std::size_t duplicates = 0;              // re-seen keys; last occurrence wins
  std::vector<std::string> sample_errors;  // first few, with line numbers

  void record_error(std::size_t line_no, const std::string& what);
};

// Ratings with derived user/item views kept consistent on every insert.
// One (user, item) pair maps to exactly one rating; re-adding replaces.
class InteractionDataset {
 public:
  // Returns false when an existing (user, item) rating was replaced.
  bool add(const Rating& r);

  std::size_t size() const { return ratings_.size(); }
  bool empty() const { return ratings_.empty(); }
  const std::vector<Rating>& all() const { return ratings_; }

  std::size_t user_count() const { return by_user_.size(); }
  std::size_t item_count() const { return item_counts_.size(); }

  std::vector<UserId> users() const;  // ascending
  std::vector<ItemId> items() const;  // ascending

  bool contains(UserId user, ItemId item) const;
  const Rating* find(UserId user, ItemId item) const;

  // User's ratings ordered by item id (canonical, input-order independent).
  std::vector<Rating> ratings_of(UserId user) const;
  std::size_t rating_count(UserId user) const;

 private:
  std::vector<Rating> ratings_;
  std::map<UserId, std::map<ItemId, std::size_t>> by_user_;  // -> index into ratings_
  std::map<ItemId, std::size_t> item_counts_;
};

class GenreMap {
 public:
  void set(ItemId item, std::vector<std::string> genres);  // sorted+deduped; empty set rejected
  const std::vector<std::string>* find(ItemId item) const;
  bool has(ItemId item) const { return genres_.count(item) != 0; }
  std::size_t size() const { return genres_.size(); }
  std::vector<std::string> all_genres() const;  // sorted union
  const std::map<ItemId, std::vector<std::string>>& entries() const { return genres_; }

 private:
  std::map<ItemId, std::vector<std::string>> genres_;
};

struct SplitPair {
  InteractionDataset train;
  InteractionDataset test;
};

struct RatingsParseResult {
  InteractionDataset dataset;
  ParseStats stats;
};

struct GenreParseResult {
  GenreMap genres;
  ParseStats stats;
};

// MovieLens ratings file: UserID<sep>MovieID<sep>Rating[<sep>Timestamp].
// Malformed lines and out-of-range stars are counted and skipped.
RatingsParseResult parse_movielens(const std::string& ratings_path,
                                   const std::string& separator = "::");

// MovieLens movies file: MovieID<sep>Title<sep>Genre|Genre|...
GenreParseResult parse_genres(const std::string& movies_path,
                              const std::string& separator = "::");

// Min-max over the 5-star scale bounds, clamped into [eps, 1-eps] because
// sigmoid outputs never reach 0 or 1 exactly.
Real normalize_rating(int stars, Real eps = 0.01);

// Per-user random partition: train gets round-half-up(fraction * count)
// ratings, the remainder goes to test. A user with a single rating keeps it
// in train. Pure function of (dataset, fraction, seed).
SplitPair holdout_split(const InteractionDataset& dataset, Real train_fraction,
                        std::uint64_t seed);

}  // namespace semauto

#endif  // SEMAUTO_DATASET_HPP
