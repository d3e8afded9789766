#ifndef SEMAUTO_PROTOCOL_HPP
#define SEMAUTO_PROTOCOL_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "semauto/autoencoder.hpp"
#include "semauto/dataset.hpp"
#include "semauto/metrics.hpp"
#include "semauto/profile.hpp"
#include "semauto/recommend.hpp"

namespace semauto {

// Cold-start scenario: the training ratings of the chosen cold users are
// moved out of the training set into a frozen pool.
struct ColdScenario {
  std::vector<UserId> cold_users;    // ascending
  InteractionDataset reduced_train;  // training set without cold users' ratings
  InteractionDataset frozen;         // exactly those ratings
  std::uint64_t seed = 0;
};

// Users whose test-set rating count reaches the threshold.
std::vector<UserId> select_cold_candidates(const SplitPair& split,
                                           std::size_t min_test_ratings);

// Picks round(fraction * |candidates|) cold users deterministically from the
// candidate set and freezes their training ratings.
ColdScenario make_cold_scenario(const SplitPair& split,
                                const std::vector<UserId>& candidates, Real fraction,
                                std::uint64_t seed);

struct RestoreResult {
  std::vector<Rating> restored;       // exactly n per surviving cold user
  std::vector<UserId> dropped_users;  // cold users with fewer than n frozen ratings
};

// Picks n frozen ratings per cold user to put back into training. The pick
// depends only on (seed, user id), so the n-sets are nested across n and
// independent of iteration order.
RestoreResult restore_n_ratings(const ColdScenario& scenario, std::size_t n,
                                std::uint64_t seed);

// Trains an autoencoder per user of the training set and turns the
// aggregated weights into normalized profiles. Users with fewer than 2
// mapped rated items are skipped and reported.
struct ProfileTrainStats {
  std::size_t users_total = 0;
  std::size_t users_trained = 0;
  std::vector<UserId> untrainable;  // ascending
  std::size_t total_epochs = 0;
  Real mean_final_rmse = 0;
};

ProfileStore train_user_profiles(const InteractionDataset& train_set,
                                 const ItemFeatureMap& feature_map,
                                 const TrainConfig& config, Real normalize_eps,
                                 bool aggregate_include_decoder, std::size_t threads,
                                 ProfileTrainStats* stats = nullptr);

// Trivial baselines standing in for an external ranker.
RankedList random_ranking(UserId user, const std::vector<ItemId>& candidates,
                          const ItemFeatureMap& feature_map, std::size_t n,
                          std::uint64_t seed);
RankedList popularity_ranking(UserId user, const std::vector<ItemId>& candidates,
                              const ItemFeatureMap& feature_map,
                              const InteractionDataset& train, std::size_t n);

struct ExperimentConfig {
  Real train_fraction = 0.8;
  Real cold_fraction = 0.25;
  std::size_t min_test_ratings = 10;
  std::vector<std::size_t> n_values = {2, 5, 10};
  std::vector<std::size_t> k_values = {10, 100};
  std::size_t top_n = 10;
  int relevance_threshold = 4;
  Real normalize_eps = 0.01;
  TrainConfig train;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool include_baselines = true;
  bool divide_by_possessing_count = false;
  // Profile weights sum both edge sets incident to a feature node by
  // default. Encoder-only sums order features by 1/mean-input once training
  // saturates (low-rated inputs need the largest weights), which inverts the
  // intended "shared among positively rated" semantics.
  bool aggregate_include_decoder = true;

  void validate() const;
};

// Per-user metric values; NaN marks "skipped for this metric".
struct UserMetrics {
  static constexpr Real kSkipped = std::numeric_limits<Real>::quiet_NaN();
  UserId user = 0;
  Real precision = kSkipped;
  Real recall = kSkipped;
  Real f1 = kSkipped;
  Real ndcg = kSkipped;
  Real err_ia = kSkipped;
};

struct MetricCell {
  std::string model;       // "semauto", "random" or "popularity"
  std::size_t n_ratings = 0;
  std::size_t k = 0;       // 0 on baseline rows (they do not use neighbors)
  Real precision = 0, recall = 0, f1 = 0, ndcg = 0, err_ia = 0;  // averages over U_c
  std::size_t users_evaluated = 0;            // contributed to ndcg/err-ia
  std::size_t users_with_relevant = 0;        // contributed to precision/recall/f1
  std::size_t dropped_untrainable = 0;
  std::size_t dropped_insufficient_frozen = 0;
  std::size_t skipped_no_relevant = 0;
  bool failed = false;
  std::string failure;
  std::vector<UserMetrics> per_user;
};

struct StageTiming {
  std::string stage;
  double seconds;
};

struct EvaluationReport {
  nlohmann::json config_echo;
  std::uint64_t seed_master = 0, seed_split = 0, seed_cold = 0, seed_restore = 0,
                seed_baseline = 0;
  std::size_t candidate_count = 0;
  std::size_t cold_user_count = 0;
  std::size_t top_n = 10;
  std::vector<MetricCell> cells;
  std::vector<StageTiming> timings;  // wall-clock; not part of the deterministic body

  // One row per cell; header columns carry the configured N.
  std::string to_csv() const;
  // F1 vs k per n for the model rows, for plotting.
  std::string plot_csv() const;
  // Full detail including per-user metric values. Timings are optional so
  // the deterministic body can be compared byte-for-byte.
  nlohmann::json to_json(bool include_timing = true) const;
};

// The cold-user protocol end to end: split, freeze, restore n, train
// everyone, complete cold profiles per k, rank, measure. A failing stage
// marks its cells failed and the rest proceed.
EvaluationReport run_cold_experiment(const InteractionDataset& dataset,
                                     const ItemFeatureMap& feature_map,
                                     const GenreMap& genres,
                                     const ExperimentConfig& config);

}  // namespace semauto

#endif  // SEMAUTO_PROTOCOL_HPP
