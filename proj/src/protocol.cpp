#include "semauto/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "semauto/parallel.hpp"
#include "semauto/rng.hpp"

namespace semauto {

namespace {

// Stream constants for deriving independent seed streams from the master.
enum : std::uint64_t { kSplitStream = 101, kColdStream = 102, kRestoreStream = 103,
                       kBaselineStream = 104 };

std::string fmt_metric(Real v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

nlohmann::json metric_json(Real v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  template <typename F>
  auto time(const std::string& stage, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(stage, start);
    } else {
      auto result = fn();
      record(stage, start);
      return result;
    }
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    sink_.push_back({stage, d.count()});
  }

  std::vector<StageTiming>& sink_;
};

}  // namespace

std::vector<UserId> select_cold_candidates(const SplitPair& split,
                                           std::size_t min_test_ratings) {
  if (min_test_ratings < 1) throw ContractViolation("min_test_ratings must be >= 1");
  std::vector<UserId> out;
  for (const UserId user : split.test.users()) {
    if (split.test.rating_count(user) >= min_test_ratings) out.push_back(user);
  }
  return out;
}

ColdScenario make_cold_scenario(const SplitPair& split,
                                const std::vector<UserId>& candidates, Real fraction,
                                std::uint64_t seed) {
  if (candidates.empty()) throw Error("cold candidate set is empty");
  if (!(fraction > 0 && fraction <= 1)) throw ContractViolation("fraction must be in (0,1]");

  std::vector<UserId> pool = candidates;
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  SplitMix64 rng(seed);
  deterministic_shuffle(pool, rng);
  const std::size_t count = std::min(
      pool.size(),
      static_cast<std::size_t>(std::floor(fraction * static_cast<Real>(pool.size()) + 0.5)));

  ColdScenario scenario;
  scenario.seed = seed;
  scenario.cold_users.assign(pool.begin(), pool.begin() + count);
  std::sort(scenario.cold_users.begin(), scenario.cold_users.end());

  for (const Rating& r : split.train.all()) {
    const bool cold = std::binary_search(scenario.cold_users.begin(),
                                         scenario.cold_users.end(), r.user);
    (cold ? scenario.frozen : scenario.reduced_train).add(r);
  }
  return scenario;
}

RestoreResult restore_n_ratings(const ColdScenario& scenario, std::size_t n,
                                std::uint64_t seed) {
  if (n < 1) throw ContractViolation("n must be >= 1");

  RestoreResult result;
  for (const UserId user : scenario.cold_users) {
    std::vector<Rating> frozen = scenario.frozen.ratings_of(user);  // item-ordered
    if (frozen.size() < n) {
      result.dropped_users.push_back(user);
      continue;
    }
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(user)));
    deterministic_shuffle(frozen, rng);
    result.restored.insert(result.restored.end(), frozen.begin(), frozen.begin() + n);
  }
  return result;
}

ProfileStore train_user_profiles(const InteractionDataset& train_set,
                                 const ItemFeatureMap& feature_map,
                                 const TrainConfig& config, Real normalize_eps,
                                 bool aggregate_include_decoder, std::size_t threads,
                                 ProfileTrainStats* stats) {
  config.validate();
  const std::vector<UserId> users = train_set.users();

  struct Slot {
    std::optional<FeatureProfile> profile;
    bool untrainable = false;
    std::size_t epochs = 0;
    Real final_rmse = 0;
  };
  std::vector<Slot> slots(users.size());

  parallel_for(users.size(), threads, [&](std::size_t i) {
    const UserId user = users[i];
    std::vector<std::pair<ItemId, int>> ratings;
    for (const Rating& r : train_set.ratings_of(user)) ratings.emplace_back(r.item, r.stars);
    try {
      SparseTopology topo = build_topology(ratings, feature_map, user);
      const VectorX target = normalized_targets(topo, ratings, normalize_eps);
      auto [net, trace] = train(topo, target, config);
      net.user = user;
      const VectorX raw = aggregate_feature_weights(net, aggregate_include_decoder);
      slots[i].profile = build_profile(net, raw);
      slots[i].epochs = static_cast<std::size_t>(trace.epochs_run);
      slots[i].final_rmse = trace.final_rmse();
    } catch (const UserNotTrainable&) {
      slots[i].untrainable = true;
    }
  });

  ProfileStore store;
  ProfileTrainStats local;
  ProfileTrainStats& st = stats != nullptr ? *stats : local;
  st = ProfileTrainStats{};
  st.users_total = users.size();
  Real rmse_sum = 0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (slots[i].untrainable) {
      st.untrainable.push_back(users[i]);
      continue;
    }
    store.add(std::move(*slots[i].profile));
    ++st.users_trained;
    st.total_epochs += slots[i].epochs;
    rmse_sum += slots[i].final_rmse;
  }
  st.mean_final_rmse = st.users_trained == 0 ? 0 : rmse_sum / static_cast<Real>(st.users_trained);
  return store;
}

RankedList random_ranking(UserId user, const std::vector<ItemId>& candidates,
                          const ItemFeatureMap& feature_map, std::size_t n,
                          std::uint64_t seed) {
  std::vector<ItemId> mapped;
  for (const ItemId item : candidates) {
    if (feature_map.has_item(item)) mapped.push_back(item);
  }
  std::sort(mapped.begin(), mapped.end());
  mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());

  SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(user)));
  deterministic_shuffle(mapped, rng);

  RankedList list;
  list.user = user;
  const std::size_t depth = std::min(n, mapped.size());
  list.entries.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) {
    list.entries.push_back({mapped[i], static_cast<Real>(mapped.size() - i)});
  }
  return list;
}

std::map<ItemId, std::size_t> item_rating_counts(const InteractionDataset& train) {
  std::map<ItemId, std::size_t> counts;
  for (const Rating& r : train.all()) ++counts[r.item];
  return counts;
}

RankedList popularity_ranking_from_counts(UserId user, const std::vector<ItemId>& candidates,
                                          const ItemFeatureMap& feature_map,
                                          const std::map<ItemId, std::size_t>& counts,
                                          std::size_t n) {
  std::vector<ItemId> mapped;
  for (const ItemId item : candidates) {
    if (feature_map.has_item(item)) mapped.push_back(item);
  }
  std::sort(mapped.begin(), mapped.end());
  mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());

  RankedList list;
  list.user = user;
  list.entries.reserve(mapped.size());
  for (const ItemId item : mapped) {
    const auto it = counts.find(item);
    list.entries.push_back(
        {item, it == counts.end() ? 0.0 : static_cast<Real>(it->second)});
  }
  std::sort(list.entries.begin(), list.entries.end(),
            [](const ScoredItem& a, const ScoredItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.item < b.item;
            });
  if (list.entries.size() > n) list.entries.resize(n);
  return list;
}

RankedList popularity_ranking(UserId user, const std::vector<ItemId>& candidates,
                              const ItemFeatureMap& feature_map,
                              const InteractionDataset& train, std::size_t n) {
  return popularity_ranking_from_counts(user, candidates, feature_map,
                                        item_rating_counts(train), n);
}

void ExperimentConfig::validate() const {
  if (!(train_fraction > 0 && train_fraction < 1)) {
    throw ContractViolation("train_fraction must be in (0,1)");
  }
  if (!(cold_fraction > 0 && cold_fraction <= 1)) {
    throw ContractViolation("cold_fraction must be in (0,1]");
  }
  if (min_test_ratings < 1) throw ContractViolation("min_test_ratings must be >= 1");
  if (n_values.empty()) throw ContractViolation("n_values must be non-empty");
  if (k_values.empty()) throw ContractViolation("k_values must be non-empty");
  for (const std::size_t n : n_values) {
    if (n < 1) throw ContractViolation("every n must be >= 1");
  }
  for (const std::size_t k : k_values) {
    if (k < 1) throw ContractViolation("every k must be >= 1");
  }
  if (top_n < 1) throw ContractViolation("top_n must be >= 1");
  if (relevance_threshold < 1 || relevance_threshold > 5) {
    throw ContractViolation("relevance_threshold must be in [1,5]");
  }
  if (!(normalize_eps >= 0 && normalize_eps < 0.5)) {
    throw ContractViolation("normalize_eps must be in [0, 0.5)");
  }
  train.validate();
}

namespace {

struct EvalContext {
  const InteractionDataset& test;
  const GenreMap& genres;
  const std::vector<std::string>& all_genres;
  int relevance_threshold;
  std::size_t top_n;
};

UserMetrics evaluate_list(const EvalContext& ctx, UserId user, const RankedList& list,
                          const std::vector<ItemId>& training_items) {
  UserMetrics m;
  m.user = user;

  const auto test_stars = test_stars_of(ctx.test, user);
  const auto relevant = relevant_test_items(ctx.test, user, ctx.relevance_threshold);

  if (!relevant.empty()) {
    m.precision = precision_at(list, relevant, ctx.top_n);
    m.recall = recall_at(list, relevant, ctx.top_n);
    m.f1 = f1_at(m.precision, m.recall);
  }
  m.ndcg = ndcg_at(list, test_stars, ctx.top_n);
  if (ctx.genres.size() > 0) {
    const TopicDistribution dist =
        topic_distribution(ctx.genres, training_items, ctx.all_genres);
    m.err_ia = err_ia_at(list, test_stars, ctx.genres, dist, ctx.top_n);
  }
  return m;
}

void aggregate_cell(MetricCell& cell) {
  Real p = 0, r = 0, f = 0, nd = 0, err = 0;
  std::size_t with_rel = 0, evaluated = 0, err_count = 0;
  for (const UserMetrics& m : cell.per_user) {
    if (!std::isnan(m.precision)) {
      p += m.precision;
      r += m.recall;
      f += m.f1;
      ++with_rel;
    }
    if (!std::isnan(m.ndcg)) {
      nd += m.ndcg;
      ++evaluated;
    }
    if (!std::isnan(m.err_ia)) {
      err += m.err_ia;
      ++err_count;
    }
  }
  const Real nan = std::numeric_limits<Real>::quiet_NaN();
  cell.users_with_relevant = with_rel;
  cell.users_evaluated = evaluated;
  cell.skipped_no_relevant = evaluated - with_rel;
  cell.precision = with_rel == 0 ? nan : p / static_cast<Real>(with_rel);
  cell.recall = with_rel == 0 ? nan : r / static_cast<Real>(with_rel);
  cell.f1 = with_rel == 0 ? nan : f / static_cast<Real>(with_rel);
  cell.ndcg = evaluated == 0 ? nan : nd / static_cast<Real>(evaluated);
  cell.err_ia = err_count == 0 ? nan : err / static_cast<Real>(err_count);
}

}  // namespace

EvaluationReport run_cold_experiment(const InteractionDataset& dataset,
                                     const ItemFeatureMap& feature_map,
                                     const GenreMap& genres,
                                     const ExperimentConfig& config) {
  config.validate();
  if (dataset.empty()) throw ContractViolation("dataset is empty");

  EvaluationReport report;
  report.seed_master = config.seed;
  report.seed_split = mix_seed(config.seed, kSplitStream);
  report.seed_cold = mix_seed(config.seed, kColdStream);
  report.seed_restore = mix_seed(config.seed, kRestoreStream);
  report.seed_baseline = mix_seed(config.seed, kBaselineStream);
  report.top_n = config.top_n;

  report.config_echo = {
      {"train_fraction", config.train_fraction},
      {"cold_fraction", config.cold_fraction},
      {"min_test_ratings", config.min_test_ratings},
      {"n_values", config.n_values},
      {"k_values", config.k_values},
      {"top_n", config.top_n},
      {"relevance_threshold", config.relevance_threshold},
      {"normalize_eps", config.normalize_eps},
      {"include_baselines", config.include_baselines},
      {"divide_by_possessing_count", config.divide_by_possessing_count},
      {"aggregate_include_decoder", config.aggregate_include_decoder},
      {"train",
       {{"init_weight", config.train.init_weight},
        {"learning_rate", config.train.learning_rate},
        {"max_epochs", config.train.max_epochs},
        {"rmse_target", config.train.rmse_target},
        {"min_improvement", config.train.min_improvement}}},
  };

  StageClock clock(report.timings);

  const SplitPair split = clock.time("holdout_split", [&] {
    return holdout_split(dataset, config.train_fraction, report.seed_split);
  });
  const std::vector<UserId> candidates =
      select_cold_candidates(split, config.min_test_ratings);
  report.candidate_count = candidates.size();
  const ColdScenario scenario = clock.time("cold_scenario", [&] {
    return make_cold_scenario(split, candidates, config.cold_fraction, report.seed_cold);
  });
  report.cold_user_count = scenario.cold_users.size();

  const std::vector<std::string> all_genres = genres.all_genres();
  const std::size_t k_max =
      *std::max_element(config.k_values.begin(), config.k_values.end());

  for (const std::size_t n : config.n_values) {
    RestoreResult restore;
    InteractionDataset train_set;
    ProfileStore profiles;
    ProfileTrainStats train_stats;
    bool stage_failed = false;
    std::string stage_failure;

    try {
      restore = restore_n_ratings(scenario, n, report.seed_restore);
      train_set = scenario.reduced_train;
      for (const Rating& r : restore.restored) train_set.add(r);
      clock.time("train n=" + std::to_string(n), [&] {
        profiles = train_user_profiles(train_set, feature_map, config.train,
                                       config.normalize_eps,
                                       config.aggregate_include_decoder, config.threads,
                                       &train_stats);
      });
    } catch (const std::exception& e) {
      stage_failed = true;
      stage_failure = e.what();
    }

    // Cold users surviving the restore step, in ascending order.
    std::vector<UserId> evaluable;
    for (const UserId u : scenario.cold_users) {
      if (!std::binary_search(restore.dropped_users.begin(), restore.dropped_users.end(), u)) {
        evaluable.push_back(u);
      }
    }

    const EvalContext ctx{split.test, genres, all_genres, config.relevance_threshold,
                          config.top_n};

    // Neighbor lists are independent of k up to truncation; compute once at
    // the largest k per user.
    std::vector<NeighborSet> neighbor_cache(evaluable.size());
    std::vector<std::vector<ItemId>> candidate_cache(evaluable.size());
    std::vector<char> untrainable(evaluable.size(), 0);  // not vector<bool>: written from workers
    if (!stage_failed) {
      clock.time("neighbors n=" + std::to_string(n), [&] {
        parallel_for(evaluable.size(), config.threads, [&](std::size_t i) {
          const UserId u = evaluable[i];
          if (profiles.find(u) == nullptr) {
            untrainable[i] = 1;
            return;
          }
          neighbor_cache[i] = top_k_neighbors(u, profiles, k_max);
          candidate_cache[i] = unrated_mapped_items(feature_map, train_set, u);
        });
      });
    }

    for (const std::size_t k : config.k_values) {
      MetricCell cell;
      cell.model = "semauto";
      cell.n_ratings = n;
      cell.k = k;
      cell.dropped_insufficient_frozen = restore.dropped_users.size();

      if (stage_failed) {
        cell.failed = true;
        cell.failure = stage_failure;
        report.cells.push_back(std::move(cell));
        continue;
      }

      try {
        std::vector<std::optional<UserMetrics>> slots(evaluable.size());
        clock.time("eval n=" + std::to_string(n) + " k=" + std::to_string(k), [&] {
          parallel_for(evaluable.size(), config.threads, [&](std::size_t i) {
            if (untrainable[i]) return;
            const UserId u = evaluable[i];
            NeighborSet neighbors = neighbor_cache[i];
            if (neighbors.neighbors.size() > k) neighbors.neighbors.resize(k);
            const FeatureProfile completed =
                complete_profile(*profiles.find(u), neighbors, profiles, k,
                                 config.divide_by_possessing_count);
            const RankedList list =
                recommend_top_n(completed, candidate_cache[i], feature_map, config.top_n);
            std::vector<ItemId> training_items;
            for (const Rating& r : train_set.ratings_of(u)) training_items.push_back(r.item);
            slots[i] = evaluate_list(ctx, u, list, training_items);
          });
        });
        for (std::size_t i = 0; i < slots.size(); ++i) {
          if (untrainable[i]) {
            ++cell.dropped_untrainable;
          } else if (slots[i].has_value()) {
            cell.per_user.push_back(*slots[i]);
          }
        }
        aggregate_cell(cell);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.failure = e.what();
      }
      report.cells.push_back(std::move(cell));
    }

    if (config.include_baselines && !stage_failed) {
      const std::map<ItemId, std::size_t> counts = item_rating_counts(train_set);
      for (const char* model : {"random", "popularity"}) {
        MetricCell cell;
        cell.model = model;
        cell.n_ratings = n;
        cell.k = 0;
        cell.dropped_insufficient_frozen = restore.dropped_users.size();
        try {
          std::vector<std::optional<UserMetrics>> slots(evaluable.size());
          parallel_for(evaluable.size(), config.threads, [&](std::size_t i) {
            if (untrainable[i]) return;
            const UserId u = evaluable[i];
            const RankedList list =
                std::string(model) == "random"
                    ? random_ranking(u, candidate_cache[i], feature_map, config.top_n,
                                     mix_seed(report.seed_baseline, n))
                    : popularity_ranking_from_counts(u, candidate_cache[i], feature_map,
                                                     counts, config.top_n);
            std::vector<ItemId> training_items;
            for (const Rating& r : train_set.ratings_of(u)) training_items.push_back(r.item);
            slots[i] = evaluate_list(ctx, u, list, training_items);
          });
          for (std::size_t i = 0; i < slots.size(); ++i) {
            if (untrainable[i]) {
              ++cell.dropped_untrainable;
            } else if (slots[i].has_value()) {
              cell.per_user.push_back(*slots[i]);
            }
          }
          aggregate_cell(cell);
        } catch (const std::exception& e) {
          cell.failed = true;
          cell.failure = e.what();
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }

  return report;
}

std::string EvaluationReport::to_csv() const {
  const std::string at = "@" + std::to_string(top_n);
  std::ostringstream out;
  out << "model,#ratings,k,f1" << at << ",precision" << at << ",recall" << at << ",nDCG"
      << at << ",ERR-IA" << at << "\n";
  for (const MetricCell& cell : cells) {
    out << cell.model << ',' << cell.n_ratings << ',';
    if (cell.k == 0) {
      out << '-';
    } else {
      out << cell.k;
    }
    if (cell.failed) {
      out << ",,,,,\n";
      continue;
    }
    out << ',' << fmt_metric(cell.f1) << ',' << fmt_metric(cell.precision) << ','
        << fmt_metric(cell.recall) << ',' << fmt_metric(cell.ndcg) << ','
        << fmt_metric(cell.err_ia) << "\n";
  }
  return out.str();
}

std::string EvaluationReport::plot_csv() const {
  const std::string at = "@" + std::to_string(top_n);
  std::ostringstream out;
  out << "n,k,f1" << at << "\n";
  for (const MetricCell& cell : cells) {
    if (cell.model != "semauto" || cell.failed) continue;
    out << cell.n_ratings << ',' << cell.k << ',' << fmt_metric(cell.f1) << "\n";
  }
  return out.str();
}

nlohmann::json EvaluationReport::to_json(bool include_timing) const {
  nlohmann::json cells_json = nlohmann::json::array();
  for (const MetricCell& cell : cells) {
    nlohmann::json per_user = nlohmann::json::array();
    for (const UserMetrics& m : cell.per_user) {
      per_user.push_back({{"user", m.user},
                          {"precision", metric_json(m.precision)},
                          {"recall", metric_json(m.recall)},
                          {"f1", metric_json(m.f1)},
                          {"ndcg", metric_json(m.ndcg)},
                          {"err_ia", metric_json(m.err_ia)}});
    }
    cells_json.push_back(
        {{"model", cell.model},
         {"n_ratings", cell.n_ratings},
         {"k", cell.k},
         {"failed", cell.failed},
         {"failure", cell.failure},
         {"metrics",
          {{"precision", metric_json(cell.precision)},
           {"recall", metric_json(cell.recall)},
           {"f1", metric_json(cell.f1)},
           {"ndcg", metric_json(cell.ndcg)},
           {"err_ia", metric_json(cell.err_ia)}}},
         {"counts",
          {{"users_evaluated", cell.users_evaluated},
           {"users_with_relevant", cell.users_with_relevant},
           {"dropped_untrainable", cell.dropped_untrainable},
           {"dropped_insufficient_frozen", cell.dropped_insufficient_frozen},
           {"skipped_no_relevant", cell.skipped_no_relevant}}},
         {"per_user", std::move(per_user)}});
  }

  nlohmann::json j = {
      {"config", config_echo},
      {"seeds",
       {{"master", seed_master},
        {"split", seed_split},
        {"cold", seed_cold},
        {"restore", seed_restore},
        {"baseline", seed_baseline}}},
      {"protocol",
       {{"candidate_count", candidate_count}, {"cold_user_count", cold_user_count}}},
      {"cells", std::move(cells_json)},
  };
  if (include_timing) {
    nlohmann::json t = nlohmann::json::array();
    for (const StageTiming& st : timings) {
      t.push_back({{"stage", st.stage}, {"seconds", st.seconds}});
    }
    j["timing"] = std::move(t);
  }
  return j;
}

}  // namespace semauto
