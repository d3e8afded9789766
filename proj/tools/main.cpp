#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "semauto/autoencoder.hpp"
#include "semauto/dataset.hpp"
#include "semauto/feature_map.hpp"
#include "semauto/io_util.hpp"
#include "semauto/metrics.hpp"
#include "semauto/ntriples.hpp"
#include "semauto/profile.hpp"
#include "semauto/protocol.hpp"
#include "semauto/recommend.hpp"
#include "semauto/rng.hpp"
#include "semauto/sparql.hpp"

namespace {

using namespace semauto;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartial = 3;

struct CliOptions {
  std::string ratings_path;
  std::string movies_path;
  std::string mapping_path;
  std::string triples_path;
  std::string endpoint_url;
  std::string feature_map_path;
  std::string profiles_path;
  std::string output_dir = "out";
  std::string separator = "::";

  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = 0;

  TrainConfig train;
  Real normalize_eps = 0.01;

  Real train_fraction = 0.8;
  Real cold_fraction = 0.25;
  std::size_t min_test_ratings = 10;
  std::vector<std::size_t> n_values = {2, 5, 10};
  std::vector<std::size_t> k_values = {10, 100};
  std::size_t top_n = 10;
  int relevance_threshold = 4;
  bool no_baselines = false;
  bool divide_by_possessing = false;
  bool encoder_only_weights = false;

  std::vector<std::string> predicates = kDefaultFeaturePredicates;
  std::string type_namespace;
  std::size_t sparql_batch_size = 50;
  int sparql_max_retries = 3;
  int sparql_retry_delay_ms = 250;
  int sparql_timeout_sec = 30;
  std::string sparql_cache;

  // per-command
  UserId rec_user = 0;
  std::size_t rec_top = 10;
  std::size_t rec_k = 0;
  std::string rec_output;
  std::size_t gradcheck_nets = 100;
  UserId debug_net_user = 0;
  std::string debug_net_out;
};

class StageLog {
 public:
  explicit StageLog(std::string stage) : stage_(std::move(stage)) {}

  template <typename... Parts>
  void done(Parts&&... parts) {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    std::cerr << "[semauto] stage=" << stage_;
    (std::cerr << ... << parts);
    std::cerr << " elapsed_s=" << d.count() << "\n";
  }

 private:
  std::string stage_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void print_error_json(const std::string& type, const std::string& message) {
  const json err = {{"error", {{"type", type}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
}

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw ConfigError("missing required option: " + flag);
  if (!std::filesystem::exists(path)) {
    throw ConfigError(flag + " does not exist: " + path);
  }
}

std::uint64_t effective_seed(CliOptions& opt) {
  if (!opt.seed_given) {
    std::random_device rd;
    opt.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "[semauto] seed=" << opt.seed << " (generated; pass --seed to replay)\n";
  }
  return opt.seed;
}

std::string ratings_line(const Rating& r, const std::string& sep) {
  return std::to_string(r.user) + sep + std::to_string(r.item) + sep +
         std::to_string(r.stars) + sep + std::to_string(r.timestamp);
}

void write_ratings_file(const InteractionDataset& ds, const std::string& sep,
                        const std::string& path) {
  AtomicFile file(path);
  for (const UserId u : ds.users()) {
    for (const Rating& r : ds.ratings_of(u)) file.stream() << ratings_line(r, sep) << "\n";
  }
  file.commit();
}

json stats_json(const ParseStats& stats) {
  return {{"lines", stats.lines},         {"accepted", stats.accepted},
          {"malformed", stats.malformed}, {"out_of_range", stats.out_of_range},
          {"duplicates", stats.duplicates}, {"sample_errors", stats.sample_errors}};
}

int cmd_ingest(CliOptions& opt) {
  require_file(opt.ratings_path, "--ratings");
  const std::uint64_t seed = effective_seed(opt);
  std::filesystem::create_directories(opt.output_dir);

  StageLog parse_log("parse_ratings");
  const RatingsParseResult parsed = parse_movielens(opt.ratings_path, opt.separator);
  parse_log.done(" accepted=", parsed.stats.accepted, " malformed=", parsed.stats.malformed,
                 " out_of_range=", parsed.stats.out_of_range,
                 " duplicates=", parsed.stats.duplicates);

  json stats = {{"seed", seed},
                {"ratings", stats_json(parsed.stats)},
                {"users", parsed.dataset.user_count()},
                {"items", parsed.dataset.item_count()}};

  if (!opt.movies_path.empty()) {
    require_file(opt.movies_path, "--movies");
    StageLog genre_log("parse_movies");
    const GenreParseResult genres = parse_genres(opt.movies_path, opt.separator);
    genre_log.done(" items_with_genres=", genres.genres.size());
    stats["movies"] = stats_json(genres.stats);
    stats["items_with_genres"] = genres.genres.size();
  }

  StageLog split_log("holdout_split");
  const SplitPair split = holdout_split(parsed.dataset, opt.train_fraction, seed);
  split_log.done(" train=", split.train.size(), " test=", split.test.size());
  stats["train_ratings"] = split.train.size();
  stats["test_ratings"] = split.test.size();
  stats["train_fraction"] = opt.train_fraction;

  const std::string train_path = opt.output_dir + "/train.dat";
  const std::string test_path = opt.output_dir + "/test.dat";
  write_ratings_file(split.train, opt.separator, train_path);
  write_ratings_file(split.test, opt.separator, test_path);
  atomic_write_file(opt.output_dir + "/ingest_stats.json", stats.dump(2) + "\n");

  std::cout << "wrote " << train_path << " (" << split.train.size() << " ratings), "
            << test_path << " (" << split.test.size() << " ratings)\n";
  return kExitOk;
}

int cmd_extract_features(CliOptions& opt) {
  require_file(opt.mapping_path, "--mapping");
  if (opt.triples_path.empty() && opt.endpoint_url.empty()) {
    throw ConfigError("extract-features needs --triples or --endpoint");
  }
  std::filesystem::create_directories(opt.output_dir);
  const std::string out_path = opt.feature_map_path.empty()
                                   ? opt.output_dir + "/feature_map.tsv"
                                   : opt.feature_map_path;

  StageLog map_log("parse_mapping");
  const MappingParseResult mapping = parse_mapping(opt.mapping_path);
  map_log.done(" entries=", mapping.mapping.size(), " rejected=", mapping.stats.malformed,
               " shared_entities=", mapping.shared_entities);

  ItemFeatureMap features;
  ExtractStats stats;
  if (!opt.triples_path.empty()) {
    require_file(opt.triples_path, "--triples");
    ExtractOptions options;
    options.predicates = opt.predicates;
    options.type_namespace_filter = opt.type_namespace;
    StageLog log("extract_features");
    features = extract_features_from_file(opt.triples_path, mapping.mapping, options, &stats);
    log.done(" triples=", stats.triples, " matched=", stats.matched,
             " skipped_lines=", stats.skipped_lines,
             " non_iri_objects=", stats.non_iri_objects,
             " items_mapped=", features.item_count());
  } else {
    SparqlOptions options;
    options.endpoint_url = opt.endpoint_url;
    options.batch_size = opt.sparql_batch_size;
    options.max_retries = opt.sparql_max_retries;
    options.retry_initial_delay_ms = opt.sparql_retry_delay_ms;
    options.timeout_sec = opt.sparql_timeout_sec;
    options.cache_path = opt.sparql_cache;
    options.predicates = opt.predicates;
    StageLog log("fetch_features_sparql");
    features = fetch_features_sparql(options, mapping.mapping, &stats);
    log.done(" matched=", stats.matched, " items_mapped=", features.item_count());
  }

  save_feature_map(features, out_path);
  std::cout << "wrote " << out_path << " (" << features.item_count() << " items, "
            << features.vocabulary_size() << " features)\n";
  return kExitOk;
}

int cmd_train_profiles(CliOptions& opt) {
  require_file(opt.ratings_path, "--ratings");
  require_file(opt.feature_map_path, "--feature-map");
  std::filesystem::create_directories(opt.output_dir);
  const std::string out_path =
      opt.profiles_path.empty() ? opt.output_dir + "/profiles.tsv" : opt.profiles_path;

  const RatingsParseResult parsed = parse_movielens(opt.ratings_path, opt.separator);
  const ItemFeatureMap features = load_feature_map(opt.feature_map_path);

  StageLog log("train_user_profiles");
  ProfileTrainStats stats;
  const ProfileStore store =
      train_user_profiles(parsed.dataset, features, opt.train, opt.normalize_eps,
                          !opt.encoder_only_weights, opt.threads, &stats);
  log.done(" users=", stats.users_total, " trained=", stats.users_trained,
           " untrainable=", stats.untrainable.size(), " mean_rmse=", stats.mean_final_rmse);

  save_profiles(store, features, out_path);

  if (!opt.debug_net_out.empty()) {
    std::vector<std::pair<ItemId, int>> ratings;
    for (const Rating& r : parsed.dataset.ratings_of(opt.debug_net_user)) {
      ratings.emplace_back(r.item, r.stars);
    }
    SparseTopology topo = build_topology(ratings, features, opt.debug_net_user);
    const VectorX target = normalized_targets(topo, ratings, opt.normalize_eps);
    auto [net, trace] = train(topo, target, opt.train);
    net.user = opt.debug_net_user;
    save_autoencoder_debug(net, features, opt.debug_net_out);
    std::cerr << "[semauto] stage=debug_net user=" << opt.debug_net_user
              << " epochs=" << trace.epochs_run << " final_rmse=" << trace.final_rmse()
              << " stop=" << to_string(trace.stop_reason) << "\n";
  }

  std::cout << "wrote " << out_path << " (" << store.size() << " profiles, "
            << stats.untrainable.size() << " users untrainable)\n";
  return kExitOk;
}

int cmd_recommend(CliOptions& opt) {
  require_file(opt.ratings_path, "--ratings");
  require_file(opt.feature_map_path, "--feature-map");
  require_file(opt.profiles_path, "--profiles");

  const RatingsParseResult parsed = parse_movielens(opt.ratings_path, opt.separator);
  const ItemFeatureMap features = load_feature_map(opt.feature_map_path);
  const ProfileStore store = load_profiles(opt.profiles_path, features);

  const FeatureProfile* profile = store.find(opt.rec_user);
  if (profile == nullptr) {
    throw UserNotTrainable(opt.rec_user, 0);
  }

  FeatureProfile scored = *profile;
  if (opt.rec_k > 0) {
    const NeighborSet neighbors = top_k_neighbors(opt.rec_user, store, opt.rec_k);
    scored = complete_profile(*profile, neighbors, store, opt.rec_k,
                              opt.divide_by_possessing);
  }

  const std::vector<ItemId> candidates =
      unrated_mapped_items(features, parsed.dataset, opt.rec_user);
  const RankedList list = recommend_top_n(scored, candidates, features, opt.rec_top);

  std::string csv = "rank,item,score\n";
  char buf[64];
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%lld,%.9f\n", i + 1,
                  static_cast<long long>(list.entries[i].item), list.entries[i].score);
    csv += buf;
  }
  if (opt.rec_output.empty()) {
    std::cout << csv;
  } else {
    atomic_write_file(opt.rec_output, csv);
    std::cout << "wrote " << opt.rec_output << " (" << list.entries.size() << " rows)\n";
  }
  return kExitOk;
}

int cmd_evaluate(CliOptions& opt) {
  require_file(opt.ratings_path, "--ratings");
  require_file(opt.movies_path, "--movies");
  require_file(opt.feature_map_path, "--feature-map");
  std::filesystem::create_directories(opt.output_dir);

  const std::uint64_t seed = effective_seed(opt);

  const RatingsParseResult parsed = parse_movielens(opt.ratings_path, opt.separator);
  const GenreParseResult genres = parse_genres(opt.movies_path, opt.separator);
  const ItemFeatureMap features = load_feature_map(opt.feature_map_path);

  ExperimentConfig config;
  config.train_fraction = opt.train_fraction;
  config.cold_fraction = opt.cold_fraction;
  config.min_test_ratings = opt.min_test_ratings;
  config.n_values = opt.n_values;
  config.k_values = opt.k_values;
  config.top_n = opt.top_n;
  config.relevance_threshold = opt.relevance_threshold;
  config.normalize_eps = opt.normalize_eps;
  config.train = opt.train;
  config.seed = seed;
  config.threads = opt.threads;
  config.include_baselines = !opt.no_baselines;
  config.divide_by_possessing_count = opt.divide_by_possessing;
  config.aggregate_include_decoder = !opt.encoder_only_weights;

  StageLog log("run_cold_experiment");
  const EvaluationReport report =
      run_cold_experiment(parsed.dataset, features, genres.genres, config);
  log.done(" candidates=", report.candidate_count, " cold_users=", report.cold_user_count,
           " cells=", report.cells.size());
  for (const StageTiming& t : report.timings) {
    std::cerr << "[semauto] stage=" << t.stage << " elapsed_s=" << t.seconds << "\n";
  }

  // The deterministic body goes into the primary artifacts; wall-clock
  // timings live in a sidecar so re-runs stay byte-identical.
  atomic_write_file(opt.output_dir + "/report.csv", report.to_csv());
  atomic_write_file(opt.output_dir + "/report.json", report.to_json(false).dump(2) + "\n");
  atomic_write_file(opt.output_dir + "/plot_f1_vs_k.csv", report.plot_csv());
  json timing = json::array();
  for (const StageTiming& t : report.timings) {
    timing.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  }
  atomic_write_file(opt.output_dir + "/report_timing.json", timing.dump(2) + "\n");

  std::cout << report.to_csv();

  bool any_failed = false;
  for (const MetricCell& cell : report.cells) any_failed |= cell.failed;
  if (any_failed) {
    print_error_json("PartialResults", "one or more report cells failed; see report.json");
    return kExitPartial;
  }
  return kExitOk;
}

// Central finite differences against the analytic gradients on random nets.
int cmd_gradcheck(CliOptions& opt) {
  const std::uint64_t seed = effective_seed(opt);
  SplitMix64 rng(seed);

  auto loss_at = [](const UserAutoencoder& net, const VectorX& target) {
    const Activations act = forward(net, target);
    return 0.5 * (act.output - target).squaredNorm();
  };

  const double h = 1e-5;
  double max_err = 0;
  for (std::size_t round = 0; round < opt.gradcheck_nets; ++round) {
    ItemFeatureMap fm;
    const std::size_t items = 2 + uniform_below(rng, 9);
    std::vector<std::pair<ItemId, int>> ratings;
    for (std::size_t i = 1; i <= items; ++i) {
      const std::size_t count = 1 + uniform_below(rng, 4);
      for (std::size_t c = 0; c < count; ++c) {
        fm.add_item_feature(static_cast<ItemId>(i),
                            "urn:f:" + std::to_string(uniform_below(rng, 15)));
      }
      ratings.emplace_back(static_cast<ItemId>(i), static_cast<int>(1 + uniform_below(rng, 5)));
    }
    fm.canonicalize();
    const SparseTopology topo = build_topology(ratings, fm);
    UserAutoencoder net = make_autoencoder(topo, 0.001);
    for (Eigen::Index e = 0; e < net.encoder.nonZeros(); ++e) {
      net.encoder.valuePtr()[e] = uniform_real(rng) - 0.5;
    }
    for (Eigen::Index e = 0; e < net.decoder.nonZeros(); ++e) {
      net.decoder.valuePtr()[e] = uniform_real(rng) - 0.5;
    }
    VectorX target(topo.item_dim());
    for (Eigen::Index i = 0; i < target.size(); ++i) target[i] = 0.01 + 0.98 * uniform_real(rng);

    const Gradients g = compute_gradients(net, target);
    for (auto* side : {&net.encoder, &net.decoder}) {
      const bool is_enc = side == &net.encoder;
      const VectorX& analytic = is_enc ? g.encoder : g.decoder;
      for (Eigen::Index e = 0; e < side->nonZeros(); ++e) {
        const double w0 = side->valuePtr()[e];
        side->valuePtr()[e] = w0 + h;
        const double up = loss_at(net, target);
        side->valuePtr()[e] = w0 - h;
        const double down = loss_at(net, target);
        side->valuePtr()[e] = w0;
        const double numeric = (up - down) / (2 * h);
        const double denom = std::max({std::fabs(analytic[e]), std::fabs(numeric), 1e-4});
        max_err = std::max(max_err, std::fabs(analytic[e] - numeric) / denom);
      }
    }
  }

  std::printf("gradcheck: %zu nets, max relative error %.3e (threshold 1e-05)\n",
              opt.gradcheck_nets, max_err);
  if (max_err < 1e-5) {
    std::puts("gradcheck: PASS");
    return kExitOk;
  }
  std::puts("gradcheck: FAIL");
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph sparse autoencoder recommender toolkit"};
  app.set_config("--config", "", "Key/value config file with [subcommand] sections");
  app.allow_config_extras(false);
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand name

  CliOptions opt;

  app.add_option("--ratings", opt.ratings_path, "Ratings file (user<sep>item<sep>stars[<sep>ts])")
      ->envname("SEMAUTO_RATINGS")->capture_default_str();
  app.add_option("--movies", opt.movies_path, "Movies file (id<sep>title<sep>genre|genre...)")
      ->envname("SEMAUTO_MOVIES")->capture_default_str();
  app.add_option("--mapping", opt.mapping_path, "Item-to-entity mapping TSV")
      ->envname("SEMAUTO_MAPPING")->capture_default_str();
  app.add_option("--triples", opt.triples_path, "N-Triples dump, plain or .gz")
      ->envname("SEMAUTO_TRIPLES")->capture_default_str();
  app.add_option("--endpoint", opt.endpoint_url, "SPARQL endpoint URL (http)")
      ->envname("SEMAUTO_ENDPOINT")->capture_default_str();
  app.add_option("--feature-map", opt.feature_map_path, "Persisted feature map path")
      ->envname("SEMAUTO_FEATURE_MAP")->capture_default_str();
  app.add_option("--profiles", opt.profiles_path, "Persisted profiles path")
      ->envname("SEMAUTO_PROFILES")->capture_default_str();
  app.add_option("--output-dir", opt.output_dir, "Artifact directory")
      ->envname("SEMAUTO_OUTPUT_DIR")->capture_default_str();
  app.add_option("--separator", opt.separator, "Field separator for ratings/movies files")
      ->capture_default_str();
  auto* seed_opt = app.add_option("--seed", opt.seed, "Master seed (generated when absent)")
      ->envname("SEMAUTO_SEED");
  app.add_option("--threads", opt.threads, "Worker threads (0 = all cores)")
      ->envname("SEMAUTO_THREADS")->capture_default_str();

  app.add_option("--init-weight", opt.train.init_weight, "Constant initial edge weight")
      ->capture_default_str();
  app.add_option("--learning-rate", opt.train.learning_rate, "Gradient descent step size")
      ->capture_default_str();
  app.add_option("--max-epochs", opt.train.max_epochs, "Epoch cap per user")
      ->capture_default_str();
  app.add_option("--rmse-target", opt.train.rmse_target, "Stop when RMSE reaches this")
      ->capture_default_str();
  app.add_option("--min-improvement", opt.train.min_improvement,
                 "Stop when epoch-over-epoch RMSE improvement falls below this")
      ->capture_default_str();
  app.add_option("--normalize-eps", opt.normalize_eps,
                 "Clamp normalized ratings into [eps, 1-eps]")
      ->capture_default_str();

  app.add_option("--train-fraction", opt.train_fraction, "Hold-out train share")
      ->capture_default_str();
  app.add_option("--cold-fraction", opt.cold_fraction, "Share of candidates made cold")
      ->capture_default_str();
  app.add_option("--min-test-ratings", opt.min_test_ratings,
                 "Test ratings needed to be a cold candidate")
      ->capture_default_str();
  app.add_option("--n-values", opt.n_values, "Cold profile sizes to evaluate")
      ->capture_default_str();
  app.add_option("--k-values", opt.k_values, "Neighbor counts to evaluate")
      ->capture_default_str();
  app.add_option("--top-n", opt.top_n, "Recommendation list length N")
      ->capture_default_str();
  app.add_option("--relevance-threshold", opt.relevance_threshold,
                 "Stars at or above which a test item is relevant")
      ->capture_default_str();
  app.add_flag("--no-baselines", opt.no_baselines, "Skip random/popularity baseline rows");
  app.add_flag("--divide-by-possessing-count", opt.divide_by_possessing,
               "Completion divides by the count of neighbors carrying the feature, not k");
  app.add_flag("--encoder-only-weights", opt.encoder_only_weights,
               "Build profiles from encoder in-edge sums only (decoder mirror excluded)");

  app.add_option("--predicate", opt.predicates, "Feature predicates (repeatable)")
      ->capture_default_str();
  app.add_option("--type-namespace", opt.type_namespace,
                 "Keep rdf:type objects only under this IRI prefix")
      ->capture_default_str();
  app.add_option("--batch-size", opt.sparql_batch_size, "Entities per SPARQL query")
      ->capture_default_str();
  app.add_option("--max-retries", opt.sparql_max_retries, "SPARQL retries per batch")
      ->capture_default_str();
  app.add_option("--retry-delay-ms", opt.sparql_retry_delay_ms,
                 "Initial backoff delay, doubles per retry")
      ->capture_default_str();
  app.add_option("--timeout-sec", opt.sparql_timeout_sec, "SPARQL HTTP timeout")
      ->capture_default_str();
  app.add_option("--sparql-cache", opt.sparql_cache, "On-disk cache for endpoint results")
      ->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Parse ratings/movies and write the hold-out split");
  auto* extract = app.add_subcommand("extract-features",
                                     "Build the item feature map from a dump or endpoint");
  auto* train_cmd = app.add_subcommand("train-profiles",
                                       "Train per-user autoencoders and persist profiles");
  auto* recommend = app.add_subcommand("recommend", "Rank unrated items for one user");
  recommend->add_option("--user", opt.rec_user, "User id")->required();
  recommend->add_option("--top", opt.rec_top, "List length")->capture_default_str();
  recommend->add_option("--k", opt.rec_k, "Neighbors for profile completion (0 = none)")
      ->capture_default_str();
  recommend->add_option("--output", opt.rec_output, "Write CSV here instead of stdout");
  train_cmd->add_option("--debug-net-user", opt.debug_net_user,
                        "Dump this user's trained network");
  train_cmd->add_option("--debug-net-out", opt.debug_net_out, "Debug dump path");
  auto* evaluate = app.add_subcommand("evaluate", "Run the cold-user experiment and write reports");
  auto* gradcheck = app.add_subcommand("gradcheck",
                                       "Compare analytic gradients with finite differences");
  gradcheck->add_option("--nets", opt.gradcheck_nets, "Number of random networks")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    print_error_json("ValidationError", e.what());
    return kExitValidation;
  }
  opt.seed_given = seed_opt->count() > 0;  // set via flag, env var, or config file

  try {
    opt.train.validate();
    if (ingest->parsed()) return cmd_ingest(opt);
    if (extract->parsed()) return cmd_extract_features(opt);
    if (train_cmd->parsed()) return cmd_train_profiles(opt);
    if (recommend->parsed()) return cmd_recommend(opt);
    if (evaluate->parsed()) return cmd_evaluate(opt);
    if (gradcheck->parsed()) return cmd_gradcheck(opt);
    print_error_json("ValidationError", "no command given");
    return kExitValidation;
  } catch (const ConfigError& e) {
    print_error_json("ConfigError", e.what());
    return kExitValidation;
  } catch (const ContractViolation& e) {
    print_error_json("ContractViolation", e.what());
    return kExitValidation;
  } catch (const UserNotTrainable& e) {
    print_error_json("UserNotTrainable", e.what());
    return kExitRuntime;
  } catch (const SparqlError& e) {
    print_error_json("SparqlError", e.what());
    return kExitPartial;
  } catch (const FormatError& e) {
    print_error_json("FormatError", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    print_error_json("RuntimeError", e.what());
    return kExitRuntime;
  }
}
