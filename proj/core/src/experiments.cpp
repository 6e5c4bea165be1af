#include "ranksel/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "ranksel/market.hpp"
#include "ranksel/posterior.hpp"
#include "ranksel/strategies.hpp"
#include "ranksel/welfare.hpp"

namespace ranksel {

namespace {

using nlohmann::json;

struct Loaded {
  json config;
  std::string kind;
  uint64_t seed = 0;
  bool seed_given = false;
  std::string out_path;
  std::string format;  // csv | json
};

json get_section(const json& config, const std::string& name) {
  if (config.contains(name)) return config.at(name);
  return json::object();
}

CandidatePool pool_from_config(const json& config) {
  const json pool_json = get_section(config, "pool");
  if (!pool_json.contains("values") || !pool_json.contains("free_probs"))
    throw std::invalid_argument("config: pool.values and pool.free_probs are required");
  CandidatePool pool;
  pool.values = pool_json.at("values").get<std::vector<double>>();
  pool.free_probs = pool_json.at("free_probs").get<std::vector<double>>();
  if (pool_json.contains("busy_penalties")) {
    pool.busy_penalties = pool_json.at("busy_penalties").get<std::vector<double>>();
  } else {
    pool.busy_penalties.assign(pool.values.size(), 1.0);
  }
  pool.validate();
  return pool;
}

ModelSpec model_from_config(const json& config) {
  const json model = get_section(config, "model");
  const std::string kind = model.value("kind", "plackett_luce");
  if (kind == "plackett_luce") return PlackettLuce{model.value("beta", 1.0)};
  if (kind == "gaussian_rum") return GaussianRUM{model.value("sigma", 1.0)};
  if (kind == "mallows") return MallowsModel{model.value("phi", 0.5)};
  throw std::invalid_argument("config: unknown model.kind '" + kind + "'");
}

std::vector<double> beta_grid_from_config(const json& config) {
  const json model = get_section(config, "model");
  if (model.contains("beta_grid")) return model.at("beta_grid").get<std::vector<double>>();
  if (model.contains("beta")) return {model.at("beta").get<double>()};
  throw std::invalid_argument("config: model.beta_grid (or model.beta) is required");
}

StrategySpec parse_strategy(const std::string& text) {
  if (text == "follow") return FollowRanking{};
  if (text == "superstar") return SuperstarAlgo{};
  if (text == "oracle") return OraclePolicyRef{};
  if (text == "pairwise:magnitude") return PairwiseVoteAlgo{VoteMode::magnitude};
  if (text == "pairwise:count") return PairwiseVoteAlgo{VoteMode::count};
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string family = text.substr(0, colon);
    const int k = std::stoi(text.substr(colon + 1));
    if (family == "kfree") return KFree{k};
    if (family == "kbusy") return KBusy{k};
  }
  throw std::invalid_argument("config: unknown strategy '" + text + "'");
}

std::string direction_name(Direction direction) {
  return direction == Direction::first_free ? "first_free" : "first_busy";
}

void run_strategy_map(const Loaded& loaded, RowTable& table, json& summary) {
  const json& config = loaded.config;
  CandidatePool base = pool_from_config(config);
  const std::vector<double> betas = beta_grid_from_config(config);
  const json grid = get_section(config, "grid");
  if (!grid.contains("gamma"))
    throw std::invalid_argument("config: strategy_map needs grid.gamma");
  const auto gammas = grid.at("gamma").get<std::vector<double>>();
  table.header = {"gamma",       "beta",      "inv_beta",     "ratio_r",
                  "threshold_r", "direction", "window_jstar"};
  for (double gamma : gammas) {
    CandidatePool pool = base;
    pool.busy_penalties.assign(pool.values.size(), gamma);
    for (double beta : betas) {
      const SuperstarDistribution dist =
          superstar_index_probs(pool.values[0], pool.values[1], pool.size(), beta);
      const WindowComputation window = superstar_window(pool, dist);
      table.rows.push_back({gamma, beta, 1.0 / beta, window.ratio_r, window.threshold_R,
                            direction_name(window.direction),
                            static_cast<long long>(window.window_jstar)});
    }
  }
  summary["grid_points"] = table.rows.size();
}

void run_welfare_sweep(const Loaded& loaded, RowTable& table, json& summary) {
  const json& config = loaded.config;
  const CandidatePool pool = pool_from_config(config);
  const std::vector<double> betas = beta_grid_from_config(config);
  const json grid = get_section(config, "grid");
  std::vector<int> ks;
  if (grid.contains("k")) {
    ks = grid.at("k").get<std::vector<int>>();
  } else {
    for (int k = 1; k <= pool.size(); ++k) ks.push_back(k);
  }
  const double p1 = pool.free_probs[0];
  const double p2 = pool.free_probs[1];
  table.header = {"beta",
                  "k",
                  "kfree_p_picked_busy",
                  "kbusy_p_picked_busy",
                  "kfree_p_top_picked",
                  "kbusy_p_top_picked",
                  "kfree_utility",
                  "kbusy_utility"};
  for (double beta : betas) {
    const SuperstarDistribution dist =
        superstar_index_probs(pool.values[0], pool.values[1], pool.size(), beta);
    const RankingDistribution rd = dist;
    for (int k : ks) {
      const MetricsRecord free_record = metrics_exact(KFree{k}, rd, pool);
      const MetricsRecord busy_record = metrics_exact(KBusy{k}, rd, pool);
      table.rows.push_back({beta, static_cast<long long>(k),
                            p_picked_busy_closed(dist, p1, p2, KFree{k}),
                            p_picked_busy_closed(dist, p1, p2, KBusy{k}),
                            p_top_picked_closed(dist, p1, p2, KFree{k}),
                            p_top_picked_closed(dist, p1, p2, KBusy{k}),
                            free_record.firm_utility, busy_record.firm_utility});
    }
  }
  summary["grid_points"] = table.rows.size();
}

void run_regret_curve(const Loaded& loaded, RowTable& table, json& summary) {
  const json& config = loaded.config;
  const CandidatePool pool = pool_from_config(config);
  const std::vector<double> betas = beta_grid_from_config(config);
  table.header = {"beta", "oracle_utility", "algo_utility", "regret", "theorem3_max_bound"};
  int negative_regret = 0;
  for (double beta : betas) {
    const SuperstarDistribution dist =
        superstar_index_probs(pool.values[0], pool.values[1], pool.size(), beta);
    const RankingDistribution rd = dist;
    const double oracle = policy_expected_utility(oracle_policy(rd, pool), rd, pool);
    const double algo =
        policy_expected_utility(strategy_as_policy(SuperstarAlgo{}, pool, rd), rd, pool);
    double max_bound = 0.0;
    for (int j = 1; j < pool.size(); ++j)
      max_bound = std::max(max_bound, theorem3_bound(pool, dist, j).bound_value);
    if (oracle - algo < -1e-9) ++negative_regret;
    table.rows.push_back({beta, oracle, algo, oracle - algo, max_bound});
  }
  summary["violations"] = negative_regret;
}

void run_monotone_check(const Loaded& loaded, RowTable& table, json& summary) {
  const json& config = loaded.config;
  const CandidatePool pool = pool_from_config(config);
  std::vector<double> betas = beta_grid_from_config(config);
  std::sort(betas.begin(), betas.end(), std::greater<>());
  const json grid = get_section(config, "grid");
  std::vector<int> ks = grid.contains("k") ? grid.at("k").get<std::vector<int>>()
                                           : std::vector<int>{1, 2, 3, 4};
  const DirectionReport report = accuracy_direction_report(pool, betas, ks);
  table.header = {"beta", "direction", "window_jstar", "top_prob", "oracle_utility",
                  "algo_utility"};
  for (int k : ks) {
    table.header.push_back("kfree" + std::to_string(k) + "_p_busy");
    table.header.push_back("kbusy" + std::to_string(k) + "_p_busy");
    table.header.push_back("kfree" + std::to_string(k) + "_p_top");
    table.header.push_back("kbusy" + std::to_string(k) + "_p_top");
  }
  for (const DirectionRow& row : report.rows) {
    std::vector<Cell> cells = {row.beta,
                               direction_name(row.direction),
                               static_cast<long long>(row.window_jstar),
                               row.top_prob,
                               row.oracle_utility,
                               row.algo_utility};
    for (size_t i = 0; i < ks.size(); ++i) {
      cells.push_back(row.kfree_p_busy[i]);
      cells.push_back(row.kbusy_p_busy[i]);
      cells.push_back(row.kfree_p_top[i]);
      cells.push_back(row.kbusy_p_top[i]);
    }
    table.rows.push_back(std::move(cells));
  }
  summary["violations"] =
      report.oracle_utility_violations + report.kfree_p_busy_violations;
  summary["p_top_rise"] = report.p_top_rise;
  summary["p_top_fall"] = report.p_top_fall;
}

void run_market_sim(const Loaded& loaded, RowTable& table, json& summary) {
  const json& config = loaded.config;
  if (!loaded.seed_given)
    throw std::invalid_argument("config: rng.seed is required for market_sim");
  const json sim = get_section(config, "sim");
  SimConfig sim_config;
  sim_config.pool = pool_from_config(config);
  sim_config.model = model_from_config(config);
  sim_config.refresh_prob = sim.value("refresh_prob", 0.4);
  sim_config.steps = sim.value("steps", 2000);
  sim_config.replicates = sim.value("replicates", 100);
  sim_config.seed = loaded.seed;
  sim_config.background_strategy =
      parse_strategy(sim.value("background", std::string("kfree:") +
                                                 std::to_string(sim_config.pool.size())));
  SimReport report;
  if (sim.contains("strategies")) {
    for (const auto& name : sim.at("strategies").get<std::vector<std::string>>())
      sim_config.candidate_strategies.push_back(parse_strategy(name));
    report = run_sim(sim_config);
  } else {
    report = strategy_sweep(sim_config);
  }
  table.header = {"strategy",        "utility",      "stderr",       "in_best_band",
                  "high_free_prob",  "low_free_prob", "free_prob_q2", "free_prob_q4"};
  const double high_free = report.steady_free_prob[0];
  double low_free = 0.0;
  for (size_t c = 1; c < report.steady_free_prob.size(); ++c)
    low_free += report.steady_free_prob[c];
  low_free /= static_cast<double>(report.steady_free_prob.size() - 1);
  for (size_t i = 0; i < report.strategy_utilities.size(); ++i) {
    const StrategyScore& score = report.strategy_utilities[i];
    const bool banded = std::find(report.best_band.begin(), report.best_band.end(),
                                  static_cast<int>(i)) != report.best_band.end();
    table.rows.push_back({strategy_name(score.strategy), score.utility, score.std_error,
                          static_cast<long long>(banded ? 1 : 0), high_free, low_free,
                          report.free_prob_q2, report.free_prob_q4});
  }
  summary["high_free_prob"] = high_free;
  summary["low_free_prob"] = low_free;
  if (report.best_strategy >= 0)
    summary["best_strategy"] = strategy_name(
        report.strategy_utilities[static_cast<size_t>(report.best_strategy)].strategy);
  summary["background_utility"] = report.background_utility;
}

void run_oracle_dump(const Loaded& loaded, RowTable& table, json& summary) {
  const json& config = loaded.config;
  const CandidatePool pool = pool_from_config(config);
  const ModelSpec model = model_from_config(config);
  const RankingDistribution dist = derive_distribution(model, pool);
  const PolicyTable policy = oracle_policy(dist, pool);
  table.header = {"status_mask", "status_bits", "pick", "expected_utility", "status_prob"};
  const int n = pool.size();
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::string bits(static_cast<size_t>(n), '0');
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1u) bits[static_cast<size_t>(i)] = '1';
    if (policy.picks[mask] == PolicyTable::kUnreachable) {
      table.rows.push_back({static_cast<long long>(mask), bits, std::string("unreachable"),
                            0.0, 0.0});
      continue;
    }
    const PosteriorReport report = posterior_report(dist, pool, status_from_mask(mask, n));
    table.rows.push_back(
        {static_cast<long long>(mask), bits, static_cast<long long>(policy.picks[mask]),
         report.expected_utilities[static_cast<size_t>(report.best_index)],
         report.status_prob});
  }
  summary["states"] = table.rows.size();
}

Loaded load(const std::string& kind, const std::string& config_path,
            const CliOverrides& overrides) {
  Loaded loaded;
  loaded.kind = kind;
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
  try {
    in >> loaded.config;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (loaded.config.contains("experiment") &&
      loaded.config.at("experiment").get<std::string>() != kind)
    throw std::invalid_argument("config experiment kind does not match the subcommand");
  const json rng = get_section(loaded.config, "rng");
  if (rng.contains("seed")) {
    loaded.seed = rng.at("seed").get<uint64_t>();
    loaded.seed_given = true;
  }
  if (overrides.seed) {
    loaded.seed = *overrides.seed;
    loaded.seed_given = true;
  }
  const json output = get_section(loaded.config, "output");
  loaded.format = output.value("format", "csv");
  if (overrides.format) loaded.format = *overrides.format;
  if (loaded.format != "csv" && loaded.format != "json")
    throw std::invalid_argument("output.format must be csv or json");
  loaded.out_path = output.value("path", kind + "_out." + loaded.format);
  if (overrides.out_path) loaded.out_path = *overrides.out_path;
  return loaded;
}

json row_to_json(const RowTable& table, size_t row) {
  json obj = json::object();
  for (size_t c = 0; c < table.header.size(); ++c) {
    const Cell& cell = table.rows[row][c];
    if (const auto* d = std::get_if<double>(&cell)) {
      obj[table.header[c]] = *d;
    } else if (const auto* i = std::get_if<long long>(&cell)) {
      obj[table.header[c]] = *i;
    } else {
      obj[table.header[c]] = std::get<std::string>(cell);
    }
  }
  return obj;
}

}  // namespace

std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", *d);
    return buffer;
  }
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

void write_csv(const RowTable& table, std::ostream& out) {
  for (size_t c = 0; c < table.header.size(); ++c)
    out << table.header[c] << (c + 1 < table.header.size() ? "," : "\n");
  for (const auto& row : table.rows)
    for (size_t c = 0; c < row.size(); ++c)
      out << format_cell(row[c]) << (c + 1 < row.size() ? "," : "\n");
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"strategy_map",  "welfare_sweep",
                                                 "regret_curve",  "monotone_check",
                                                 "market_sim",    "oracle_dump"};
  return kinds;
}

void run_experiment(const std::string& kind, const std::string& config_path,
                    const CliOverrides& overrides, std::ostream& summary_out) {
  const Loaded loaded = load(kind, config_path, overrides);
  RowTable table;
  json summary = json::object();
  summary["experiment"] = kind;
  summary["seed"] = loaded.seed;

  if (kind == "strategy_map") {
    run_strategy_map(loaded, table, summary);
  } else if (kind == "welfare_sweep") {
    run_welfare_sweep(loaded, table, summary);
  } else if (kind == "regret_curve") {
    run_regret_curve(loaded, table, summary);
  } else if (kind == "monotone_check") {
    run_monotone_check(loaded, table, summary);
  } else if (kind == "market_sim") {
    run_market_sim(loaded, table, summary);
  } else if (kind == "oracle_dump") {
    run_oracle_dump(loaded, table, summary);
  } else {
    throw std::invalid_argument("unknown experiment kind: " + kind);
  }

  std::ofstream out(loaded.out_path);
  if (!out) throw std::invalid_argument("cannot open output file: " + loaded.out_path);
  if (loaded.format == "csv") {
    write_csv(table, out);
  } else {
    json doc;
    doc["metadata"] = {{"seed", loaded.seed}, {"version", kVersion}, {"config", loaded.config}};
    json rows = json::array();
    for (size_t r = 0; r < table.rows.size(); ++r) rows.push_back(row_to_json(table, r));
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << "\n";
  }

  summary["rows"] = table.rows.size();
  summary["output"] = loaded.out_path;
  summary["version"] = kVersion;
  if (!summary.contains("violations")) summary["violations"] = 0;
  summary_out << summary.dump() << "\n";
}

}  // namespace ranksel
