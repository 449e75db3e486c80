// attrspace: synthesize labeled spaces, train the toy encoder, search
// attribute intersections, and export the analysis bundles.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "attrspace/analyze.hpp"
#include "attrspace/checks.hpp"
#include "attrspace/common.hpp"
#include "attrspace/intersect.hpp"
#include "attrspace/space.hpp"
#include "attrspace/synth.hpp"
#include "attrspace/trainer.hpp"

namespace {

using attrspace::IoError;
using attrspace::ValidationError;
using json = nlohmann::ordered_json;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError(path + ": bad JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ValidationError(path + ": config must be a JSON object");
  return j;
}

// flags override the config file: only fill from the file when the user
// did not pass the flag
template <typename T>
void cfg(const CLI::App* cmd, const json& conf, const std::string& flag, const std::string& key,
         T& value) {
  if (!conf.contains(key)) return;
  const CLI::Option* opt = cmd->get_option_no_throw("--" + flag);
  if (opt && opt->count() > 0) return;
  try {
    value = conf.at(key).get<T>();
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "' has the wrong type");
  }
}

long long require_seed(long long seed) {
  if (seed < 0)
    throw ValidationError("--seed is required (deterministic runs only, no wall-clock default)");
  return seed;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failure on '" + path + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError(path + ": bad JSON: " + std::string(e.what()));
  }
  return j;
}

attrspace::AttributeQuery parse_query(const std::vector<std::string>& targets,
                                      const std::vector<double>& weights) {
  attrspace::AttributeQuery q;
  for (const auto& t : targets) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == t.size())
      throw ValidationError("target '" + t + "' must look like aspect=attribute");
    q.targets.push_back({t.substr(0, eq), t.substr(eq + 1)});
  }
  q.weights = weights;
  if (q.weights.empty()) q.weights.assign(q.targets.size(), 1.0);
  if (q.weights.size() != q.targets.size())
    throw ValidationError("got " + std::to_string(q.targets.size()) + " --target but " +
                          std::to_string(q.weights.size()) + " --weight");
  return q;
}

// K for the --k 0 sentinel: large enough that every target degenerates to
// its full attribute subset
std::size_t full_k(const attrspace::AttributeSpace& space, const attrspace::AttributeQuery& q) {
  const auto rq = attrspace::resolve_query(space, q);
  std::size_t k = 1;
  for (const auto& [a, t] : rq.targets) k = std::max(k, space.ordinals(a, t).size());
  return k;
}

json search_result_json(const attrspace::IntersectionResult& res, bool with_trajectories) {
  json j;
  j["point"] = res.point;
  j["iterations_run"] = res.iterations_run;
  j["pool_truncated"] = res.pool_truncated;
  j["selected_candidate"] = res.selected_candidate;
  j["shortlist"] = res.shortlist;
  json scores = json::array();
  for (const auto c : res.shortlist) scores.push_back(res.final_scores[c]);
  j["shortlist_scores"] = std::move(scores);
  std::size_t conv = 0;
  for (const char c : res.converged) conv += c ? 1 : 0;
  j["candidates"] = res.converged.size();
  j["converged_candidates"] = conv;
  j["selected_converged_after"] =
      res.converged_after[res.selected_candidate] == SIZE_MAX
          ? json(nullptr)
          : json(res.converged_after[res.selected_candidate]);
  if (with_trajectories) j["trajectories"] = res.trajectories;
  return j;
}

// ---- subcommand payloads ----------------------------------------------------

struct SynthArgs {
  std::string scenario, out, config;
  long long seed = -1;
  std::size_t dim = 0;
};

int cmd_synth(const CLI::App* cmd, SynthArgs a) {
  const json conf = load_config(a.config);
  cfg(cmd, conf, "scenario", "scenario", a.scenario);
  cfg(cmd, conf, "out", "out", a.out);
  cfg(cmd, conf, "seed", "seed", a.seed);
  cfg(cmd, conf, "dim", "dim", a.dim);
  const auto seed = static_cast<std::uint64_t>(require_seed(a.seed));
  if (a.scenario.empty()) throw ValidationError("--scenario is required");
  if (a.out.empty()) throw ValidationError("--out is required");

  attrspace::Scenario sc;
  if (a.scenario.size() > 5 && a.scenario.substr(a.scenario.size() - 5) == ".json") {
    sc = attrspace::scenario_from_json_file(a.scenario);
    sc.seed = seed;
  } else {
    sc = attrspace::preset_scenario(a.scenario, seed, a.dim);
  }
  const attrspace::AttributeSpace space = attrspace::build_scenario(sc);
  attrspace::save_space(space, a.out, attrspace::format_from_path(a.out));

  json hdr;
  hdr["command"] = "synth";
  hdr["scenario"] = sc.name;
  hdr["seed"] = seed;
  hdr["points"] = space.size();
  hdr["dim"] = space.dim();
  hdr["out"] = a.out;
  std::cout << hdr.dump() << '\n';
  return 0;
}

struct TrainArgs {
  std::string data, out_space, out_model, config;
  long long seed = -1;
  std::size_t latent_dim = 8, epochs = 150, batch = 128, hidden = 32, hidden2 = 32;
  double lr = 1e-4, momentum = 0.9, lambda = 1e-3;
  double w1 = 0.5, w2 = 0.2, w3 = 0.3;
};

int cmd_train(const CLI::App* cmd, TrainArgs a) {
  const json conf = load_config(a.config);
  cfg(cmd, conf, "data", "data", a.data);
  cfg(cmd, conf, "out-space", "out_space", a.out_space);
  cfg(cmd, conf, "out-model", "out_model", a.out_model);
  cfg(cmd, conf, "seed", "seed", a.seed);
  cfg(cmd, conf, "latent-dim", "latent_dim", a.latent_dim);
  cfg(cmd, conf, "epochs", "epochs", a.epochs);
  cfg(cmd, conf, "batch", "batch", a.batch);
  cfg(cmd, conf, "hidden", "hidden", a.hidden);
  cfg(cmd, conf, "hidden2", "hidden2", a.hidden2);
  cfg(cmd, conf, "lr", "lr", a.lr);
  cfg(cmd, conf, "momentum", "momentum", a.momentum);
  cfg(cmd, conf, "lambda", "lambda", a.lambda);
  cfg(cmd, conf, "w1", "w1", a.w1);
  cfg(cmd, conf, "w2", "w2", a.w2);
  cfg(cmd, conf, "w3", "w3", a.w3);
  const auto seed = static_cast<std::uint64_t>(require_seed(a.seed));
  if (a.data.empty()) throw ValidationError("--data is required");
  if (a.out_space.empty()) throw ValidationError("--out-space is required");
  if (a.out_model.empty()) throw ValidationError("--out-model is required");

  attrspace::TrainConfig tc;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch;
  tc.lr = a.lr;
  tc.momentum = a.momentum;
  tc.lambda = a.lambda;
  tc.weights = {a.w1, a.w2, a.w3};
  tc.seed = seed;
  tc.dims.d = a.latent_dim;
  tc.dims.h = a.hidden;
  tc.dims.h2 = a.hidden2;

  json hdr;  // run header: echoes the effective configuration
  hdr["command"] = "train";
  hdr["seed"] = seed;
  hdr["latent_dim"] = a.latent_dim;
  hdr["epochs"] = a.epochs;
  hdr["batch"] = a.batch;
  hdr["lr"] = a.lr;
  hdr["momentum"] = a.momentum;
  hdr["w1"] = a.w1;
  hdr["w2"] = a.w2;
  hdr["w3"] = a.w3;
  hdr["lambda"] = a.lambda;
  json ablation = json::array();
  if (a.w2 == 0.0) ablation.push_back("no-cls");
  if (a.w3 == 0.0) ablation.push_back("no-gap");
  hdr["ablation"] = std::move(ablation);
  std::cout << hdr.dump() << '\n';

  const attrspace::AttributeSpace data =
      attrspace::load_space(a.data, attrspace::format_from_path(a.data));
  attrspace::TrainResult res = attrspace::train(data, tc);

  attrspace::save_model(res.model, a.out_model);
  attrspace::save_space(res.latents, a.out_space, attrspace::format_from_path(a.out_space));

  json tail;
  tail["steps"] = res.steps;
  tail["first_epoch_loss"] = res.epoch_loss.front();
  tail["final_epoch_loss"] = res.epoch_loss.back();
  tail["out_model"] = a.out_model;
  tail["out_space"] = a.out_space;
  std::cout << tail.dump() << '\n';
  return 0;
}

struct SearchArgs {
  std::string space, out, config;
  std::vector<std::string> targets;
  std::vector<double> weights;
  long long seed = -1;
  std::size_t k = 200, m = 1000, iters = 15, pool_factor = 10, top_c = 10, k_eval = 10;
  std::size_t threads = 0;
  bool stochastic = false;
  bool trajectories = false;
};

int cmd_search(const CLI::App* cmd, SearchArgs a) {
  const json conf = load_config(a.config);
  cfg(cmd, conf, "space", "space", a.space);
  cfg(cmd, conf, "json", "out", a.out);
  cfg(cmd, conf, "target", "targets", a.targets);
  cfg(cmd, conf, "weight", "weights", a.weights);
  cfg(cmd, conf, "seed", "seed", a.seed);
  cfg(cmd, conf, "k", "k", a.k);
  cfg(cmd, conf, "m", "m", a.m);
  cfg(cmd, conf, "iters", "iters", a.iters);
  cfg(cmd, conf, "pool-factor", "pool_factor", a.pool_factor);
  cfg(cmd, conf, "top-c", "top_c", a.top_c);
  cfg(cmd, conf, "k-eval", "k_eval", a.k_eval);
  cfg(cmd, conf, "threads", "threads", a.threads);
  const auto seed = static_cast<std::uint64_t>(require_seed(a.seed));
  if (a.space.empty()) throw ValidationError("--space is required");

  const attrspace::AttributeSpace space =
      attrspace::load_space(a.space, attrspace::format_from_path(a.space));
  const attrspace::AttributeQuery q = parse_query(a.targets, a.weights);

  attrspace::SearchConfig sc;
  sc.K = a.k == 0 ? full_k(space, q) : a.k;  // --k 0 = full-K degenerate mode
  sc.M = a.m;
  sc.S = a.iters;
  sc.pool_factor = a.pool_factor;
  sc.top_c = a.top_c;
  sc.seed = seed;
  sc.threads = a.threads;
  sc.selection = a.stochastic ? attrspace::SearchConfig::Selection::stochastic
                              : attrspace::SearchConfig::Selection::deterministic;
  sc.record_trajectories = a.trajectories;

  const attrspace::IntersectionResult res = attrspace::search(space, q, sc);
  const double qual = attrspace::quality(space, q, res.point, a.k_eval);

  json j;
  j["command"] = "search";
  json meta;
  meta["K"] = sc.K;
  meta["M"] = sc.M;
  meta["S"] = sc.S;
  meta["seed"] = seed;
  meta["k_eval"] = a.k_eval;
  meta["selection"] = a.stochastic ? "stochastic" : "deterministic";
  json tgt = json::array();
  for (const auto& t : q.targets) tgt.push_back(t.aspect + "=" + t.attribute);
  meta["targets"] = std::move(tgt);
  meta["weights"] = q.weights;
  j["metadata"] = std::move(meta);
  j["quality"] = qual;
  j.update(search_result_json(res, a.trajectories));

  if (!a.out.empty()) write_json_file(j, a.out);
  std::cout << (a.out.empty() ? j.dump(2) : j["metadata"].dump()) << '\n';
  return 0;
}

struct BaselineArgs {
  std::string space, out, config;
  std::vector<std::string> targets;
  std::vector<double> weights;
  std::size_t k_eval = 10;
};

int cmd_baseline(const CLI::App* cmd, BaselineArgs a) {
  const json conf = load_config(a.config);
  cfg(cmd, conf, "space", "space", a.space);
  cfg(cmd, conf, "json", "out", a.out);
  cfg(cmd, conf, "target", "targets", a.targets);
  cfg(cmd, conf, "weight", "weights", a.weights);
  cfg(cmd, conf, "k-eval", "k_eval", a.k_eval);
  if (a.space.empty()) throw ValidationError("--space is required");

  const attrspace::AttributeSpace space =
      attrspace::load_space(a.space, attrspace::format_from_path(a.space));
  const attrspace::AttributeQuery q = parse_query(a.targets, a.weights);
  const std::vector<double> point = attrspace::interpolation_baseline(space, q);
  const double qual = attrspace::quality(space, q, point, a.k_eval);

  json j;
  j["command"] = "baseline";
  json tgt = json::array();
  for (const auto& t : q.targets) tgt.push_back(t.aspect + "=" + t.attribute);
  j["metadata"] = {{"targets", std::move(tgt)}, {"k_eval", a.k_eval}};
  j["point"] = point;
  j["quality"] = qual;
  if (!a.out.empty()) write_json_file(j, a.out);
  std::cout << (a.out.empty() ? j.dump(2) : j["metadata"].dump()) << '\n';
  return 0;
}

struct SweepArgs {
  std::string space, out, config;
  std::vector<std::string> targets, ks;
  std::vector<double> weights;
  long long seed = -1;
  std::size_t m = 1000, iters = 15, k_eval = 10, threads = 0;
};

int cmd_sweep_k(const CLI::App* cmd, SweepArgs a) {
  const json conf = load_config(a.config);
  cfg(cmd, conf, "space", "space", a.space);
  cfg(cmd, conf, "out", "out", a.out);
  cfg(cmd, conf, "target", "targets", a.targets);
  cfg(cmd, conf, "weight", "weights", a.weights);
  cfg(cmd, conf, "ks", "ks", a.ks);
  cfg(cmd, conf, "seed", "seed", a.seed);
  cfg(cmd, conf, "m", "m", a.m);
  cfg(cmd, conf, "iters", "iters", a.iters);
  cfg(cmd, conf, "k-eval", "k_eval", a.k_eval);
  cfg(cmd, conf, "threads", "threads", a.threads);
  const auto seed = static_cast<std::uint64_t>(require_seed(a.seed));
  if (a.space.empty()) throw ValidationError("--space is required");
  if (a.out.empty()) throw ValidationError("--out is required");

  const attrspace::AttributeSpace space =
      attrspace::load_space(a.space, attrspace::format_from_path(a.space));
  const attrspace::AttributeQuery q = parse_query(a.targets, a.weights);

  // parse k list; "full" is the degenerate mode; dedup keeps first mention
  std::vector<std::size_t> ks;
  for (const auto& s : a.ks) {
    std::size_t k;
    if (s == "full") {
      k = 0;
    } else {
      try {
        k = std::stoull(s);
      } catch (const std::exception&) {
        throw ValidationError("bad k value '" + s + "' (expect an integer or 'full')");
      }
      if (k == 0) throw ValidationError("k must be >= 1 (use 'full' for the degenerate mode)");
    }
    if (std::find(ks.begin(), ks.end(), k) != ks.end()) {
      std::cerr << "warning: duplicate k value '" << s << "' ignored\n";
      continue;
    }
    ks.push_back(k);
  }
  if (ks.size() < 2) throw ValidationError("sweep-k needs at least 2 distinct k values");

  const std::vector<double> base_point = attrspace::interpolation_baseline(space, q);
  const double base_quality = attrspace::quality(space, q, base_point, a.k_eval);

  json rows = json::array();
  std::vector<std::string> csv;
  for (const std::size_t k : ks) {
    attrspace::SearchConfig sc;
    sc.K = k == 0 ? full_k(space, q) : k;
    sc.M = a.m;
    sc.S = a.iters;
    sc.seed = seed;  // shared seed: rows differ only in K
    sc.threads = a.threads;
    sc.record_trajectories = false;
    const attrspace::IntersectionResult res = attrspace::search(space, q, sc);
    const double qual = attrspace::quality(space, q, res.point, a.k_eval);
    json row;
    row["k"] = k == 0 ? json("full") : json(k);
    row["searched_quality"] = qual;
    row["baseline_quality"] = base_quality;
    rows.push_back(std::move(row));
    csv.push_back((k == 0 ? std::string("full") : std::to_string(k)) + "," +
                  std::to_string(qual) + "," + std::to_string(base_quality));
  }

  const bool as_csv = a.out.size() > 4 && a.out.substr(a.out.size() - 4) == ".csv";
  if (as_csv) {
    std::ofstream out(a.out, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + a.out + "' for writing");
    out << "k,searched_quality,baseline_quality\n";
    for (const auto& line : csv) out << line << '\n';
  } else {
    json j;
    j["command"] = "sweep-k";
    j["metadata"] = {{"M", a.m}, {"S", a.iters}, {"k_eval", a.k_eval}, {"seed", seed}};
    j["rows"] = std::move(rows);
    write_json_file(j, a.out);
  }
  std::cout << "{\"command\":\"sweep-k\",\"rows\":" << ks.size() << ",\"out\":\"" << a.out
            << "\"}\n";
  return 0;
}

struct ProjectArgs {
  std::string space, out, mode = "joint", config;
  std::vector<std::string> attributes, overlays;
  bool kde = false;
  std::size_t kde_res = 200;
  std::size_t threads = 0;
};

int cmd_project(const CLI::App* cmd, ProjectArgs a) {
  const json conf = load_config(a.config);
  cfg(cmd, conf, "space", "space", a.space);
  cfg(cmd, conf, "out", "out", a.out);
  cfg(cmd, conf, "mode", "mode", a.mode);
  cfg(cmd, conf, "attributes", "attributes", a.attributes);
  cfg(cmd, conf, "overlay", "overlays", a.overlays);
  cfg(cmd, conf, "kde-res", "kde_res", a.kde_res);
  cfg(cmd, conf, "threads", "threads", a.threads);
  if (!a.kde && conf.contains("kde")) a.kde = conf.at("kde").get<bool>();
  if (a.space.empty()) throw ValidationError("--space is required");
  if (a.out.empty()) throw ValidationError("--out is required");
  if (a.mode != "joint" && a.mode != "independent")
    throw ValidationError("--mode must be 'joint' or 'independent'");

  const attrspace::AttributeSpace space =
      attrspace::load_space(a.space, attrspace::format_from_path(a.space));
  const auto& schema = space.schema();

  // selected attributes; default = every attribute
  std::vector<std::pair<std::size_t, std::size_t>> sel;
  if (a.attributes.empty()) {
    for (std::size_t as = 0; as < schema.aspect_count(); ++as)
      for (std::size_t t = 0; t < schema.attributes[as].size(); ++t) sel.emplace_back(as, t);
  } else {
    for (const auto& s : a.attributes) {
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ValidationError("attribute '" + s + "' must look like aspect=attribute");
      const int as = schema.aspect_ordinal(s.substr(0, eq));
      if (as < 0) throw ValidationError("unknown aspect '" + s.substr(0, eq) + "'");
      const int t = schema.attribute_ordinal(static_cast<std::size_t>(as), s.substr(eq + 1));
      if (t < 0) throw ValidationError("unknown attribute '" + s + "'");
      sel.emplace_back(static_cast<std::size_t>(as), static_cast<std::size_t>(t));
    }
  }

  // joint: fit on the whole space; independent: fit on the selected
  // attributes' points only (the two can disagree about intersections)
  attrspace::Mat fit_pts;
  if (a.mode == "joint") {
    fit_pts = attrspace::Mat(space.size(), space.dim());
    std::copy_n(space.data(), space.size() * space.dim(), fit_pts.a.data());
  } else {
    std::vector<std::uint32_t> ords;
    for (const auto& [as, t] : sel) {
      const auto& o = space.ordinals(as, t);
      ords.insert(ords.end(), o.begin(), o.end());
    }
    std::sort(ords.begin(), ords.end());
    ords.erase(std::unique(ords.begin(), ords.end()), ords.end());
    fit_pts = attrspace::Mat(ords.size(), space.dim());
    for (std::size_t i = 0; i < ords.size(); ++i)
      std::copy_n(space.point(ords[i]).data(), space.dim(), fit_pts.row(i));
  }

  attrspace::AnalysisBundle bundle;
  bundle.projection = attrspace::pca_fit(fit_pts, 2);

  for (const auto& [as, t] : sel) {
    const auto& ords = space.ordinals(as, t);
    attrspace::Mat pts(ords.size(), space.dim());
    for (std::size_t i = 0; i < ords.size(); ++i)
      std::copy_n(space.point(ords[i]).data(), space.dim(), pts.row(i));
    const std::string label = schema.aspects[as] + "/" + schema.attributes[as][t];
    attrspace::Mat proj = attrspace::pca_project(bundle.projection, pts);
    if (a.kde && proj.rows >= 2)
      bundle.densities.emplace_back(
          label, attrspace::kde2d(proj, a.kde_res, a.kde_res, {}, nullptr, nullptr, a.threads));
    bundle.scatters.emplace_back(label, std::move(proj));
  }

  for (const auto& s : a.overlays) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ValidationError("overlay '" + s + "' must look like name=result.json");
    const json r = read_json_file(s.substr(eq + 1));
    if (!r.contains("point"))
      throw ValidationError(s.substr(eq + 1) + " has no 'point' field");
    const std::vector<double> pt = r.at("point").get<std::vector<double>>();
    bundle.overlays.emplace_back(s.substr(0, eq),
                                 attrspace::pca_project_point(bundle.projection, pt));
  }

  attrspace::export_analysis(bundle, a.out);
  json hdr;
  hdr["command"] = "project";
  hdr["mode"] = a.mode;
  hdr["scatters"] = bundle.scatters.size();
  hdr["densities"] = bundle.densities.size();
  hdr["overlays"] = bundle.overlays.size();
  hdr["out"] = a.out;
  std::cout << hdr.dump() << '\n';
  return 0;
}

struct CheckArgs {
  std::string fault, out;
  long long seed = 0;
};

int cmd_check(CheckArgs a) {
  const auto results = attrspace::run_checks(static_cast<std::uint64_t>(a.seed), a.fault);
  json suites = json::array();
  bool all = true;
  for (const auto& r : results) {
    suites.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    all = all && r.pass;
  }
  json j;
  j["command"] = "check";
  j["seed"] = a.seed;
  if (!a.fault.empty()) j["fault"] = a.fault;
  j["suites"] = std::move(suites);
  j["all_pass"] = all;
  std::cout << j.dump(2) << '\n';
  if (!a.out.empty()) write_json_file(j, a.out);
  return all ? 0 : 4;
}

struct PipelineArgs {
  std::string config, out_dir;
  long long seed = -1;
};

int cmd_pipeline(const CLI::App* cmd, PipelineArgs a) {
  if (a.config.empty()) throw ValidationError("--config is required");
  const json conf = load_config(a.config);
  cfg(cmd, conf, "seed", "seed", a.seed);
  cfg(cmd, conf, "out-dir", "out_dir", a.out_dir);
  const auto seed = static_cast<std::uint64_t>(require_seed(a.seed));
  if (a.out_dir.empty()) throw ValidationError("--out-dir is required");

  namespace fs = std::filesystem;
  fs::create_directories(a.out_dir);
  const auto at = [&](const std::string& name) { return (fs::path(a.out_dir) / name).string(); };
  const auto stage = [&](const std::string& name, const std::string& out, auto&& run) {
    if (fs::exists(out)) {
      std::cout << "[pipeline] " << name << ": kept existing " << out << '\n';
      return;
    }
    run();
    std::cout << "[pipeline] " << name << ": wrote " << out << '\n';
  };

  // synth
  const std::string space_path = at("space.jsonl");
  stage("synth", space_path, [&] {
    attrspace::Scenario sc;
    const std::string name = conf.value("scenario", std::string("symmetric-overlap"));
    if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
      sc = attrspace::scenario_from_json_file(name);
      sc.seed = seed;
    } else {
      sc = attrspace::preset_scenario(name, seed, conf.value("dim", std::size_t{0}));
    }
    attrspace::save_space(attrspace::build_scenario(sc), space_path,
                          attrspace::SpaceFormat::jsonl);
  });

  // train (optional): searches run on the latent space when present
  std::string work_space = space_path;
  if (conf.contains("train")) {
    const json& tj = conf.at("train");
    const std::string latent_path = at("latent.jsonl");
    const std::string model_path = at("model.bin");
    stage("train", latent_path, [&] {
      attrspace::TrainConfig tc;
      tc.epochs = tj.value("epochs", std::size_t{150});
      tc.batch_size = tj.value("batch", std::size_t{128});
      tc.lr = tj.value("lr", 1e-4);
      tc.momentum = tj.value("momentum", 0.9);
      tc.lambda = tj.value("lambda", 1e-3);
      tc.weights.w1 = tj.value("w1", 0.5);
      tc.weights.w2 = tj.value("w2", 0.2);
      tc.weights.w3 = tj.value("w3", 0.3);
      tc.seed = seed;
      tc.dims.d = tj.value("latent_dim", std::size_t{8});
      tc.dims.h = tj.value("hidden", std::size_t{32});
      tc.dims.h2 = tj.value("hidden2", std::size_t{32});
      const attrspace::AttributeSpace data =
          attrspace::load_space(space_path, attrspace::SpaceFormat::jsonl);
      attrspace::TrainResult res = attrspace::train(data, tc);
      attrspace::save_model(res.model, model_path);
      attrspace::save_space(res.latents, latent_path, attrspace::SpaceFormat::jsonl);
    });
    work_space = latent_path;
  }

  // search + baseline
  if (!conf.contains("search")) throw ValidationError("pipeline config needs a 'search' object");
  const json& sj = conf.at("search");
  const attrspace::AttributeQuery q =
      parse_query(sj.value("targets", std::vector<std::string>{}),
                  sj.value("weights", std::vector<double>{}));
  const std::size_t k_eval = sj.value("k_eval", std::size_t{10});
  const std::string search_path = at("search.json");
  const std::string baseline_path = at("baseline.json");
  stage("search", search_path, [&] {
    const attrspace::AttributeSpace space =
        attrspace::load_space(work_space, attrspace::SpaceFormat::jsonl);
    attrspace::SearchConfig sc;
    const std::size_t k = sj.value("k", std::size_t{200});
    sc.K = k == 0 ? full_k(space, q) : k;
    sc.M = sj.value("m", std::size_t{1000});
    sc.S = sj.value("iters", std::size_t{15});
    sc.seed = seed;
    sc.threads = sj.value("threads", std::size_t{0});
    sc.record_trajectories = false;
    const attrspace::IntersectionResult res = attrspace::search(space, q, sc);
    json j;
    j["command"] = "search";
    j["metadata"] = {{"K", sc.K}, {"M", sc.M}, {"S", sc.S}, {"seed", seed}};
    j["quality"] = attrspace::quality(space, q, res.point, k_eval);
    j.update(search_result_json(res, false));
    write_json_file(j, search_path);
  });
  stage("baseline", baseline_path, [&] {
    const attrspace::AttributeSpace space =
        attrspace::load_space(work_space, attrspace::SpaceFormat::jsonl);
    const std::vector<double> point = attrspace::interpolation_baseline(space, q);
    json j;
    j["command"] = "baseline";
    j["point"] = point;
    j["quality"] = attrspace::quality(space, q, point, k_eval);
    write_json_file(j, baseline_path);
  });

  // project with both overlay points
  const std::string analysis_path = at("analysis.json");
  stage("project", analysis_path, [&] {
    ProjectArgs pa;
    pa.space = work_space;
    pa.out = analysis_path;
    pa.mode = "joint";
    pa.kde = true;
    if (conf.contains("project")) {
      const json& pj = conf.at("project");
      pa.mode = pj.value("mode", pa.mode);
      pa.kde = pj.value("kde", pa.kde);
      pa.kde_res = pj.value("kde_res", pa.kde_res);
      pa.attributes = pj.value("attributes", pa.attributes);
    }
    pa.overlays = {"searched=" + search_path, "baseline=" + baseline_path};
    CLI::App dummy;  // no flags were passed; config values stand
    cmd_project(&dummy, pa);
  });

  std::cout << "{\"command\":\"pipeline\",\"out_dir\":\"" << a.out_dir << "\"}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attribute-space toolkit: synthetic spaces, toy training, "
               "intersection search, analysis export"};
  app.require_subcommand(1);

  SynthArgs sy;
  CLI::App* c_synth = app.add_subcommand("synth", "generate a synthetic labeled space");
  c_synth->add_option("--scenario", sy.scenario, "preset name or scenario .json file");
  c_synth->add_option("--seed", sy.seed, "RNG seed (required)");
  c_synth->add_option("--out", sy.out, "output space file (.jsonl or .bin)");
  c_synth->add_option("--dim", sy.dim, "dimension override (three-aspect preset: 8 or 768)");
  c_synth->add_option("--config", sy.config, "JSON config file (flags override it)");

  TrainArgs tr;
  CLI::App* c_train = app.add_subcommand("train", "train the toy encoder/decoder/classifiers");
  c_train->add_option("--data", tr.data, "input space file");
  c_train->add_option("--latent-dim", tr.latent_dim, "latent dimension d");
  c_train->add_option("--epochs", tr.epochs, "training epochs");
  c_train->add_option("--batch", tr.batch, "batch size");
  c_train->add_option("--hidden", tr.hidden, "encoder hidden width");
  c_train->add_option("--hidden2", tr.hidden2, "decoder hidden width");
  c_train->add_option("--lr", tr.lr, "learning rate");
  c_train->add_option("--momentum", tr.momentum, "SGD momentum");
  c_train->add_option("--lambda", tr.lambda, "latent perturbation scale");
  c_train->add_option("--w1", tr.w1, "reconstruction weight");
  c_train->add_option("--w2", tr.w2, "classification weight");
  c_train->add_option("--w3", tr.w3, "aspect-gap weight");
  c_train->add_option("--seed", tr.seed, "RNG seed (required)");
  c_train->add_option("--out-space", tr.out_space, "latent space output file");
  c_train->add_option("--out-model", tr.out_model, "model output file");
  c_train->add_option("--config", tr.config, "JSON config file (flags override it)");

  SearchArgs se;
  CLI::App* c_search = app.add_subcommand("search", "intersection search over a space");
  c_search->add_option("--space", se.space, "input space file");
  c_search->add_option("--target", se.targets, "aspect=attribute (repeatable)");
  c_search->add_option("--weight", se.weights, "target weight (repeatable, pairs with --target)");
  c_search->add_option("--k", se.k, "neighbors per step; 0 = full attribute subsets");
  c_search->add_option("--m", se.m, "candidate count");
  c_search->add_option("--iters", se.iters, "iteration cap");
  c_search->add_option("--pool-factor", se.pool_factor, "init pool size = factor * m");
  c_search->add_option("--top-c", se.top_c, "selection shortlist size");
  c_search->add_option("--k-eval", se.k_eval, "K for the reported quality");
  c_search->add_flag("--stochastic", se.stochastic, "pick randomly from the shortlist");
  c_search->add_flag("--trajectories", se.trajectories, "record per-candidate trajectories");
  c_search->add_option("--threads", se.threads, "worker threads (0 = ATTRSPACE_THREADS or 1)");
  c_search->add_option("--seed", se.seed, "RNG seed (required)");
  c_search->add_option("--json", se.out, "result JSON path (else prints to stdout)");
  c_search->add_option("--config", se.config, "JSON config file (flags override it)");

  BaselineArgs ba;
  CLI::App* c_base = app.add_subcommand("baseline", "weighted center interpolation baseline");
  c_base->add_option("--space", ba.space, "input space file");
  c_base->add_option("--target", ba.targets, "aspect=attribute (repeatable)");
  c_base->add_option("--weight", ba.weights, "target weight (repeatable)");
  c_base->add_option("--k-eval", ba.k_eval, "K for the reported quality");
  c_base->add_option("--json", ba.out, "result JSON path (else prints to stdout)");
  c_base->add_option("--config", ba.config, "JSON config file (flags override it)");

  SweepArgs sw;
  CLI::App* c_sweep = app.add_subcommand("sweep-k", "search once per k, tabulate quality");
  c_sweep->add_option("--space", sw.space, "input space file");
  c_sweep->add_option("--target", sw.targets, "aspect=attribute (repeatable)");
  c_sweep->add_option("--weight", sw.weights, "target weight (repeatable)");
  c_sweep->add_option("--ks", sw.ks, "k values; integers or 'full' (repeatable or comma list)")
      ->delimiter(',');
  c_sweep->add_option("--k-eval", sw.k_eval, "K for the quality column");
  c_sweep->add_option("--m", sw.m, "candidate count");
  c_sweep->add_option("--iters", sw.iters, "iteration cap");
  c_sweep->add_option("--threads", sw.threads, "worker threads");
  c_sweep->add_option("--seed", sw.seed, "RNG seed (required, shared across rows)");
  c_sweep->add_option("--out", sw.out, "output table (.csv or .json)");
  c_sweep->add_option("--config", sw.config, "JSON config file (flags override it)");

  ProjectArgs pr;
  CLI::App* c_proj = app.add_subcommand("project", "PCA/KDE analysis bundle export");
  c_proj->add_option("--space", pr.space, "input space file");
  c_proj->add_option("--attributes", pr.attributes, "aspect=attribute subset (repeatable)");
  c_proj->add_option("--mode", pr.mode, "'joint' (fit on all points) or 'independent'");
  c_proj->add_flag("--kde", pr.kde, "add a density grid per scatter");
  c_proj->add_option("--kde-res", pr.kde_res, "density grid resolution");
  c_proj->add_option("--overlay", pr.overlays, "name=result.json extra points (repeatable)");
  c_proj->add_option("--threads", pr.threads, "worker threads");
  c_proj->add_option("--out", pr.out, "bundle output path");
  c_proj->add_option("--config", pr.config, "JSON config file (flags override it)");

  CheckArgs ch;
  CLI::App* c_check = app.add_subcommand("check", "run the built-in verification suites");
  c_check->add_option("--seed", ch.seed, "suite seed");
  c_check->add_option("--fault", ch.fault, "sabotage one suite (it must then fail)");
  c_check->add_option("--json", ch.out, "also write the report to this path");

  PipelineArgs pi;
  CLI::App* c_pipe = app.add_subcommand("pipeline", "synth -> train -> search -> project");
  c_pipe->add_option("--config", pi.config, "pipeline JSON config");
  c_pipe->add_option("--seed", pi.seed, "RNG seed (overrides the config's)");
  c_pipe->add_option("--out-dir", pi.out_dir, "stage output directory (stages resume)");

  try {
    app.parse(argc, argv);
    if (*c_synth) return cmd_synth(c_synth, sy);
    if (*c_train) return cmd_train(c_train, tr);
    if (*c_search) return cmd_search(c_search, se);
    if (*c_base) return cmd_baseline(c_base, ba);
    if (*c_sweep) return cmd_sweep_k(c_sweep, sw);
    if (*c_proj) return cmd_project(c_proj, pr);
    if (*c_check) return cmd_check(ch);
    if (*c_pipe) return cmd_pipeline(c_pipe, pi);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const attrspace::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
