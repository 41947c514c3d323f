/*
 * Copyright 2026 The POTP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "potp/core/feature_matrix.hpp"
#include "potp/core/session_io.hpp"
#include "potp/error.hpp"
#include "potp/explain/shapley.hpp"
#include "potp/features/matrix_builder.hpp"
#include "potp/features/registry.hpp"
#include "potp/labeling/labeling.hpp"
#include "potp/labeling/stats.hpp"
#include "potp/ml/artifact.hpp"
#include "potp/ml/pipeline.hpp"
#include "potp/synth/cohort.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace potp;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr const char* kRunManifest = "run.json";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json read_json(const fs::path& p) {
  if (!fs::exists(p)) throw FormatError("missing file " + p.string());
  try {
    return json::parse(detail::read_text_file(p));
  } catch (const json::parse_error& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  detail::write_text_file(p, text);
}

// ---------------------------------------------------------------------------
// Configuration: JSON file values, overridden by flags.

struct Settings {
  json file = json::object();  // from --config
  json used = json::object();  // every resolved value, recorded in the run manifest

  template <class T>
  T get(const std::string& key, const std::optional<T>& flag, const T& fallback) {
    T v = fallback;
    if (flag) {
      v = *flag;
    } else if (file.contains(key)) {
      try {
        v = file.at(key).get<T>();
      } catch (const json::exception&) {
        throw UsageError("config key '" + key + "' has the wrong type");
      }
    }
    used[key] = v;
    return v;
  }

  template <class T>
  std::optional<T> get_opt(const std::string& key, const std::optional<T>& flag) {
    std::optional<T> v = flag;
    if (!v && file.contains(key) && !file.at(key).is_null()) {
      try {
        v = file.at(key).get<T>();
      } catch (const json::exception&) {
        throw UsageError("config key '" + key + "' has the wrong type");
      }
    }
    used[key] = v ? json(*v) : json();
    return v;
  }

  bool flag(const std::string& key, bool cli) {
    bool v = cli;
    if (!cli && file.contains(key)) v = file.at(key).is_boolean() && file.at(key).get<bool>();
    used[key] = v;
    return v;
  }
};

struct Common {
  std::optional<std::string> config_path;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string dir;
};

Settings load_settings(const Common& c) {
  Settings s;
  if (c.config_path) {
    s.file = read_json(*c.config_path);
    if (!s.file.is_object()) throw UsageError("config file must hold a JSON object");
  }
  return s;
}

int resolve_threads(Settings& s, const Common& c) {
  const int t = s.get<int>("threads", c.threads, 1);
  if (t < 1) throw UsageError("--threads must be at least 1");
  return t;
}

/// Flag, then config, then the seed recorded by an earlier stage.
std::uint64_t resolve_seed(Settings& s, const Common& c, const fs::path& dir) {
  auto seed = s.get_opt<std::uint64_t>("seed", c.seed);
  if (!seed && fs::exists(dir / kRunManifest)) {
    const json run = read_json(dir / kRunManifest);
    if (run.contains("seed")) seed = run["seed"].get<std::uint64_t>();
    s.used["seed"] = *seed;
  }
  if (!seed) throw UsageError("a seed is required: pass --seed or set it in the config");
  return *seed;
}

void record_stage(const fs::path& dir, const std::string& stage, const Settings& s,
                  const std::vector<std::string>& outputs) {
  json run = fs::exists(dir / kRunManifest) ? read_json(dir / kRunManifest) : json::object();
  if (s.used.contains("seed") && !s.used["seed"].is_null()) run["seed"] = s.used["seed"];
  run["stages"][stage] = {{"config", s.used},
                          {"config_hash", hex64(derive_seed(0, s.used.dump()))},
                          {"outputs", outputs},
                          {"recorded_at", utc_now()}};
  write_text(dir / kRunManifest, run.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Run-directory helpers.

std::vector<fs::path> manifests_under(const fs::path& root) {
  if (!fs::is_directory(root)) throw FormatError("not a directory: " + root.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() == "manifest.json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw FormatError("no session manifests under " + root.string());
  return out;
}

std::vector<Session> load_sessions(const fs::path& dir) {
  std::vector<Session> out;
  for (const auto& m : manifests_under(dir / "sessions")) out.push_back(load_session(m));
  return out;
}

std::vector<labeling::TimeError> load_time_errors(const fs::path& dir) {
  std::vector<labeling::TimeError> out;
  for (const auto& m : manifests_under(dir / "sessions")) {
    const auto e = labeling::time_errors(load_session_header(m));
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

std::vector<Session> load_headers(const fs::path& dir) {
  std::vector<Session> out;
  for (const auto& m : manifests_under(dir / "sessions")) out.push_back(load_session_header(m));
  return out;
}

FeatureMatrix load_features(const fs::path& dir) {
  const auto p = dir / "features.csv";
  if (!fs::exists(p)) throw FormatError("missing " + p.string() + " (run 'features' first)");
  return load_feature_matrix(p);
}

std::optional<labeling::PotpThresholds> threshold_override(Settings& s, std::optional<double> upper,
                                                           std::optional<double> lower) {
  const auto u = s.get_opt<double>("upper_threshold", upper);
  const auto l = s.get_opt<double>("lower_threshold", lower);
  if (!u && !l) return std::nullopt;
  if (!u || !l) throw UsageError("threshold override needs both --upper and --lower");
  if (!(*l < *u)) throw UsageError("threshold override needs lower < upper");
  return labeling::PotpThresholds{*u, *l, kNaN, kNaN, kNaN, kNaN};
}

/// Thresholds from the training subjects of the seeded split, as training does.
labeling::PotpThresholds training_thresholds(const std::vector<labeling::TimeError>& errors, std::uint64_t seed) {
  std::set<std::string> ids;
  for (const auto& e : errors) ids.insert(e.subject_id);
  const auto plan = ml::make_split_plan({ids.begin(), ids.end()}, seed);
  const std::set<std::string> train(plan.train_subjects.begin(), plan.train_subjects.end());
  std::vector<double> t;
  for (const auto& e : errors)
    if (train.contains(e.subject_id)) t.push_back(e.t_rel);
  return labeling::fit_potp_thresholds(t);
}

json thresholds_json(const labeling::PotpThresholds& th) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(); };
  return {{"upper", th.upper},         {"lower", th.lower},     {"mu_pos", num(th.mu_pos)},
          {"sigma_pos", num(th.sigma_pos)}, {"mu_neg", num(th.mu_neg)}, {"sigma_neg", num(th.sigma_neg)}};
}

labeling::PotpThresholds thresholds_from_json(const json& j) {
  auto num = [&](const char* k) { return j.contains(k) && j[k].is_number() ? j[k].get<double>() : kNaN; };
  if (!j.contains("upper") || !j.contains("lower")) throw FormatError("thresholds need 'upper' and 'lower'");
  return {num("upper"), num("lower"), num("mu_pos"), num("sigma_pos"), num("mu_neg"), num("sigma_neg")};
}

std::vector<ml::Algorithm> parse_families(const std::vector<std::string>& names) {
  std::vector<ml::Algorithm> out;
  for (const auto& n : names) {
    try {
      out.push_back(ml::algorithm_from_string(n));
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_synth(const Common& c, const std::string& scenario_flag, std::optional<int> subjects_flag) {
  Settings s = load_settings(c);
  const fs::path dir = c.dir;
  const auto scenario = s.get<std::string>("scenario", scenario_flag.empty() ? std::nullopt
                                                                              : std::optional(scenario_flag),
                                           "paper_like");
  synth::Scenario sc;
  try {
    sc = synth::scenario_from_string(scenario);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const int n = s.get<int>("subjects", subjects_flag, 18);
  if (n < 0) throw UsageError("--subjects must be non-negative");
  const auto seed = s.get_opt<std::uint64_t>("seed", c.seed);
  if (!seed) throw UsageError("a seed is required: pass --seed or set it in the config");
  const int threads = resolve_threads(s, c);

  const auto cohort = synth::generate_cohort_with_truth(static_cast<std::size_t>(n), sc, *seed, threads);
  std::vector<std::string> outputs;
  std::string truth = "subject_id,segment_index,class,t_rel_planted,t_perceived_s\n";
  for (std::size_t i = 0; i < cohort.sessions.size(); ++i) {
    const auto& ses = cohort.sessions[i];
    save_session(ses, dir / "sessions" / ses.subject_id);
    outputs.push_back("sessions/" + ses.subject_id + "/manifest.json");
    for (const auto& st : cohort.truths[i].segments)
      truth += ses.subject_id + "," + std::to_string(st.index) + "," + std::string(to_string(st.klass)) + "," +
               format_double(st.t_rel_planted) + "," + format_double(st.t_perceived) + "\n";
  }
  write_text(dir / "ground_truth.csv", truth);
  outputs.push_back("ground_truth.csv");
  record_stage(dir, "synth", s, outputs);
  std::cout << "wrote " << n << " " << scenario << " sessions to " << (dir / "sessions").string() << "\n";
  return 0;
}

int cmd_ingest(const Common& c, const std::string& src) {
  Settings s = load_settings(c);
  s.used["source"] = src;
  const fs::path dir = c.dir;
  std::set<std::string> ids;
  std::vector<std::string> outputs;
  for (const auto& m : manifests_under(src)) {
    const Session ses = load_session(m);
    if (!ids.insert(ses.subject_id).second) throw FormatError("duplicate subject_id " + ses.subject_id);
    save_session(ses, dir / "sessions" / ses.subject_id);
    outputs.push_back("sessions/" + ses.subject_id + "/manifest.json");
  }
  record_stage(dir, "ingest", s, outputs);
  std::cout << "ingested " << ids.size() << " sessions\n";
  return 0;
}

int cmd_features(const Common& c, std::optional<double> window_flag, const std::vector<std::string>& drop_flag) {
  Settings s = load_settings(c);
  const fs::path dir = c.dir;
  features::BuildOptions opt;
  opt.window_len_s = s.get<double>("window_len_s", window_flag, features::kDefaultWindowS);
  if (!(opt.window_len_s > 0)) throw UsageError("--window must be positive");
  opt.threads = resolve_threads(s, c);
  const auto drop = s.get<std::vector<std::string>>(
      "disabled_groups", drop_flag.empty() ? std::nullopt : std::optional(drop_flag), {});
  const std::set<std::string> groups = {"SKT", "EDA", "RSP", "ECG", "PPG"};
  for (const auto& g : drop)
    if (!groups.contains(g)) throw UsageError("unknown feature group '" + g + "'");

  FeatureMatrix m = features::build_feature_matrix(load_sessions(dir), opt);
  if (!drop.empty()) {
    std::vector<std::size_t> keep;
    for (const auto& f : features::feature_registry())
      if (!std::count(drop.begin(), drop.end(), f.group)) keep.push_back(*m.column_index(f.name));
    FeatureMatrix out;
    for (auto k : keep) out.columns.push_back(m.columns[k]);
    out.keys = m.keys;
    for (const auto& r : m.rows) {
      std::vector<double> row;
      for (auto k : keep) row.push_back(r[k]);
      out.rows.push_back(std::move(row));
    }
    m = std::move(out);
  }
  save_feature_matrix(m, dir / "features.csv");
  record_stage(dir, "features", s, {"features.csv"});
  std::cout << "wrote " << m.n_rows() << " windows x " << m.n_cols() << " features\n";
  return 0;
}

int cmd_label(const Common& c, bool rest_flag, std::optional<double> upper, std::optional<double> lower) {
  Settings s = load_settings(c);
  const fs::path dir = c.dir;
  const std::uint64_t seed = resolve_seed(s, c, dir);
  labeling::GroupingOptions grouping{s.flag("rest_as_neutral", rest_flag)};
  const auto errors = load_time_errors(dir);
  const auto fixed = threshold_override(s, upper, lower);
  const auto th = fixed ? *fixed : training_thresholds(errors, seed);
  const auto labeled = labeling::assign_labels(load_features(dir), errors, th, grouping);

  std::string csv = "subject_id,segment_index,window_index,t_rel,state,potp\n";
  for (std::size_t i = 0; i < labeled.t_rel.size(); ++i) {
    const auto& k = labeled.features.keys[i];
    csv += k.subject_id + "," + std::to_string(k.segment_index) + "," + std::to_string(k.window_index) + "," +
           format_double(labeled.t_rel[i]) + "," + labeling::to_string(labeled.state[i]) + "," +
           labeling::to_string(labeled.potp[i]) + "\n";
  }
  write_text(dir / "labels.csv", csv);
  json tj = thresholds_json(th);
  tj["source"] = fixed ? "override" : "training subjects";
  write_text(dir / "thresholds.json", tj.dump(2) + "\n");

  std::string seg = "subject_id,segment_index,class,t_rel\n";
  std::map<std::pair<std::string, int>, std::string> klass;
  for (const auto& ses : load_headers(dir))
    for (const auto& sg : ses.segments) klass[{ses.subject_id, sg.index}] = std::string(to_string(sg.klass));
  for (const auto& e : errors)
    seg += e.subject_id + "," + std::to_string(e.segment_index) + "," + klass[{e.subject_id, e.segment_index}] +
           "," + format_double(e.t_rel) + "\n";
  write_text(dir / "t_rel.csv", seg);
  record_stage(dir, "label", s, {"labels.csv", "thresholds.json", "t_rel.csv"});

  const auto counts = labeled.potp_counts();
  std::cout << "thresholds: lower " << format_double(th.lower) << ", upper " << format_double(th.upper) << "\n"
            << "windows: Slower " << counts.at(labeling::PotpLabel::Slower) << ", Faster "
            << counts.at(labeling::PotpLabel::Faster) << ", Unlabeled "
            << counts.at(labeling::PotpLabel::Unlabeled) << "\n";
  return 0;
}

int cmd_stats(const Common& c, bool rest_flag) {
  Settings s = load_settings(c);
  const fs::path dir = c.dir;
  labeling::GroupingOptions grouping{s.flag("rest_as_neutral", rest_flag)};
  const auto errors = load_time_errors(dir);
  const auto rows = labeling::run_group_tests(errors, grouping);
  write_text(dir / "group_tests.csv", labeling::group_tests_csv(rows));
  std::vector<std::string> outputs = {"group_tests.csv"};

  std::vector<double> t;
  for (const auto& e : errors) t.push_back(e.t_rel);
  labeling::PotpThresholds th;
  if (fs::exists(dir / "thresholds.json")) {
    th = thresholds_from_json(read_json(dir / "thresholds.json"));
  } else {
    th = labeling::fit_potp_thresholds(t);
    warn("no thresholds.json; histogram fits use every subject");
  }
  write_text(dir / "t_rel_histogram.csv", labeling::threshold_histogram_csv(t, th));
  outputs.push_back("t_rel_histogram.csv");

  // Stress self-report against time perception, overall and per class.
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by;
  for (const auto& ses : load_headers(dir))
    for (const auto& sg : ses.segments) {
      if (!sg.t_perceived || !sg.vass) continue;
      const double tr = labeling::compute_t_rel(sg.t_correct(), *sg.t_perceived);
      for (const std::string& key : {std::string("All"), labeling::to_string(labeling::group_state(sg, grouping))}) {
        by[key].first.push_back(static_cast<double>(*sg.vass));
        by[key].second.push_back(tr);
      }
    }
  std::string corr = "group,n,pearson_r,p_value\n";
  for (const auto& [g, xy] : by) {
    try {
      const auto r = stats::pearson_corr_test(xy.first, xy.second);
      corr += g + "," + std::to_string(r.n) + "," + format_double(r.r) + "," + format_double(r.p_value) + "\n";
    } catch (const InvalidArgument&) {
      corr += g + "," + std::to_string(xy.first.size()) + ",NaN,NaN\n";
    }
  }
  write_text(dir / "vass_correlation.csv", corr);
  outputs.push_back("vass_correlation.csv");
  record_stage(dir, "stats", s, outputs);
  std::cout << labeling::group_tests_csv(rows);
  return 0;
}

struct TrainFlags {
  std::optional<std::string> task;
  std::optional<int> tpe_budget;
  bool no_tpe = false;
  bool no_rfecv = false;
  std::vector<std::string> families;
  bool rest_as_neutral = false;
  std::optional<double> upper, lower;
};

std::string curve_csv(const std::vector<ml::CurvePoint>& pts) {
  std::string out = "fraction,train_score,validation_score,folds_used\n";
  for (const auto& p : pts)
    out += format_double(p.fraction) + "," + format_double(p.train_mean) + "," + format_double(p.val_mean) + "," +
           std::to_string(p.folds_used) + "\n";
  return out;
}

std::string selection_csv(const ml::SelectionReport& r) {
  std::string out = "algorithm,cv_mean,cv_std,train_mean,gap,contender,chosen\n";
  for (const auto& e : r.entries) {
    const bool cont = std::count(r.contenders.begin(), r.contenders.end(), e.algorithm) > 0;
    out += ml::to_string(e.algorithm) + "," + format_double(e.cv.mean) + "," + format_double(e.cv.std) + "," +
           format_double(e.cv.train_mean) + "," + format_double(e.cv.gap()) + "," + (cont ? "1" : "0") + "," +
           (e.algorithm == r.chosen ? "1" : "0") + "\n";
  }
  return out;
}

ml::Task resolve_task(Settings& s, const std::optional<std::string>& flag) {
  const auto t = s.get<std::string>("task", flag, "state3");
  try {
    return ml::task_from_string(t);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

int cmd_train(const Common& c, const TrainFlags& f) {
  Settings s = load_settings(c);
  const fs::path dir = c.dir;
  const ml::Task task = resolve_task(s, f.task);
  ml::PipelineOptions opt;
  opt.seed = resolve_seed(s, c, dir);
  opt.threads = resolve_threads(s, c);
  opt.tpe.budget = s.get<int>("tpe_budget", f.tpe_budget, opt.tpe.budget);
  if (opt.tpe.budget < opt.tpe.n_startup)
    throw UsageError("--tpe-budget must be at least " + std::to_string(opt.tpe.n_startup));
  opt.run_tpe = !s.flag("no_tpe", f.no_tpe);
  opt.run_rfecv = !s.flag("no_rfecv", f.no_rfecv);
  const auto fam = s.get<std::vector<std::string>>(
      "families", f.families.empty() ? std::nullopt : std::optional(f.families), {});
  if (!fam.empty()) opt.families = parse_families(fam);
  labeling::GroupingOptions grouping{s.flag("rest_as_neutral", f.rest_as_neutral)};
  const auto fixed = threshold_override(s, f.upper, f.lower);

  const auto run = ml::run_full(load_features(dir), load_time_errors(dir), task, opt, grouping, fixed);
  ml::ModelArtifact art = run.result.artifact;
  art.metrics["thresholds"] = thresholds_json(run.thresholds);
  art.metrics["rest_as_neutral"] = grouping.rest_as_neutral;

  const std::string t = ml::to_string(task);
  write_text(dir / ("model_" + t + ".json"), ml::artifact_to_json(art).dump(2) + "\n");
  write_text(dir / ("report_" + t + ".csv"), ml::stages_csv(run.result.stages));
  write_text(dir / ("confusion_" + t + ".csv"), ml::confusion_csv(run.result.test_report));
  write_text(dir / ("selection_" + t + ".csv"), selection_csv(run.result.selection));
  write_text(dir / ("learning_curve_" + t + ".csv"), curve_csv(run.result.curve));
  write_text(dir / ("split_" + t + ".json"), ml::plan_to_json(run.result.plan).dump(2) + "\n");
  json metrics = ml::report_to_json(run.result.test_report);
  metrics["dropped_features"] = run.result.dropped_features;
  metrics["selected_features"] = art.selected_features;
  write_text(dir / ("metrics_" + t + ".json"), metrics.dump(2) + "\n");
  record_stage(dir, "train_" + t, s,
               {"model_" + t + ".json", "report_" + t + ".csv", "confusion_" + t + ".csv", "selection_" + t + ".csv",
                "learning_curve_" + t + ".csv", "split_" + t + ".json", "metrics_" + t + ".json"});
  std::cout << ml::stages_csv(run.result.stages);
  return 0;
}

/// Labeled task rows using the thresholds and grouping stored with a model.
ml::Dataset dataset_for(const fs::path& dir, const ml::ModelArtifact& art) {
  if (!art.metrics.contains("thresholds")) throw FormatError("model has no stored thresholds");
  const auto th = thresholds_from_json(art.metrics["thresholds"]);
  labeling::GroupingOptions grouping{art.metrics.value("rest_as_neutral", false)};
  const auto labeled = labeling::assign_labels(load_features(dir), load_time_errors(dir), th, grouping);
  return ml::make_task_dataset(labeled, art.task);
}

std::vector<std::string> stored_test_subjects(const ml::ModelArtifact& art) {
  if (!art.metrics.contains("test_subjects")) throw FormatError("model has no stored test subjects");
  return art.metrics["test_subjects"].get<std::vector<std::string>>();
}

fs::path model_path(const fs::path& dir, ml::Task task, const std::optional<std::string>& given) {
  return given ? fs::path(*given) : dir / ("model_" + ml::to_string(task) + ".json");
}

int cmd_evaluate(const Common& c, const std::optional<std::string>& task_flag, const std::optional<std::string>& model) {
  Settings s = load_settings(c);
  const fs::path dir = c.dir;
  const ml::Task task = resolve_task(s, task_flag);
  const auto art = ml::load_artifact(model_path(dir, task, model).string());
  if (art.task != task) throw UsageError("model was trained for task " + ml::to_string(art.task));
  const ml::Dataset d = dataset_for(dir, art);
  const auto rows = d.rows_of(stored_test_subjects(art));
  if (rows.empty()) throw FormatError("no rows for the stored test subjects");
  const ml::Dataset test = d.subset(rows);
  const auto report = ml::evaluate(test.y, art.predict(test.X, test.feature_names), d.n_classes(), d.class_names);
  const std::string t = ml::to_string(task);
  json j = ml::report_to_json(report);
  j["score"] = ml::task_score(report);
  write_text(dir / ("evaluation_" + t + ".json"), j.dump(2) + "\n");
  write_text(dir / ("evaluation_confusion_" + t + ".csv"), ml::confusion_csv(report));
  record_stage(dir, "evaluate_" + t, s, {"evaluation_" + t + ".json", "evaluation_confusion_" + t + ".csv"});
  std::cout << "test score (" << (task == ml::Task::Potp2 ? "F1 of Faster" : "weighted F1")
            << "): " << format_double(ml::task_score(report)) << "\n";
  return 0;
}

int cmd_explain(const Common& c, const std::optional<std::string>& task_flag, const std::optional<std::string>& model,
                std::optional<int> samples_flag, std::optional<int> rows_flag, std::optional<int> bg_flag) {
  Settings s = load_settings(c);
  const fs::path dir = c.dir;
  const ml::Task task = resolve_task(s, task_flag);
  const std::uint64_t seed = resolve_seed(s, c, dir);
  const int threads = resolve_threads(s, c);
  const int samples = s.get<int>("explain_samples", samples_flag, static_cast<int>(explain::kDefaultSamples));
  const int n_rows = s.get<int>("explain_rows", rows_flag, 50);
  const int n_bg = s.get<int>("explain_background", bg_flag, static_cast<int>(explain::kDefaultBackground));
  if (samples < 1) throw UsageError("--samples must be at least 1");
  if (n_rows < 1 || n_bg < 1) throw UsageError("--rows and --background must be at least 1");

  const auto art = ml::load_artifact(model_path(dir, task, model).string());
  const ml::Dataset d = dataset_for(dir, art);
  const auto test_subjects = stored_test_subjects(art);
  const std::set<std::string> test_set(test_subjects.begin(), test_subjects.end());
  std::vector<std::string> train_subjects;
  for (const auto& sub : d.subjects())
    if (!test_set.contains(sub)) train_subjects.push_back(sub);
  const ml::Dataset test = d.subset(d.rows_of(test_subjects));
  const ml::Dataset train = d.subset(d.rows_of(train_subjects));
  if (test.size() == 0 || train.size() == 0) throw FormatError("explain needs rows for both training and test subjects");

  const auto pick = explain::sample_background(test.size(), static_cast<std::size_t>(n_rows),
                                               derive_seed(seed, "explain-rows"));
  const ml::Matrix X = test.X.select_rows(pick);
  const auto attr = explain::explain_artifact(art, X, train.X, d.feature_names, static_cast<std::size_t>(samples),
                                              seed, threads, static_cast<std::size_t>(n_bg));
  explain::Attribution named = attr;
  for (std::size_t i = 0; i < pick.size(); ++i) {
    const auto& k = test.keys[pick[i]];
    named.row_ids[i] = k.subject_id + ":" + std::to_string(k.segment_index) + ":" + std::to_string(k.window_index);
  }
  const auto ranking = explain::rank_features(named);
  const std::string t = ml::to_string(task);
  write_text(dir / ("attributions_" + t + ".csv"), explain::attribution_csv(named));
  write_text(dir / ("ranking_" + t + ".csv"), explain::ranking_csv(ranking, named.class_names));
  record_stage(dir, "explain_" + t, s, {"attributions_" + t + ".csv", "ranking_" + t + ".csv"});
  for (std::size_t i = 0; i < std::min<std::size_t>(5, ranking.size()); ++i)
    std::cout << i + 1 << ". " << ranking[i].feature << " " << format_double(ranking[i].mean_abs) << "\n";
  return 0;
}

int cmd_report(const Common& c) {
  Settings s = load_settings(c);
  const fs::path dir = c.dir;
  const fs::path out = dir / "report";
  std::vector<std::string> outputs;
  auto copy_if = [&](const std::string& from, const std::string& to) {
    if (!fs::exists(dir / from)) return;
    write_text(out / to, detail::read_text_file(dir / from));
    outputs.push_back("report/" + to);
  };

  // Mean t_rel per segment class, for a bar chart.
  std::map<std::string, std::vector<double>> by;
  for (const auto& ses : load_headers(dir))
    for (const auto& sg : ses.segments)
      if (sg.t_perceived)
        by[std::string(to_string(sg.klass))].push_back(labeling::compute_t_rel(sg.t_correct(), *sg.t_perceived));
  std::string bars = "class,n,mean_t_rel,sd_t_rel\n";
  for (const auto& [k, v] : by)
    bars += k + "," + std::to_string(v.size()) + "," + format_double(mean(v)) + "," +
            format_double(v.size() > 1 ? stddev(v, 1) : kNaN) + "\n";
  write_text(out / "t_rel_by_class.csv", bars);
  outputs.push_back("report/t_rel_by_class.csv");

  copy_if("group_tests.csv", "group_tests.csv");
  copy_if("t_rel_histogram.csv", "t_rel_histogram.csv");
  copy_if("vass_correlation.csv", "vass_correlation.csv");
  for (const std::string& t : {std::string("state3"), std::string("potp2")}) {
    copy_if("report_" + t + ".csv", "optimisation_steps_" + t + ".csv");
    copy_if("confusion_" + t + ".csv", "confusion_" + t + ".csv");
    copy_if("learning_curve_" + t + ".csv", "learning_curve_" + t + ".csv");
    copy_if("ranking_" + t + ".csv", "feature_ranking_" + t + ".csv");
  }
  std::string index;
  for (const auto& o : outputs) index += o + "\n";
  write_text(out / "index.txt", index);
  outputs.push_back("report/index.txt");
  record_stage(dir, "report", s, outputs);
  std::cout << "wrote " << outputs.size() << " report files to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-perception biomarker pipeline: synthetic cohorts, features, labels, models."};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--config", c.config_path, "JSON config; flags take precedence")->check(CLI::ExistingFile);
  app.add_option("--threads", c.threads, "worker threads (results do not depend on it)");

  auto add_run_dir = [&](CLI::App* sub, const char* name, const char* help) {
    sub->add_option(name, c.dir, help)->required();
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", c.seed, "master seed"); };

  std::string scenario;
  std::optional<int> subjects;
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic cohort");
  synth->add_option("--scenario", scenario, "paper_like, separable or null")
      ->check(CLI::IsMember({"paper_like", "separable", "null"}));
  synth->add_option("--subjects", subjects, "number of subjects (default 18)");
  add_seed(synth);
  add_run_dir(synth, "--out", "run directory");

  std::string src;
  auto* ingest = app.add_subcommand("ingest", "validate session manifests and copy them into a run directory");
  ingest->add_option("--from", src, "directory searched for manifest.json files")->required();
  add_run_dir(ingest, "--out", "run directory");

  std::optional<double> window;
  std::vector<std::string> drop_groups;
  auto* feats = app.add_subcommand("features", "extract the biomarker matrix");
  add_run_dir(feats, "--in", "run directory");
  feats->add_option("--window", window, "window length in seconds (default 45)");
  feats->add_option("--drop-group", drop_groups, "feature groups to leave out (SKT, EDA, RSP, ECG, PPG)");

  bool list = false;
  auto* reg = app.add_subcommand("registry", "show the feature registry");
  reg->add_flag("--list", list, "print every feature");

  bool rest_as_neutral = false;
  std::optional<double> upper, lower;
  auto add_thresholds = [&](CLI::App* sub) {
    sub->add_flag("--rest-as-neutral", rest_as_neutral, "count rest segments 6 and 9 as Neutral");
    sub->add_option("--upper", upper, "fixed upper t_rel threshold (needs --lower)");
    sub->add_option("--lower", lower, "fixed lower t_rel threshold (needs --upper)");
  };
  auto* label = app.add_subcommand("label", "fit thresholds and label every window");
  add_run_dir(label, "--in", "run directory");
  add_seed(label);
  add_thresholds(label);

  auto* stats = app.add_subcommand("stats", "group t-tests, t_rel histogram and stress correlations");
  add_run_dir(stats, "--in", "run directory");
  stats->add_flag("--rest-as-neutral", rest_as_neutral, "count rest segments 6 and 9 as Neutral");

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "model selection, tuning, feature elimination and test evaluation");
  add_run_dir(train, "--in", "run directory");
  add_seed(train);
  train->add_option("--task", tf.task, "state3 or potp2")->check(CLI::IsMember({"state3", "potp2"}));
  train->add_option("--tpe-budget", tf.tpe_budget, "trials per tuning stage (default 30)");
  train->add_flag("--no-tpe", tf.no_tpe, "skip hyperparameter tuning");
  train->add_flag("--no-rfecv", tf.no_rfecv, "skip feature elimination");
  train->add_option("--families", tf.families, "model families to consider");
  add_thresholds(train);

  std::optional<std::string> task, model;
  auto* eval = app.add_subcommand("evaluate", "score a saved model on its held-out subjects");
  add_run_dir(eval, "--in", "run directory");
  eval->add_option("--task", task, "state3 or potp2")->check(CLI::IsMember({"state3", "potp2"}));
  eval->add_option("--model", model, "model file (default: the run's model for the task)");

  std::optional<int> samples, rows, background;
  auto* expl = app.add_subcommand("explain", "sampled Shapley attributions on held-out windows");
  add_run_dir(expl, "--in", "run directory");
  add_seed(expl);
  expl->add_option("--task", task, "state3 or potp2")->check(CLI::IsMember({"state3", "potp2"}));
  expl->add_option("--model", model, "model file (default: the run's model for the task)");
  expl->add_option("--samples", samples, "permutations per row (default 2000)");
  expl->add_option("--rows", rows, "held-out windows to explain (default 50)");
  expl->add_option("--background", background, "background rows (default 100)");

  auto* report = app.add_subcommand("report", "collect plot-ready CSVs under <run>/report");
  add_run_dir(report, "--in", "run directory");

  if (argc <= 1) {
    std::cout << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) return cmd_synth(c, scenario, subjects);
    if (*ingest) return cmd_ingest(c, src);
    if (*feats) return cmd_features(c, window, drop_groups);
    if (*reg) {
      if (list) std::cout << features::registry_report();
      else std::cout << features::feature_registry().size() << " features; use --list to print them\n";
      return 0;
    }
    if (*label) return cmd_label(c, rest_as_neutral, upper, lower);
    if (*stats) return cmd_stats(c, rest_as_neutral);
    if (*train) {
      tf.rest_as_neutral = rest_as_neutral, tf.upper = upper, tf.lower = lower;
      return cmd_train(c, tf);
    }
    if (*eval) return cmd_evaluate(c, task, model);
    if (*expl) return cmd_explain(c, task, model, samples, rows, background);
    if (*report) return cmd_report(c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
