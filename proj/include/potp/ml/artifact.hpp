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

#ifndef POTP_ML_ARTIFACT_HPP_
#define POTP_ML_ARTIFACT_HPP_

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "potp/core/feature_matrix.hpp"
#include "potp/error.hpp"
#include "potp/ml/dataset.hpp"
#include "potp/ml/models/factory.hpp"
#include "potp/ml/scaler.hpp"

namespace potp::ml {

inline constexpr const char* kArtifactFormat = "potp-model";
inline constexpr int kArtifactVersion = 1;

/// Everything needed to score new rows: the scaler over the retained
/// columns, the selected subset and the trained model.
struct ModelArtifact {
  Algorithm algorithm = Algorithm::LogReg;
  Hyperparams hyperparams;
  Task task = Task::State3;
  std::vector<std::string> class_names;
  ScalerStats scaler;  // columns in scaler.kept_names order
  std::vector<std::string> selected_features;
  std::uint64_t seed = 0;
  std::shared_ptr<const Classifier> model;
  nlohmann::json metrics = nlohmann::json::object();

  /// Scaled model inputs for rows whose columns are named by `names`.
  /// Extra columns are ignored; a missing column is an error.
  Matrix design(const Matrix& X, const std::vector<std::string>& names) const {
    std::vector<std::size_t> src;
    for (const auto& n : scaler.kept_names) {
      const auto it = std::find(names.begin(), names.end(), n);
      if (it == names.end()) throw InvalidArgument("input is missing feature column '" + n + "'");
      src.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    const Matrix Z = apply_scaler(X.select_cols(src), scaler);
    std::vector<std::size_t> sel;
    for (const auto& n : selected_features) {
      const auto it = std::find(scaler.kept_names.begin(), scaler.kept_names.end(), n);
      if (it == scaler.kept_names.end()) throw FormatError("selected feature '" + n + "' not in scaler");
      sel.push_back(static_cast<std::size_t>(it - scaler.kept_names.begin()));
    }
    return Z.select_cols(sel);
  }

  std::vector<int> predict(const Matrix& X, const std::vector<std::string>& names) const {
    return model->predict(design(X, names));
  }

  std::vector<std::vector<double>> predict_proba(const Matrix& X, const std::vector<std::string>& names) const {
    const Matrix Z = design(X, names);
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < Z.rows; ++i) out.push_back(model->predict_proba(Z.row(i)));
    return out;
  }

  std::vector<int> predict(const FeatureMatrix& m) const {
    return predict(Matrix::from_rows(m.rows), m.columns);
  }
};

inline nlohmann::json artifact_to_json(const ModelArtifact& a) {
  return {{"format", kArtifactFormat},
          {"version", kArtifactVersion},
          {"algorithm", to_string(a.algorithm)},
          {"hyperparameters", a.hyperparams},
          {"task", to_string(a.task)},
          {"class_names", a.class_names},
          {"scaler", scaler_to_json(a.scaler)},
          {"selected_features", a.selected_features},
          {"seed", a.seed},
          {"model", a.model->to_json()},
          {"metrics", a.metrics}};
}

inline ModelArtifact artifact_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kArtifactFormat) throw FormatError("not a model artifact");
    if (j.at("version").get<int>() != kArtifactVersion)
      throw FormatError("unsupported artifact version " + std::to_string(j.at("version").get<int>()));
    ModelArtifact a;
    a.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    a.hyperparams = j.at("hyperparameters").get<Hyperparams>();
    a.task = task_from_string(j.at("task").get<std::string>());
    a.class_names = j.at("class_names").get<std::vector<std::string>>();
    a.scaler = scaler_from_json(j.at("scaler"));
    a.selected_features = j.at("selected_features").get<std::vector<std::string>>();
    a.seed = j.at("seed").get<std::uint64_t>();
    auto m = make_classifier(a.algorithm, a.hyperparams);
    m->from_json(j.at("model"));
    if (m->n_features() != a.selected_features.size()) throw FormatError("model width differs from selected features");
    a.model = std::move(m);
    a.metrics = j.value("metrics", nlohmann::json::object());
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model artifact: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("malformed model artifact: ") + e.what());
  }
}

inline void save_artifact(const ModelArtifact& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << artifact_to_json(a).dump(1) << '\n';
}

inline ModelArtifact load_artifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return artifact_from_json(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace potp::ml

#endif  // POTP_ML_ARTIFACT_HPP_
