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

#ifndef POTP_ML_MODELS_FACTORY_HPP_
#define POTP_ML_MODELS_FACTORY_HPP_

#include <memory>

#include "potp/ml/models/classifier.hpp"
#include "potp/ml/models/gnb.hpp"
#include "potp/ml/models/knn.hpp"
#include "potp/ml/models/lda.hpp"
#include "potp/ml/models/logreg.hpp"
#include "potp/ml/models/svm.hpp"
#include "potp/ml/models/tree.hpp"
#include "potp/ml/models/xgb.hpp"

namespace potp::ml {

inline std::unique_ptr<Classifier> make_classifier(Algorithm a, const Hyperparams& hp = {}) {
  switch (a) {
    case Algorithm::LogReg: return std::make_unique<LogReg>(hp);
    case Algorithm::DTC: return std::make_unique<Dtc>(hp);
    case Algorithm::KNN: return std::make_unique<Knn>(hp);
    case Algorithm::LDA: return std::make_unique<Lda>(hp);
    case Algorithm::GNB: return std::make_unique<Gnb>(hp);
    case Algorithm::SVM: return std::make_unique<Svm>(hp);
    case Algorithm::RF: return std::make_unique<Rf>(hp);
    case Algorithm::XGB: return std::make_unique<Xgb>(hp);
  }
  throw InvalidArgument("unknown algorithm");
}

inline SearchSpace search_space(Algorithm a) {
  switch (a) {
    case Algorithm::LogReg: return LogReg::search_space();
    case Algorithm::DTC: return Dtc::search_space();
    case Algorithm::KNN: return Knn::search_space();
    case Algorithm::LDA: return Lda::search_space();
    case Algorithm::GNB: return Gnb::search_space();
    case Algorithm::SVM: return Svm::search_space();
    case Algorithm::RF: return Rf::search_space();
    case Algorithm::XGB: return Xgb::search_space();
  }
  return {};
}

/// Whether the family has its own importance; the others borrow one from a
/// random-forest surrogate during feature elimination.
inline bool has_native_importance(Algorithm a) {
  return a == Algorithm::LogReg || a == Algorithm::DTC || a == Algorithm::LDA || a == Algorithm::RF ||
         a == Algorithm::XGB;
}

}  // namespace potp::ml

#endif  // POTP_ML_MODELS_FACTORY_HPP_
