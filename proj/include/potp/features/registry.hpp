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

#ifndef POTP_FEATURES_REGISTRY_HPP_
#define POTP_FEATURES_REGISTRY_HPP_

#include <string>
#include <vector>

namespace potp::features {

struct FeatureInfo {
  std::string name;
  std::string group;  // SKT, EDA, RSP, ECG, PPG
  std::string units;
  std::string symbol;  // biomarker symbol as usually written in the literature
};

namespace detail {

inline void add_ensemble(std::vector<FeatureInfo>& out, const std::string& group,
                         const std::string& prefix, const std::string& units,
                         const std::string& symbol) {
  for (const char* stat : {"mean", "median", "std"})
    out.push_back({prefix + "_" + stat, group, units, symbol + " (" + stat + ")"});
}

inline std::vector<FeatureInfo> build_registry() {
  std::vector<FeatureInfo> r;
  r.push_back({"SKT_gradient", "SKT", "degC/s", "SKT_gradient"});
  r.push_back({"SKT_power", "SKT", "degC^2", "SKT_power"});

  r.push_back({"SCL_gradient", "EDA", "uS/s", "SCL_gradient"});
  r.push_back({"SCL_mean", "EDA", "uS", "SCL_mean"});
  r.push_back({"SCR_power", "EDA", "uS^2", "SCR_power"});

  add_ensemble(r, "RSP", "RSP_Rate", "1/min", "RSP_Rate");
  add_ensemble(r, "RSP", "RSP_Prd", "s", "RSP_Prd");
  add_ensemble(r, "RSP", "RSP_InspTime", "s", "InspTime");
  add_ensemble(r, "RSP", "RSP_ExpTime", "s", "ExpTime");
  for (int k = 1; k <= 4; ++k)
    r.push_back({"RSP_PSD_" + std::to_string(k), "RSP", "a.u.^2", "RSP_PSD_" + std::to_string(k)});
  for (int k = 1; k <= 4; ++k)
    r.push_back({"RSP_nPSD_" + std::to_string(k), "RSP", "1", "RSP_nPSD_" + std::to_string(k)});
  for (int k = 1; k <= 5; ++k)
    r.push_back({"RSP_pBF_" + std::to_string(k), "RSP", "1", "RSP_pBF_" + std::to_string(k)});
  r.push_back({"RSP_F1pond", "RSP", "Hz", "RSP_F1pond"});
  r.push_back({"RSP_Pk", "RSP", "Hz", "RSP_Pk"});
  r.push_back({"RSP_power", "RSP", "a.u.^2", "RSP_power"});

  r.push_back({"ECG_RR_mean", "ECG", "s", "ECG_RR_mean"});
  r.push_back({"ECG_RR_median", "ECG", "s", "ECG_RR_median"});
  r.push_back({"ECG_RR_SDNN", "ECG", "s", "ECG_RR_SDNN"});
  r.push_back({"ECG_RR_nVLF", "ECG", "1", "ECG_RR_nVLF"});
  r.push_back({"ECG_RR_nLF", "ECG", "1", "ECG_RR_nLF"});
  r.push_back({"ECG_RR_nHF", "ECG", "1", "ECG_RR_nHF"});
  r.push_back({"ECG_RR_T", "ECG", "s", "ECG_RR_T"});
  r.push_back({"ECG_RR_L", "ECG", "s", "ECG_RR_L"});
  r.push_back({"ECG_RR_CSI", "ECG", "1", "ECG_RR_CSI"});
  r.push_back({"ECG_RR_CSI_modified", "ECG", "s", "ECG_RR_CSI_modified"});

  add_ensemble(r, "PPG", "PPG_PP", "s", "PPG_PP");
  add_ensemble(r, "PPG", "PPG_PRT", "s", "PPG_PRT");
  add_ensemble(r, "PPG", "PPG_PDT", "s", "PPG_PDT");
  add_ensemble(r, "PPG", "PPG_PW", "s", "PPG_PW");
  r.push_back({"PPG_PP_nVLF", "PPG", "1", "PPG_PP_nVLF"});
  r.push_back({"PPG_PP_nLF", "PPG", "1", "PPG_PP_nLF"});
  r.push_back({"PPG_PP_nHF", "PPG", "1", "PPG_PP_nHF"});
  return r;
}

}  // namespace detail

/// The fixed feature catalogue, in column order.
inline const std::vector<FeatureInfo>& feature_registry() {
  static const std::vector<FeatureInfo> registry = detail::build_registry();
  return registry;
}

inline std::vector<std::string> feature_names() {
  std::vector<std::string> names;
  for (const auto& f : feature_registry()) names.push_back(f.name);
  return names;
}

/// Tab-separated self-report: name, group, units, symbol. Last line is the count.
inline std::string registry_report() {
  std::string out = "name\tgroup\tunits\tsymbol\n";
  for (const auto& f : feature_registry())
    out += f.name + "\t" + f.group + "\t" + f.units + "\t" + f.symbol + "\n";
  out += "# " + std::to_string(feature_registry().size()) + " features\n";
  return out;
}

}  // namespace potp::features

#endif  // POTP_FEATURES_REGISTRY_HPP_
