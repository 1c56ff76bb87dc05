#pragma once

#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ctails {

// One solver experiment, persisted as a JSON line.  Records are append-only
// and self-describing enough to recompute every downstream statistic.
struct ExperimentRecord {
  std::string instance_id;
  std::string solver = "sa";       // "sa" or "noisy_sa"
  std::string config_hash;
  double alpha = 1.0;
  double sigma = 0.0;
  int sweeps = 0;
  int gauge = 0;                   // 0 for plain SA
  int repetition = 0;
  long long samples = 0;
  long long ground_hits = 0;
  double p_hat = 0.0;
  double ns_per_sample = 0.0;
  std::string ground_method;       // exhaustive | column_dp | best_found
  std::uint64_t seed = 0;

  std::string key() const {
    return instance_id + "|" + config_hash + "|g" + std::to_string(gauge) + "r" +
           std::to_string(repetition);
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"instance", instance_id},
                          {"solver", solver},
                          {"config", config_hash},
                          {"alpha", alpha},
                          {"sigma", sigma},
                          {"sweeps", sweeps},
                          {"gauge", gauge},
                          {"rep", repetition},
                          {"samples", samples},
                          {"hits", ground_hits},
                          {"p_hat", p_hat},
                          {"ns_per_sample", ns_per_sample},
                          {"ground_method", ground_method},
                          {"seed", seed}};
  }

  static ExperimentRecord from_json(const nlohmann::json& j) {
    ExperimentRecord r;
    r.instance_id = j.at("instance").get<std::string>();
    r.solver = j.at("solver").get<std::string>();
    r.config_hash = j.at("config").get<std::string>();
    r.alpha = j.at("alpha").get<double>();
    r.sigma = j.at("sigma").get<double>();
    r.sweeps = j.at("sweeps").get<int>();
    r.gauge = j.at("gauge").get<int>();
    r.repetition = j.at("rep").get<int>();
    r.samples = j.at("samples").get<long long>();
    r.ground_hits = j.at("hits").get<long long>();
    r.p_hat = j.at("p_hat").get<double>();
    r.ns_per_sample = j.at("ns_per_sample").get<double>();
    r.ground_method = j.at("ground_method").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  }
};

inline void append_records(const std::vector<ExperimentRecord>& records,
                           const std::string& path) {
  std::ofstream os(path, std::ios::app);
  if (!os) throw std::runtime_error("append_records: cannot open " + path);
  for (const auto& r : records) os << r.to_json().dump() << "\n";
}

inline std::vector<ExperimentRecord> load_records(const std::string& path) {
  std::vector<ExperimentRecord> out;
  std::ifstream is(path);
  if (!is) return out;  // absent file: no records yet
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(ExperimentRecord::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace ctails
