// Copyright 2026 The cascade-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cascade/scenario.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "cascade/error.h"

namespace cascade {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Typed, path-aware access to one JSON object. Every key read is recorded so
// that finish() can reject the rest as unknown.
class Reader {
 public:
  Reader(const json& node, std::string path)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      throw ConfigError("scenario: '" + display() + "' must be an object");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(node_.at(key), join(path_, key));
  }

  int64_t integer(const std::string& key, int64_t fallback) {
    if (!has(key)) return fallback;
    return as_integer(node_.at(key), join(path_, key));
  }

  int small_int(const std::string& key, int fallback) {
    const int64_t v = integer(key, fallback);
    if (v < std::numeric_limits<int>::min() ||
        v > std::numeric_limits<int>::max()) {
      throw ConfigError("scenario: field '" + join(path_, key) +
                        "' is out of range");
    }
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) {
      throw ConfigError("scenario: field '" + join(path_, key) +
                        "' must be a boolean");
    }
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) {
      throw ConfigError("scenario: field '" + join(path_, key) +
                        "' must be a string");
    }
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key,
                              std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = array(key);
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_number(v[i], join(path_, key) + "." + std::to_string(i)));
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key,
                                   std::vector<std::string> fallback) {
    if (!has(key)) return fallback;
    const json& v = array(key);
    std::vector<std::string> out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) {
        throw ConfigError("scenario: field '" + join(path_, key) + "." +
                          std::to_string(i) + "' must be a string");
      }
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  const json& array(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) {
      throw ConfigError("scenario: missing required field '" +
                        join(path_, key) + "'");
    }
    const json& v = node_.at(key);
    if (!v.is_array()) {
      throw ConfigError("scenario: field '" + join(path_, key) +
                        "' must be an array");
    }
    return v;
  }

  Reader object(const std::string& key) {
    seen_.insert(key);
    return Reader(node_.at(key), join(path_, key));
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError("scenario: unknown field '" +
                          join(path_, item.key()) + "'");
      }
    }
  }

  const std::string& path() const { return path_; }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) {
      throw ConfigError("scenario: field '" + where + "' must be a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      throw ConfigError("scenario: field '" + where + "' must be finite");
    }
    return d;
  }

  static int64_t as_integer(const json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) {
        return static_cast<int64_t>(d);
      }
    }
    throw ConfigError("scenario: field '" + where + "' must be an integer");
  }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError("scenario: field '" + path + "' " + what);
}

std::vector<StageConfig> parse_stages(Reader& root) {
  if (!root.has("stages")) {
    throw ConfigError("scenario: missing required field 'stages'");
  }
  const json& arr = root.array("stages");
  require(!arr.empty(), "stages", "must not be empty");
  std::vector<StageConfig> stages;
  for (size_t i = 0; i < arr.size(); ++i) {
    Reader r(arr[i], "stages." + std::to_string(i));
    StageConfig s;
    s.stage_index = r.small_int("index", static_cast<int>(i) + 1);
    s.fixed = r.boolean("fixed", false);
    const json& models = r.array("models");
    for (size_t m = 0; m < models.size(); ++m) {
      Reader mr(models[m], r.path() + ".models." + std::to_string(m));
      ModelInstance model;
      model.id = mr.string("id", "");
      require(!model.id.empty(), mr.path() + ".id", "is required");
      model.stage_index = s.stage_index;
      require(mr.has("flops_per_item"), mr.path() + ".flops_per_item",
              "is required");
      model.flops_per_item = mr.number("flops_per_item", 0.0);
      model.quality = mr.number("quality", 0.0);
      mr.finish();
      s.models.push_back(model);
    }
    const json& scales = r.array("scales");
    for (size_t k = 0; k < scales.size(); ++k) {
      s.scales.push_back(Reader::as_integer(
          scales[k], r.path() + ".scales." + std::to_string(k)));
    }
    r.finish();
    stages.push_back(std::move(s));
  }
  // Cross-stage invariants (index order, increasing scales, unique model ids)
  // are enforced by the cascade itself.
  (void)CascadeConfig(stages);
  return stages;
}

void parse_population(Reader r, PopulationConfig& p) {
  p.affinity_models = r.strings("affinity_models", p.affinity_models);
  p.affinity_ratios = r.numbers("affinity_ratios", p.affinity_ratios);
  const std::vector<double> act = r.numbers(
      "activity_ratios", {p.activity_ratios.begin(), p.activity_ratios.end()});
  require(act.size() == 3, r.path() + ".activity_ratios",
          "must have 3 entries (low, mid, high)");
  std::copy(act.begin(), act.end(), p.activity_ratios.begin());
  static const char* kLevels[3] = {"low", "mid", "high"};
  if (r.has("activity")) {
    Reader a = r.object("activity");
    for (int l = 0; l < 3; ++l) {
      if (!a.has(kLevels[l])) continue;
      Reader lr = a.object(kLevels[l]);
      ActivityProfile& prof = p.activity[l];
      prof.alpha_lo = lr.number("alpha_lo", prof.alpha_lo);
      prof.alpha_hi = lr.number("alpha_hi", prof.alpha_hi);
      prof.beta_lo = lr.number("beta_lo", prof.beta_lo);
      prof.beta_hi = lr.number("beta_hi", prof.beta_hi);
      lr.finish();
    }
    a.finish();
  }
  p.suited_affinity = r.number("suited_affinity", p.suited_affinity);
  p.unsuited_affinity = r.number("unsuited_affinity", p.unsuited_affinity);
  p.indifferent_affinity =
      r.number("indifferent_affinity", p.indifferent_affinity);
  p.feature_noise = r.number("feature_noise", p.feature_noise);
  p.feature_dim = r.small_int("feature_dim", p.feature_dim);
  for (double g : {p.suited_affinity, p.unsuited_affinity,
                   p.indifferent_affinity}) {
    require(g > 0.0 && g <= 1.0, r.path(), "affinities must lie in (0, 1]");
  }
  require(p.feature_noise >= 0.0, r.path() + ".feature_noise", "must be >= 0");
  r.finish();
}

void parse_workload(Reader r, WorkloadConfig& w) {
  w.periods = r.small_int("periods", w.periods);
  require(w.periods >= 1, r.path() + ".periods", "must be >= 1");
  if (r.has("arrivals")) {
    const json& v = r.raw("arrivals");
    w.arrivals.clear();
    if (v.is_array()) {
      for (size_t i = 0; i < v.size(); ++i) {
        w.arrivals.push_back(static_cast<int>(Reader::as_integer(
            v[i], r.path() + ".arrivals." + std::to_string(i))));
      }
    } else {
      w.arrivals.push_back(
          static_cast<int>(Reader::as_integer(v, r.path() + ".arrivals")));
    }
    require(!w.arrivals.empty(), r.path() + ".arrivals", "must not be empty");
    require(w.arrivals.size() == 1 ||
                w.arrivals.size() == static_cast<size_t>(w.periods),
            r.path() + ".arrivals", "must be one value or one per period");
    for (int a : w.arrivals) {
      require(a >= 0, r.path() + ".arrivals", "must be >= 0");
    }
  }
  w.population_size = r.small_int("population_size", w.population_size);
  require(w.population_size >= 1, r.path() + ".population_size",
          "must be >= 1");
  w.train_population_size =
      r.small_int("train_population_size", w.train_population_size);
  require(w.train_population_size >= 1, r.path() + ".train_population_size",
          "must be >= 1");
  w.samples_per_user = r.small_int("samples_per_user", w.samples_per_user);
  require(w.samples_per_user >= 1, r.path() + ".samples_per_user",
          "must be >= 1");
  w.eval_samples_per_user =
      r.small_int("eval_samples_per_user", w.eval_samples_per_user);
  require(w.eval_samples_per_user >= 1, r.path() + ".eval_samples_per_user",
          "must be >= 1");
  w.label_noise = r.number("label_noise", w.label_noise);
  require(w.label_noise >= 0.0, r.path() + ".label_noise", "must be >= 0");
  if (r.has("population")) parse_population(r.object("population"), w.population);
  r.finish();
}

void parse_reward(Reader r, RewardConfig& c) {
  c.hidden_dim = r.small_int("hidden_dim", c.hidden_dim);
  c.fnn_width = r.small_int("fnn_width", c.fnn_width);
  c.embed_dim = r.small_int("embed_dim", c.embed_dim);
  c.groups = r.small_int("groups", c.groups);
  c.recursive = r.boolean("recursive", c.recursive);
  c.multi_basis = r.boolean("multi_basis", c.multi_basis);
  c.init_range = r.number("init_range", c.init_range);
  require(c.hidden_dim >= 1, r.path() + ".hidden_dim", "must be >= 1");
  require(c.fnn_width >= 1 && c.fnn_width <= 256, r.path() + ".fnn_width",
          "must be in [1, 256]");
  require(c.embed_dim >= 1, r.path() + ".embed_dim", "must be >= 1");
  require(c.groups >= 1, r.path() + ".groups", "must be >= 1");
  require(c.init_range > 0.0, r.path() + ".init_range", "must be > 0");
  r.finish();
}

void parse_train(Reader r, TrainConfig& c) {
  c.epochs = r.small_int("epochs", c.epochs);
  c.batch_size = r.small_int("batch_size", c.batch_size);
  c.learning_rate = r.number("learning_rate", c.learning_rate);
  c.final_lr_ratio = r.number("final_lr_ratio", c.final_lr_ratio);
  c.optimizer = r.string("optimizer", c.optimizer);
  require(c.epochs >= 0, r.path() + ".epochs", "must be >= 0");
  require(c.batch_size >= 1, r.path() + ".batch_size", "must be >= 1");
  require(c.learning_rate > 0.0, r.path() + ".learning_rate", "must be > 0");
  require(c.final_lr_ratio > 0.0 && c.final_lr_ratio <= 1.0,
          r.path() + ".final_lr_ratio", "must be in (0, 1]");
  require(c.optimizer == "sgd" || c.optimizer == "adam",
          r.path() + ".optimizer", "must be \"sgd\" or \"adam\"");
  r.finish();
}

void parse_allocator(Reader r, AllocatorConfig& c) {
  c.budget = r.number("budget", c.budget);
  require(c.budget >= 0.0, r.path() + ".budget", "must be >= 0");
  c.iterations = r.small_int("iterations", c.iterations);
  require(c.iterations >= 1, r.path() + ".iterations", "must be >= 1");
  c.eta0 = r.number("eta0", c.eta0);
  require(c.eta0 > 0.0, r.path() + ".eta0", "must be > 0");
  if (r.has("lambda_init")) {
    const json& v = r.raw("lambda_init");
    if (v.is_string()) {
      require(v.get<std::string>() == "auto", r.path() + ".lambda_init",
              "must be a number >= 0 or \"auto\"");
      c.lambda_auto = true;
    } else {
      c.lambda_init = Reader::as_number(v, r.path() + ".lambda_init");
      require(c.lambda_init >= 0.0, r.path() + ".lambda_init", "must be >= 0");
      c.lambda_auto = false;
    }
  }
  c.warmup_iterations = r.small_int("warmup_iterations", c.warmup_iterations);
  require(c.warmup_iterations >= 1, r.path() + ".warmup_iterations",
          "must be >= 1");
  c.ticks_per_period = r.small_int("ticks_per_period", c.ticks_per_period);
  require(c.ticks_per_period >= 1, r.path() + ".ticks_per_period",
          "must be >= 1");
  c.threads = r.small_int("threads", c.threads);
  require(c.threads >= 1, r.path() + ".threads", "must be >= 1");
  r.finish();
}

void parse_hardware(Reader r, HardwareProfile& h) {
  h.pue = r.number("pue", h.pue);
  h.carbon_intensity =
      r.number("carbon_intensity_g_per_kwh", h.carbon_intensity);
  if (r.has("devices")) {
    const json& arr = r.array("devices");
    h.devices.clear();
    for (size_t i = 0; i < arr.size(); ++i) {
      Reader d(arr[i], r.path() + ".devices." + std::to_string(i));
      Device dev;
      dev.name = d.string("name", "");
      require(!dev.name.empty(), d.path() + ".name", "is required");
      dev.rated_power_watts = d.number("rated_power_watts", 0.0);
      dev.throughput_flops_per_second =
          d.number("throughput_flops_per_second", 0.0);
      dev.share = d.number("share", 0.0);
      dev.follows = d.string("follows", "");
      d.finish();
      h.devices.push_back(dev);
    }
  }
  r.finish();
  h.validate();
}

}  // namespace

Scenario parse_scenario(const nlohmann::json& document) {
  Reader root(document, "");
  Scenario s;
  s.stages = parse_stages(root);
  const int64_t seed = root.integer("seed", static_cast<int64_t>(s.seed));
  require(seed >= 0, "seed", "must be >= 0");
  s.seed = static_cast<uint64_t>(seed);
  s.output = root.string("output", s.output);
  s.top_e = root.number("top_e", s.top_e);
  require(s.top_e >= 1.0, "top_e", "must be >= 1");
  if (root.has("workload")) parse_workload(root.object("workload"), s.workload);
  if (root.has("reward")) parse_reward(root.object("reward"), s.reward);
  s.reward.feature_dim = s.workload.population.feature_dim;
  if (root.has("train")) parse_train(root.object("train"), s.train);
  if (root.has("allocator")) {
    parse_allocator(root.object("allocator"), s.allocator);
  }
  if (root.has("baselines")) {
    Reader b = root.object("baselines");
    s.baselines.equal_chain = b.string("equal_chain", "");
    s.baselines.cras_models = b.strings("cras_models", {});
    b.finish();
  }
  if (root.has("sweep")) {
    Reader w = root.object("sweep");
    s.sweep.equal_chains = w.strings("equal_chains", {});
    w.finish();
  }
  if (root.has("hardware")) parse_hardware(root.object("hardware"), s.hardware);
  root.finish();
  return s;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void apply_override(nlohmann::json& document, const std::string& dotted_path,
                    const std::string& raw_value) {
  if (dotted_path.empty()) throw ConfigError("override: empty field path");
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw_value);
  } catch (const nlohmann::json::parse_error&) {
    value = raw_value;
  }
  nlohmann::json* node = &document;
  std::stringstream parts(dotted_path);
  std::string part;
  std::vector<std::string> keys;
  while (std::getline(parts, part, '.')) keys.push_back(part);
  for (size_t i = 0; i < keys.size(); ++i) {
    const std::string& key = keys[i];
    if (key.empty()) {
      throw ConfigError("override: malformed field path '" + dotted_path + "'");
    }
    const bool last = i + 1 == keys.size();
    if (node->is_array()) {
      size_t idx = 0;
      try {
        size_t used = 0;
        idx = std::stoul(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw ConfigError("override: '" + key + "' in '" + dotted_path +
                          "' must index an array");
      }
      if (idx >= node->size()) {
        throw ConfigError("override: index " + key + " out of range in '" +
                          dotted_path + "'");
      }
      node = &(*node)[idx];
    } else if (node->is_object() || node->is_null()) {
      node = &(*node)[key];
    } else {
      throw ConfigError("override: '" + dotted_path + "' walks through a " +
                        "non-container value");
    }
    if (last) *node = value;
  }
}

Scenario load_scenario(const std::string& path,
                       const std::vector<std::string>& overrides) {
  nlohmann::json doc = read_json_file(path);
  for (const std::string& o : overrides) {
    const size_t eq = o.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + o + "' must look like path=value");
    }
    apply_override(doc, o.substr(0, eq), o.substr(eq + 1));
  }
  return parse_scenario(doc);
}

}  // namespace cascade
