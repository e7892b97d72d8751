#include "doa/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace doa {

namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + " must be an object");
  }

  ~Section() = default;
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& raw(const std::string& key) { return node_.at(key); }

  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    out = convert<T>(node_.at(key), child_path(key));
  }

  void read_doubles(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = node_.at(key);
    const std::string p = child_path(key);
    if (v.is_number()) {
      out = {v.get<double>()};
      return;
    }
    if (!v.is_array()) throw ConfigError(p + " must be a number or an array of numbers");
    out.clear();
    for (const auto& e : v) out.push_back(convert<double>(e, p + "[]"));
  }

  void read_strings(const std::string& key, std::vector<std::string>& out) {
    if (!has(key)) return;
    const json& v = node_.at(key);
    const std::string p = child_path(key);
    if (!v.is_array()) throw ConfigError(p + " must be an array of strings");
    out.clear();
    for (const auto& e : v) out.push_back(convert<std::string>(e, p + "[]"));
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + child_path(it.key()) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "configuration root" : path_; }

  template <typename T>
  static T convert(const json& v, const std::string& p) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(p + " must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(p + " must be a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) throw ConfigError(p + " must be a non-negative integer");
      return v.get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(p + " must be an integer");
      return v.get<T>();
    } else {
      if (!v.is_number()) throw ConfigError(p + " must be a number");
      return v.get<T>();
    }
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

SceneLayout read_layout(Section& parent, const std::string& key, SceneLayout layout) {
  if (!parent.has(key)) return layout;
  Section s(parent.raw(key), parent.child_path(key));
  s.read_doubles("angles_deg", layout.angles_deg);
  s.read("coherent", layout.coherent);
  s.finish();
  return layout;
}

json layout_json(const SceneLayout& l) {
  return {{"angles_deg", l.angles_deg}, {"coherent", l.coherent}};
}

const char* label_model_name(LabelModel m) {
  switch (m) {
    case LabelModel::Ideal: return "ideal";
    case LabelModel::Imperfect: return "imperfect";
    case LabelModel::Input: return "input";
  }
  return "ideal";
}

LabelModel label_model_from(const std::string& s) {
  if (s == "ideal") return LabelModel::Ideal;
  if (s == "imperfect") return LabelModel::Imperfect;
  if (s == "input") return LabelModel::Input;
  throw ConfigError("training.label_model must be one of ideal, imperfect, input");
}

}  // namespace

void RunConfig::set_seed(std::uint64_t master) {
  seed = master;
  training.seed = derive_seed(master, 1);
  experiment.seed = derive_seed(master, 2);
}

void RunConfig::validate() const {
  if (threads < 0) throw ConfigError("threads must be non-negative");
  try {
    array.validate();
    imperfections.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (imperfections.coupling != 0.0 || imperfections.gain != 0.0 ||
      imperfections.phase != 0.0 || imperfections.position != 0.0) {
    if (array.num_elements % 2 != 0) {
      throw ConfigError("the standard imperfection pattern needs an even element count");
    }
  }
  if (!(partition_min_deg < partition_max_deg) || partition_min_deg <= -90.0 ||
      partition_max_deg >= 90.0) {
    throw ConfigError("partition range must satisfy -90 < min_deg < max_deg < 90");
  }
  if (num_regions < 1) throw ConfigError("partition.regions must be positive");
  training.validate();
  scan.validate();
  experiment.validate();
  if (scene.angles_deg.empty()) throw ConfigError("scene.angles_deg must not be empty");
  if (scene.num_snapshots < 1) throw ConfigError("scene.num_snapshots must be positive");
  if (scene.paths && scene.paths->size() != scene.angles_deg.size()) {
    throw ConfigError("scene.paths must have one entry per source");
  }
  if (baseline.subarray_len < 2 || baseline.subarray_len > array.num_elements) {
    throw ConfigError("baseline.subarray_len must lie in [2, num_elements]");
  }
  if (!(baseline.grid_step_deg > 0.0) || !(baseline.grid_min_deg < baseline.grid_max_deg)) {
    throw ConfigError("baseline grid is empty");
  }
  for (const auto& e : estimators) {
    if (e != "ae" && e != "music" && e != "ssmusic") {
      throw ConfigError("unknown estimator '" + e + "' (expected ae, music, ssmusic)");
    }
  }
}

ArraySetup RunConfig::array_setup() const {
  ArraySetup s;
  s.config = array;
  s.weights = imperfections;
  if (imperfections.all_zero() && array.num_elements % 2 != 0) {
    const RVector zero = RVector::Zero(array.num_elements);
    s.model = ImperfectionModel::from_vectors(zero, zero, zero, CVector::Zero(array.num_elements));
  } else {
    s.model = ImperfectionModel::standard(array, gamma);
  }
  return s;
}

SubregionPartition RunConfig::partition() const {
  return SubregionPartition::build(partition_min_deg, partition_max_deg, num_regions);
}

NetworkSpec RunConfig::network_spec() const {
  return NetworkSpec::for_features(array.num_elements * (array.num_elements - 1), num_regions,
                                   activation);
}

std::vector<double> RunConfig::baseline_grid() const {
  try {
    return scan_grid(baseline.grid_min_deg, baseline.grid_max_deg, baseline.grid_step_deg);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("baseline grid: ") + e.what());
  }
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }

  RunConfig cfg;
  Section root(doc, "");
  root.read("seed", cfg.seed);
  root.read("deterministic", cfg.deterministic);
  root.read("threads", cfg.threads);
  root.read_strings("estimators", cfg.estimators);

  if (root.has("array")) {
    Section s(root.raw("array"), "array");
    s.read("num_elements", cfg.array.num_elements);
    s.read("spacing_over_wavelength", cfg.array.spacing_over_wavelength);
    if (s.has("coupling_gamma")) {
      Section g(s.raw("coupling_gamma"), "array.coupling_gamma");
      double mag = std::abs(cfg.gamma), phase = std::arg(cfg.gamma);
      g.read("magnitude", mag);
      g.read("phase_rad", phase);
      g.finish();
      cfg.gamma = std::polar(mag, phase);
    }
    s.finish();
  }
  if (root.has("imperfections")) {
    Section s(root.raw("imperfections"), "imperfections");
    s.read("gain", cfg.imperfections.gain);
    s.read("phase", cfg.imperfections.phase);
    s.read("position", cfg.imperfections.position);
    s.read("coupling", cfg.imperfections.coupling);
    s.finish();
  }
  if (root.has("partition")) {
    Section s(root.raw("partition"), "partition");
    s.read("min_deg", cfg.partition_min_deg);
    s.read("max_deg", cfg.partition_max_deg);
    s.read("regions", cfg.num_regions);
    s.finish();
  }
  if (root.has("network")) {
    Section s(root.raw("network"), "network");
    std::string act(to_string(cfg.activation));
    s.read("activation", act);
    try {
      cfg.activation = activation_from_string(act);
    } catch (const Error& e) {
      throw ConfigError(std::string("network.activation: ") + e.what());
    }
    s.finish();
  }
  if (root.has("training")) {
    Section s(root.raw("training"), "training");
    auto& t = cfg.training;
    s.read("num_samples", t.num_samples);
    s.read("num_snapshots", t.num_snapshots);
    s.read_doubles("snr_db", t.snr_db);
    s.read("batch_size", t.batch_size);
    s.read("epochs", t.epochs);
    s.read("learning_rate", t.learning_rate);
    s.read("rho", t.rho);
    s.read("epsilon", t.epsilon);
    s.read("normalize_features", t.normalize_features);
    std::string label = label_model_name(t.label_model);
    s.read("label_model", label);
    t.label_model = label_model_from(label);
    s.finish();
  }
  if (root.has("scan")) {
    Section s(root.raw("scan"), "scan");
    s.read("step_deg", cfg.scan.step_deg);
    s.read("threshold", cfg.scan.threshold);
    s.read("restrict_to_region", cfg.scan.restrict_to_region);
    std::string templates = cfg.scan.templates == TemplateModel::Ideal ? "ideal" : "imperfect";
    s.read("templates", templates);
    if (templates == "ideal") {
      cfg.scan.templates = TemplateModel::Ideal;
    } else if (templates == "imperfect") {
      cfg.scan.templates = TemplateModel::Imperfect;
    } else {
      throw ConfigError("scan.templates must be 'ideal' or 'imperfect'");
    }
    s.finish();
  }
  if (root.has("experiment")) {
    Section s(root.raw("experiment"), "experiment");
    auto& e = cfg.experiment;
    s.read_doubles("snr_db", e.snr_db);
    s.read("trials", e.trials);
    s.read("num_snapshots", e.num_snapshots);
    e.rmse_scene = read_layout(s, "rmse_scene", e.rmse_scene);
    e.detection_scene = read_layout(s, "detection_scene", e.detection_scene);
    s.read("detection_snr_db", e.detection_snr_db);
    s.read("tolerance_deg", e.tolerance_deg);
    s.finish();
  }
  if (root.has("scene")) {
    Section s(root.raw("scene"), "scene");
    auto& sc = cfg.scene;
    s.read_doubles("angles_deg", sc.angles_deg);
    s.read("coherent", sc.coherent);
    s.read("snr_db", sc.snr_db);
    s.read("num_snapshots", sc.num_snapshots);
    if (s.has("paths")) {
      const json& arr = s.raw("paths");
      if (!arr.is_array()) throw ConfigError("scene.paths must be an array");
      std::vector<CoherencePath> paths;
      for (const auto& item : arr) {
        Section p(item, "scene.paths[]");
        CoherencePath cp;
        p.read("amplitude", cp.amplitude);
        p.read("phase_rad", cp.phase);
        p.finish();
        paths.push_back(cp);
      }
      sc.paths = std::move(paths);
    }
    s.finish();
  }
  if (root.has("baseline")) {
    Section s(root.raw("baseline"), "baseline");
    s.read("subarray_len", cfg.baseline.subarray_len);
    s.read("grid_step_deg", cfg.baseline.grid_step_deg);
    s.read("grid_min_deg", cfg.baseline.grid_min_deg);
    s.read("grid_max_deg", cfg.baseline.grid_max_deg);
    s.read("log10_spectrum", cfg.baseline.log10_spectrum);
    s.finish();
  }
  if (root.has("paths")) {
    Section s(root.raw("paths"), "paths");
    std::string model = cfg.model_path.string();
    std::string dataset = cfg.dataset_path.string();
    std::string out = cfg.out_dir.string();
    s.read("model", model);
    s.read("dataset", dataset);
    s.read("out_dir", out);
    cfg.model_path = model;
    cfg.dataset_path = dataset;
    cfg.out_dir = out;
    s.finish();
  }
  root.finish();

  cfg.scan.normalize_features = cfg.training.normalize_features;
  cfg.set_seed(cfg.seed);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["deterministic"] = cfg.deterministic;
  j["threads"] = cfg.threads;
  j["estimators"] = cfg.estimators;
  j["array"] = {{"num_elements", cfg.array.num_elements},
                {"spacing_over_wavelength", cfg.array.spacing_over_wavelength},
                {"coupling_gamma",
                 {{"magnitude", std::abs(cfg.gamma)}, {"phase_rad", std::arg(cfg.gamma)}}}};
  j["imperfections"] = {{"gain", cfg.imperfections.gain},
                        {"phase", cfg.imperfections.phase},
                        {"position", cfg.imperfections.position},
                        {"coupling", cfg.imperfections.coupling}};
  j["partition"] = {{"min_deg", cfg.partition_min_deg},
                    {"max_deg", cfg.partition_max_deg},
                    {"regions", cfg.num_regions}};
  j["network"] = {{"activation", std::string(to_string(cfg.activation))}};
  const auto& t = cfg.training;
  j["training"] = {{"num_samples", t.num_samples},
                   {"num_snapshots", t.num_snapshots},
                   {"snr_db", t.snr_db},
                   {"batch_size", t.batch_size},
                   {"epochs", t.epochs},
                   {"learning_rate", t.learning_rate},
                   {"rho", t.rho},
                   {"epsilon", t.epsilon},
                   {"normalize_features", t.normalize_features},
                   {"label_model", label_model_name(t.label_model)}};
  j["scan"] = {{"step_deg", cfg.scan.step_deg},
               {"threshold", cfg.scan.threshold},
               {"restrict_to_region", cfg.scan.restrict_to_region},
               {"templates", cfg.scan.templates == TemplateModel::Ideal ? "ideal" : "imperfect"}};
  const auto& e = cfg.experiment;
  j["experiment"] = {{"snr_db", e.snr_db},
                     {"trials", e.trials},
                     {"num_snapshots", e.num_snapshots},
                     {"rmse_scene", layout_json(e.rmse_scene)},
                     {"detection_scene", layout_json(e.detection_scene)},
                     {"detection_snr_db", e.detection_snr_db},
                     {"tolerance_deg", e.tolerance_deg}};
  json scene = {{"angles_deg", cfg.scene.angles_deg},
                {"coherent", cfg.scene.coherent},
                {"snr_db", cfg.scene.snr_db},
                {"num_snapshots", cfg.scene.num_snapshots}};
  if (cfg.scene.paths) {
    json arr = json::array();
    for (const auto& p : *cfg.scene.paths) {
      arr.push_back({{"amplitude", p.amplitude}, {"phase_rad", p.phase}});
    }
    scene["paths"] = arr;
  }
  j["scene"] = scene;
  j["baseline"] = {{"subarray_len", cfg.baseline.subarray_len},
                   {"grid_step_deg", cfg.baseline.grid_step_deg},
                   {"grid_min_deg", cfg.baseline.grid_min_deg},
                   {"grid_max_deg", cfg.baseline.grid_max_deg},
                   {"log10_spectrum", cfg.baseline.log10_spectrum}};
  j["paths"] = {{"model", cfg.model_path.string()},
                {"dataset", cfg.dataset_path.string()},
                {"out_dir", cfg.out_dir.string()}};
  return j.dump(2) + "\n";
}

}  // namespace doa
