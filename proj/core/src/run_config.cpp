#include "fleetrisk/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fleetrisk/error.hpp"
#include "fleetrisk/schema_io.hpp"

namespace fleetrisk {
namespace {

namespace pt = boost::property_tree;

std::string join(const std::vector<std::size_t>& values, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double(values[i]);
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::vector<T> values;
  T v{};
  while (in >> v) values.push_back(v);
  if (!in.eof()) throw Error(ErrorKind::Config, "bad list for '" + key + "': '" + text + "'");
  return values;
}

// Reads section values onto typed fields while tracking which keys were
// consumed, so leftovers can be reported as unknown.
class SectionReader {
 public:
  SectionReader(const pt::ptree& tree, std::string section)
      : section_(std::move(section)) {
    if (const auto child = tree.get_child_optional(section_)) node_ = &*child;
  }

  template <typename T>
  void read(const std::string& key, T& field) {
    known_.insert(key);
    if (!node_) return;
    const auto value = node_->get_optional<std::string>(key);
    if (!value) return;
    field = convert<T>(*value, key);
  }

  void read_list(const std::string& key, std::vector<std::size_t>& field) {
    known_.insert(key);
    if (!node_) return;
    if (const auto value = node_->get_optional<std::string>(key)) {
      field = parse_list<std::size_t>(*value, qualified(key));
    }
  }

  void read_list(const std::string& key, std::vector<double>& field) {
    known_.insert(key);
    if (!node_) return;
    if (const auto value = node_->get_optional<std::string>(key)) {
      field = parse_list<double>(*value, qualified(key));
    }
  }

  void read_schedule(const std::string& key, std::vector<std::vector<std::size_t>>& field) {
    known_.insert(key);
    if (!node_) return;
    const auto value = node_->get_optional<std::string>(key);
    if (!value) return;
    field.clear();
    std::istringstream in(*value);
    std::string layer;
    while (std::getline(in, layer, ';')) field.push_back(parse_list<std::size_t>(layer, qualified(key)));
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, child] : *node_) {
      if (!known_.count(key)) throw Error(ErrorKind::Config, "unknown key '" + qualified(key) + "'");
    }
  }

 private:
  std::string qualified(const std::string& key) const { return section_ + "." + key; }

  template <typename T>
  T convert(const std::string& text, const std::string& key) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw Error(ErrorKind::Config, "'" + qualified(key) + "' expects true/false, got '" + text + "'");
    } else if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else {
      std::istringstream in(text);
      T value{};
      if (!(in >> value) || !(in >> std::ws).eof()) {
        throw Error(ErrorKind::Config, "cannot parse '" + qualified(key) + "' from '" + text + "'");
      }
      return value;
    }
  }

  std::string section_;
  const pt::ptree* node_ = nullptr;
  std::set<std::string> known_;
};

const char* bool_text(bool v) { return v ? "true" : "false"; }

void read_grid(SectionReader& reader, const std::string& prefix, ParameterGrid& grid) {
  for (auto& axis : grid) reader.read_list(prefix + "_" + axis.name, axis.values);
}

}  // namespace

RunConfig reference_run_config() {
  RunConfig config;
  config.generator = GeneratorConfig{};
  config.settings.seed = config.generator.seed;
  return config;
}

void validate(const RunConfig& config) {
  validate(config.generator);
  validate(config.settings.features);
  validate(config.settings.learners.hyper);
  validate(config.settings.twostep);
  validate(config.settings.jump);
  validate(config.settings.pseudolabel);
  if (!(config.phases.dev_fraction > 0.0 && config.phases.dev_fraction <= 1.0)) {
    throw Error(ErrorKind::Config, "phases.dev_fraction must lie in (0, 1]");
  }
  if (config.phases.dev_daily_quota < 1 || config.phases.final_quota < 1) {
    throw Error(ErrorKind::Config, "submission quotas must be positive");
  }
}

RunConfig parse_run_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  static const std::set<std::string> sections = {"generator", "features",    "learner",
                                                 "strategy",  "twostep",     "jump",
                                                 "pseudolabel", "calibration", "phases", "run"};
  for (const auto& [name, child] : tree) {
    if (!sections.count(name)) throw Error(ErrorKind::Config, "unknown section '" + name + "'");
  }

  RunConfig c = reference_run_config();
  {
    SectionReader r(tree, "generator");
    auto& g = c.generator;
    r.read("n_trucks", g.n_trucks);
    r.read("n_features", g.n_features);
    r.read("failure_fraction", g.failure_fraction);
    r.read("min_length", g.min_length);
    r.read("max_length", g.max_length);
    r.read("n_signal_features", g.n_signal_features);
    r.read("drift_strength", g.drift_strength);
    r.read("noise_sigma", g.noise_sigma);
    r.read("gen2_fraction", g.gen2_fraction);
    r.read("gen2_shift", g.gen2_shift);
    r.read("gen2_scale", g.gen2_scale);
    r.read("outlier_rate", g.outlier_rate);
    r.read("outlier_magnitude", g.outlier_magnitude);
    r.read("test_fraction", g.test_fraction);
    r.read("seed", g.seed);
    r.finish();
  }
  {
    SectionReader r(tree, "features");
    auto& f = c.settings.features;
    r.read("include_raw", f.include_raw);
    r.read("include_derivative", f.include_derivative);
    r.read("include_wavelet", f.include_wavelet);
    r.read("wavelet_levels", f.wavelet_levels);
    r.read("quantile_q", f.quantile_q);
    r.read("include_variants", f.include_variants);
    r.read("normalize", c.normalize);
    r.finish();
  }
  {
    SectionReader r(tree, "learner");
    auto& l = c.settings.learners;
    r.read("learning_rate", l.hyper.learning_rate);
    r.read("epochs", l.hyper.epochs);
    r.read("l2", l.hyper.l2);
    r.read_list("hidden_sizes", l.hyper.hidden_sizes);
    r.read("dropout_rate", l.hyper.dropout_rate);
    r.read("n_models", l.n_models);
    r.read("n_draws", l.n_draws);
    r.read("tree_depth", l.tree_depth);
    r.finish();
  }
  {
    SectionReader r(tree, "strategy");
    std::string name(to_string(c.strategy));
    r.read("name", name);
    c.strategy = parse_strategy(name);
    c.settings.seed = c.generator.seed;
    r.read("seed", c.settings.seed);
    r.read("calibrate", c.calibrate);
    r.finish();
  }
  {
    SectionReader r(tree, "twostep");
    auto& t = c.settings.twostep;
    r.read("t_min", t.healthy.t_min);
    r.read("t_mean", t.healthy.t_mean);
    r.read("t_max", t.healthy.t_max);
    r.read("aux_hi", t.aux_hi);
    r.read("aux_lo", t.aux_lo);
    r.read("boundary_shift_limit", t.boundary_shift_limit);
    r.finish();
  }
  {
    SectionReader r(tree, "jump");
    r.read("healthy_threshold", c.settings.jump.healthy_threshold);
    r.finish();
  }
  {
    SectionReader r(tree, "pseudolabel");
    auto& p = c.settings.pseudolabel;
    r.read("n_iterations", p.n_iterations);
    r.read_schedule("capacity_schedule", p.capacity_schedule);
    r.read("confidence_fraction", p.confidence_fraction);
    r.read("prioritize_gen2", p.prioritize_gen2);
    r.read("mirror_passes", p.mirror_passes);
    r.finish();
  }
  {
    SectionReader r(tree, "calibration");
    r.read("validation_fraction", c.calibration.validation_fraction);
    read_grid(r, "twostep", c.calibration.twostep_grid);
    read_grid(r, "jump", c.calibration.jump_grid);
    read_grid(r, "pseudolabel", c.calibration.pseudolabel_grid);
    r.finish();
  }
  {
    SectionReader r(tree, "phases");
    r.read("dev_fraction", c.phases.dev_fraction);
    r.read("dev_daily_quota", c.phases.dev_daily_quota);
    r.read("final_quota", c.phases.final_quota);
    r.finish();
  }
  {
    SectionReader r(tree, "run");
    std::string dir = c.output_dir.string();
    r.read("output_dir", dir);
    c.output_dir = dir;
    r.finish();
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config '" + path.string() + "'");
  return parse_run_config(in);
}

void write_run_config(const RunConfig& c, std::ostream& out, bool include_run_section) {
  const auto& g = c.generator;
  out << "[generator]\n"
      << "n_trucks = " << g.n_trucks << '\n'
      << "n_features = " << g.n_features << '\n'
      << "failure_fraction = " << format_double(g.failure_fraction) << '\n'
      << "min_length = " << g.min_length << '\n'
      << "max_length = " << g.max_length << '\n'
      << "n_signal_features = " << g.n_signal_features << '\n'
      << "drift_strength = " << format_double(g.drift_strength) << '\n'
      << "noise_sigma = " << format_double(g.noise_sigma) << '\n'
      << "gen2_fraction = " << format_double(g.gen2_fraction) << '\n'
      << "gen2_shift = " << format_double(g.gen2_shift) << '\n'
      << "gen2_scale = " << format_double(g.gen2_scale) << '\n'
      << "outlier_rate = " << format_double(g.outlier_rate) << '\n'
      << "outlier_magnitude = " << format_double(g.outlier_magnitude) << '\n'
      << "test_fraction = " << format_double(g.test_fraction) << '\n'
      << "seed = " << g.seed << "\n\n";

  const auto& f = c.settings.features;
  out << "[features]\n"
      << "include_raw = " << bool_text(f.include_raw) << '\n'
      << "include_derivative = " << bool_text(f.include_derivative) << '\n'
      << "include_wavelet = " << bool_text(f.include_wavelet) << '\n'
      << "wavelet_levels = " << f.wavelet_levels << '\n'
      << "quantile_q = " << format_double(f.quantile_q) << '\n'
      << "include_variants = " << bool_text(f.include_variants) << '\n'
      << "normalize = " << bool_text(c.normalize) << "\n\n";

  const auto& l = c.settings.learners;
  out << "[learner]\n"
      << "learning_rate = " << format_double(l.hyper.learning_rate) << '\n'
      << "epochs = " << l.hyper.epochs << '\n'
      << "l2 = " << format_double(l.hyper.l2) << '\n'
      << "hidden_sizes = " << join(l.hyper.hidden_sizes) << '\n'
      << "dropout_rate = " << format_double(l.hyper.dropout_rate) << '\n'
      << "n_models = " << l.n_models << '\n'
      << "n_draws = " << l.n_draws << '\n'
      << "tree_depth = " << l.tree_depth << "\n\n";

  out << "[strategy]\n"
      << "name = " << to_string(c.strategy) << '\n'
      << "seed = " << c.settings.seed << '\n'
      << "calibrate = " << bool_text(c.calibrate) << "\n\n";

  const auto& t = c.settings.twostep;
  out << "[twostep]\n"
      << "t_min = " << format_double(t.healthy.t_min) << '\n'
      << "t_mean = " << format_double(t.healthy.t_mean) << '\n'
      << "t_max = " << format_double(t.healthy.t_max) << '\n'
      << "aux_hi = " << format_double(t.aux_hi) << '\n'
      << "aux_lo = " << format_double(t.aux_lo) << '\n'
      << "boundary_shift_limit = " << t.boundary_shift_limit << "\n\n";

  out << "[jump]\nhealthy_threshold = " << format_double(c.settings.jump.healthy_threshold)
      << "\n\n";

  const auto& p = c.settings.pseudolabel;
  out << "[pseudolabel]\n"
      << "n_iterations = " << p.n_iterations << '\n'
      << "capacity_schedule = ";
  for (std::size_t i = 0; i < p.capacity_schedule.size(); ++i) {
    if (i) out << "; ";
    out << join(p.capacity_schedule[i]);
  }
  out << '\n'
      << "confidence_fraction = " << format_double(p.confidence_fraction) << '\n'
      << "prioritize_gen2 = " << bool_text(p.prioritize_gen2) << '\n'
      << "mirror_passes = " << p.mirror_passes << "\n\n";

  out << "[calibration]\n"
      << "validation_fraction = " << format_double(c.calibration.validation_fraction) << '\n';
  for (const auto& [prefix, grid] :
       {std::pair<const char*, const ParameterGrid*>{"twostep", &c.calibration.twostep_grid},
        {"jump", &c.calibration.jump_grid},
        {"pseudolabel", &c.calibration.pseudolabel_grid}}) {
    for (const auto& axis : *grid) out << prefix << '_' << axis.name << " = " << join(axis.values) << '\n';
  }
  out << '\n';

  out << "[phases]\n"
      << "dev_fraction = " << format_double(c.phases.dev_fraction) << '\n'
      << "dev_daily_quota = " << c.phases.dev_daily_quota << '\n'
      << "final_quota = " << c.phases.final_quota << '\n';

  if (include_run_section) {
    out << "\n[run]\noutput_dir = " << c.output_dir.generic_string() << '\n';
  }
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path,
                     bool include_run_section) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  write_run_config(config, out, include_run_section);
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

}  // namespace fleetrisk
