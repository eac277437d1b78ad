#include "triqrng/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "triqrng/errors.hpp"

namespace triqrng {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "' has an empty list");
  return out;
}

// Reads typed values out of one section and records which keys were seen.
class Section {
 public:
  Section(const pt::ptree& tree, std::string name) : name_(std::move(name)) {
    if (auto child = tree.get_child_optional(name_)) node_ = &*child;
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    seen_.insert(key);
    if (!node_) return;
    auto v = node_->get_optional<std::string>(key);
    if (!v) return;
    try {
      target = node_->get<T>(key);
    } catch (const pt::ptree_error&) {
      throw ConfigError("[" + name_ + "] " + key + ": cannot parse '" + *v + "'");
    }
  }

  std::optional<std::string> raw(const std::string& key) {
    seen_.insert(key);
    if (!node_) return std::nullopt;
    auto v = node_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& [key, _] : *node_)
      if (!seen_.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
  }

 private:
  std::string name_;
  const pt::ptree* node_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

PipelineConfig PipelineConfig::paper_like() { return {}; }

PipelineConfig PipelineConfig::quiet() {
  PipelineConfig c;
  c.source = NoiseModel::quiet();
  return c;
}

void PipelineConfig::validate() const {
  try {
    source.validate();
    adc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto& x = extraction;
  if (x.block_n == 0 || x.block_m == 0 || x.block_m > x.block_n) throw ConfigError("need 0 < block_m <= block_n");
  if (x.block_n % static_cast<std::size_t>(adc.bits) != 0)
    throw ConfigError("block_n must be a whole number of " + std::to_string(adc.bits) + "-bit samples");
  if (!(x.epsilon > 0.0 && x.epsilon < 1.0)) throw ConfigError("epsilon must be in (0, 1)");
  if (x.gaussian.k < 2 || x.gaussian.pool_size == 0 || x.gaussian.pool_size % x.gaussian.k != 0)
    throw ConfigError("pool_size must be a positive multiple of k >= 2");
  if (x.gaussian.passes_i < 1 || x.gaussian.passes_q < 1) throw ConfigError("pass counts must be >= 1");
  try {
    (void)x.gaussian.recursive_matrix();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("matrix: ") + e.what());
  }
  if (x.sg_window % 2 == 0 || x.sg_order < 0 || static_cast<std::size_t>(x.sg_order) >= x.sg_window)
    throw ConfigError("sg_window must be odd and sg_order in [0, sg_window)");
  if (x.workers == 0) throw ConfigError("workers must be >= 1");
  if (x.dodis.output_bits == 0) throw ConfigError("dodis_output_bits must be >= 1");
  const auto& c = certification;
  if (c.prediction_order < 0) throw ConfigError("prediction_order must be >= 0");
  if (c.psd_segment < 8 || (c.psd_segment & (c.psd_segment - 1)) != 0)
    throw ConfigError("psd_segment must be a power of two >= 8");
  if (c.samples < 4 * c.psd_segment) throw ConfigError("certification samples must cover several PSD segments");
  if (c.recertify_every == 0) throw ConfigError("recertify_every must be >= 1");
  if (service.port < 0 || service.port > 65535) throw ConfigError("port out of range");
  if (service.max_request_bytes == 0) throw ConfigError("max_request_bytes must be >= 1");
  if (service.test_block_bits < kBitTestMinBits) throw ConfigError("test_block_bits must be >= 10^6");
  if (service.buffer_bytes < service.max_request_bytes) throw ConfigError("buffer_bytes must cover max_request_bytes");
}

PipelineConfig parse_config(const std::string& ini_text) {
  pt::ptree tree;
  try {
    std::istringstream in(ini_text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("INI syntax: ") + e.what());
  }
  static const std::set<std::string> known{"source", "adc", "extraction", "certification", "service"};
  for (const auto& [name, node] : tree) {
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
    if (!node.data().empty()) throw ConfigError("key '" + name + "' outside any section");
  }

  PipelineConfig cfg;
  {
    Section s(tree, "source");
    auto& m = cfg.source;
    s.read("sigma_q2", m.sigma_q2);
    s.read("sigma_e2", m.sigma_e2);
    if (auto v = s.raw("sigma_e2_q"); v && !v->empty()) m.sigma_e2_q = parse_list("sigma_e2_q", *v).at(0);
    if (auto v = s.raw("filter_taps"); v && !v->empty()) m.filter_taps = parse_list("filter_taps", *v);
    s.read("lo_power_mw", m.lo_power_mw);
    s.read("responsivity", m.responsivity);
    s.read("saturation_v", m.saturation_v);
    s.read("prng_seed", cfg.prng_seed);
    s.read("sample_rate_hz", cfg.sample_rate_hz);
    s.reject_unknown();
  }
  {
    Section s(tree, "adc");
    s.read("bits", cfg.adc.bits);
    s.read("range_v", cfg.adc.range_v);
    s.read("dnl_max", cfg.adc.dnl_max);
    s.read("dnl_seed", cfg.adc.dnl_seed);
    s.reject_unknown();
  }
  {
    Section s(tree, "extraction");
    auto& x = cfg.extraction;
    s.read("block_n", x.block_n);
    s.read("block_m", x.block_m);
    s.read("epsilon", x.epsilon);
    s.read("seed_cache_path", x.seed_cache_path);
    s.read("dodis_chunk_bits", x.dodis.chunk_bits);
    s.read("dodis_output_bits", x.dodis.output_bits);
    s.read("k", x.gaussian.k);
    s.read("pool_size", x.gaussian.pool_size);
    s.read("passes_i", x.gaussian.passes_i);
    s.read("passes_q", x.gaussian.passes_q);
    s.read("auto_passes", x.gaussian.auto_passes);
    if (auto v = s.raw("matrix"); v && !v->empty()) x.gaussian.matrix = parse_list("matrix", *v);
    s.read("output_grid_sigma", x.gaussian.output_grid_sigma);
    s.read("alpha", x.gaussian.alpha);
    s.read("sg_window", x.sg_window);
    s.read("sg_order", x.sg_order);
    s.read("workers", x.workers);
    s.reject_unknown();
  }
  {
    Section s(tree, "certification");
    auto& c = cfg.certification;
    s.read("prediction_order", c.prediction_order);
    s.read("psd_segment", c.psd_segment);
    s.read("samples", c.samples);
    s.read("recertify_every", c.recertify_every);
    s.reject_unknown();
  }
  {
    Section s(tree, "service");
    auto& v = cfg.service;
    s.read("listen_address", v.listen_address);
    s.read("port", v.port);
    s.read("max_request_bytes", v.max_request_bytes);
    s.read("buffer_bytes", v.buffer_bytes);
    s.read("test_block_bits", v.test_block_bits);
    s.read("request_timeout_ms", v.request_timeout_ms);
    s.read("alpha", v.alpha);
    s.reject_unknown();
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace triqrng
