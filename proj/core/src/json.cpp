#include "triqrng/json.hpp"

namespace triqrng {

void to_json(nlohmann::json& j, const EntropyReport& r) {
  j = {{"channel", r.channel},
       {"h_min_per_sample", r.h_min_per_sample},
       {"h_min_per_bit", r.h_min_per_bit},
       {"g_star", r.g_star},
       {"n_eff", r.n_eff},
       {"sigma_m2", r.sigma_m2},
       {"sigma_qc2", r.sigma_qc2},
       {"epsilon", r.epsilon},
       {"extractable_fraction", r.extractable_fraction},
       {"block_n", r.block_n},
       {"extractable_bits", r.extractable_bits},
       {"adc_bits", r.adc_bits},
       {"range_v", r.range_v},
       {"delta_x", r.delta_x},
       {"dnl_max", r.dnl_max},
       {"prediction_order", r.prediction_order},
       {"psd_segment", r.psd_segment},
       {"samples", r.samples}};
}

void from_json(const nlohmann::json& j, EntropyReport& r) {
  r.channel = j.value("channel", std::string{});
  j.at("h_min_per_sample").get_to(r.h_min_per_sample);
  j.at("h_min_per_bit").get_to(r.h_min_per_bit);
  j.at("g_star").get_to(r.g_star);
  j.at("n_eff").get_to(r.n_eff);
  j.at("sigma_m2").get_to(r.sigma_m2);
  j.at("sigma_qc2").get_to(r.sigma_qc2);
  j.at("epsilon").get_to(r.epsilon);
  j.at("extractable_fraction").get_to(r.extractable_fraction);
  r.block_n = j.value("block_n", std::size_t{0});
  r.extractable_bits = j.value("extractable_bits", std::size_t{0});
  r.adc_bits = j.value("adc_bits", 0);
  r.range_v = j.value("range_v", 0.0);
  r.delta_x = j.value("delta_x", 0.0);
  r.dnl_max = j.value("dnl_max", 0.0);
  r.prediction_order = j.value("prediction_order", 0);
  r.psd_segment = j.value("psd_segment", std::size_t{0});
  r.samples = j.value("samples", std::size_t{0});
}

void to_json(nlohmann::json& j, const GofReport& r) {
  j = {{"test_name", r.test_name}, {"statistic", r.statistic}, {"p_value", r.p_value},
       {"alpha", r.alpha},         {"pass", r.pass},           {"n_samples", r.n_samples},
       {"dof", r.dof},             {"parameters_estimated", r.parameters_estimated}};
}

void to_json(nlohmann::json& j, const SweepPoint& p) {
  j = {{"power_mw", p.power_mw},
       {"total_variance", p.total_variance},
       {"excess_variance", p.excess_variance},
       {"quantum_variance", p.quantum_variance()}};
}

}  // namespace triqrng
