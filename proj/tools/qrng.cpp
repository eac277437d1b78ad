// qrng: command-line front end for simulation, certification, extraction,
// statistical testing, benchmarking and the local HTTP service.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "triqrng/adc.hpp"
#include "triqrng/bench.hpp"
#include "triqrng/config.hpp"
#include "triqrng/dodis.hpp"
#include "triqrng/entropy.hpp"
#include "triqrng/errors.hpp"
#include "triqrng/gaussian.hpp"
#include "triqrng/io.hpp"
#include "triqrng/json.hpp"
#include "triqrng/pipeline.hpp"
#include "triqrng/rayleigh.hpp"
#include "triqrng/savgol.hpp"
#include "triqrng/service.hpp"
#include "triqrng/source.hpp"
#include "triqrng/stats.hpp"
#include "triqrng/toeplitz.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace triqrng;

namespace {

PipelineConfig config_from(const std::string& path) {
  return path.empty() ? PipelineConfig::paper_like() : load_config(path);
}

void write_output(const std::string& path, std::span<const std::uint8_t> data) {
  if (path.empty() || path == "-") {
    std::cout.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    std::cout.flush();
  } else {
    io::write_bytes(path, data);
  }
}

std::ofstream open_text(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(10);
  return out;
}

CertifyOptions certify_options(const PipelineConfig& cfg) {
  CertifyOptions o;
  o.prediction_order = cfg.certification.prediction_order;
  o.psd_segment = cfg.certification.psd_segment;
  o.epsilon = cfg.extraction.epsilon;
  o.block_n = cfg.extraction.block_n;
  o.sample_rate_hz = cfg.sample_rate_hz;
  return o;
}

// h_min_per_bit for file-mode extraction: from a saved report, or certified
// from the input against a dark record.
double entropy_for(const PipelineConfig& cfg, const CodeBlock& codes, const std::string& report_path,
                   const std::string& dark_path) {
  if (!report_path.empty()) {
    std::ifstream in(report_path);
    if (!in) throw std::runtime_error("cannot open " + report_path);
    EntropyReport r = json::parse(in).get<EntropyReport>();
    return r.h_min_per_bit;
  }
  if (dark_path.empty()) throw std::invalid_argument("file-mode extraction needs --report or --dark");
  const auto dark = read_codes_s16(dark_path, cfg.adc);
  return certify_channel(codes, dark, certify_options(cfg)).h_min_per_bit;
}

struct Collector : OutputSink {
  std::vector<UniformBlock> uniform;
  std::vector<GaussianBatch> gaussian;
  std::vector<RayleighBatch> rayleigh;
  void on_uniform(const UniformBlock& b) override { uniform.push_back(b); }
  void on_gaussian(const GaussianBatch& b) override { gaussian.push_back(b); }
  void on_rayleigh(const RayleighBatch& b) override { rayleigh.push_back(b); }
};

std::vector<std::uint8_t> gaussian_s16(std::span<const std::int32_t> codes, int n_out) {
  std::vector<std::uint8_t> out;
  out.reserve(codes.size() * 2);
  const int shift = 16 - n_out;
  for (std::int32_t c : codes) io::append_s16_le(out, static_cast<std::int16_t>(c * (1 << shift)));
  return out;
}

std::vector<double> read_samples(const std::string& path, const std::string& format) {
  const auto raw = io::read_bytes(path);
  if (format == "f32") return io::decode_f32(raw);
  if (format == "s16") {
    const auto v = io::decode_s16(raw);
    return {v.begin(), v.end()};
  }
  if (format == "csv") {
    std::ifstream in(path);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        out.push_back(std::stod(line.substr(line.rfind(',') + 1)));
      } catch (const std::invalid_argument&) {
        // header row
      }
    }
    return out;
  }
  throw std::invalid_argument("unknown sample format '" + format + "'");
}

QrngService* g_service = nullptr;
extern "C" void on_signal(int) {
  if (g_service) std::thread([] { g_service->stop(); }).detach();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tri-type quantum random number generator: simulation, certification, extraction and serving"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "INI configuration (defaults to the built-in paper-like preset)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate and digitize I/Q quadrature records");
  std::size_t sim_samples = 1 << 20;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_prefix = "qrng";
  std::string sim_format = "s16";
  bool sim_dark = false;
  sim->add_option("-n,--samples", sim_samples, "samples per channel")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "PRNG seed (overrides [source] prng_seed)");
  sim->add_option("-o,--out-prefix", sim_prefix, "output path prefix");
  sim->add_option("-f,--format", sim_format, "s16: <prefix>_i.s16 and <prefix>_q.s16 ADC codes; "
                                             "f32: <prefix>.f32 interleaved volts; csv: <prefix>.csv")
      ->check(CLI::IsMember({"s16", "f32", "csv"}));
  sim->add_flag("--dark", sim_dark, "LO blocked: excess noise only (certification dark record)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "LO power sweep of measured and excess-only variance (JSON)");
  double sweep_max = 4.13;
  std::size_t sweep_points = 10, sweep_samples = 1 << 18;
  sweep->add_option("--max-mw", sweep_max, "highest LO power");
  sweep->add_option("--points", sweep_points, "equally spaced points from 0")->check(CLI::Range(2, 1000));
  sweep->add_option("--samples", sweep_samples, "samples per point")->check(CLI::PositiveNumber);

  // certify
  auto* cert = app.add_subcommand("certify", "certify min-entropy of a code file (EntropyReport JSON)");
  std::string cert_input, cert_dark, cert_channel = "I";
  cert->add_option("-i,--input", cert_input, "signed 16-bit code file")->required()->check(CLI::ExistingFile);
  cert->add_option("--dark", cert_dark, "dark (LO blocked) code file to subtract")->check(CLI::ExistingFile);
  cert->add_option("--channel", cert_channel, "label stored in the report");

  // extract
  auto* ext = app.add_subcommand("extract", "extract uniform, Gaussian or Rayleigh output");
  std::string ext_type = "uniform", ext_in_i, ext_in_q, ext_out = "-", ext_format = "raw", ext_report, ext_dark;
  std::size_t ext_blocks = 1024;
  std::optional<std::size_t> ext_window;
  std::optional<int> ext_order;
  bool ext_hist = false;
  ext->add_option("-t,--type", ext_type, "output type")->check(CLI::IsMember({"uniform", "gaussian", "rayleigh"}));
  ext->add_option("--input-i", ext_in_i, "I-channel code file (file mode)")->check(CLI::ExistingFile);
  ext->add_option("--input-q", ext_in_q, "Q-channel code file (file mode)")->check(CLI::ExistingFile);
  ext->add_option("--blocks", ext_blocks, "blocks per channel when running the simulated source")
      ->check(CLI::PositiveNumber);
  ext->add_option("-o,--output", ext_out, "output file, '-' for stdout");
  ext->add_option("-f,--format", ext_format, "raw (packed / s16 / f32) or csv")->check(CLI::IsMember({"raw", "csv"}));
  ext->add_option("--report", ext_report, "EntropyReport JSON from `certify` (file mode)")->check(CLI::ExistingFile);
  ext->add_option("--dark", ext_dark, "dark code file for certification (file mode)")->check(CLI::ExistingFile);
  ext->add_option("--window", ext_window, "Savitzky-Golay window (rayleigh)");
  ext->add_option("--order", ext_order, "Savitzky-Golay order (rayleigh)");
  ext->add_flag("--histogram-mode", ext_hist, "rayleigh: smooth the histogram and report GoF before/after (JSON)");

  // test
  auto* tst = app.add_subcommand("test", "statistical tests on a sample or bit file (JSON array of GofReports)");
  std::string tst_input, tst_kind = "bits", tst_format = "f32";
  double tst_alpha = 0.01;
  std::size_t tst_bins = 100;
  tst->add_option("-i,--input", tst_input, "input file")->required()->check(CLI::ExistingFile);
  tst->add_option("-k,--kind", tst_kind, "bits (packed, MSB-first) or a reference distribution")
      ->check(CLI::IsMember({"bits", "gaussian", "rayleigh", "uniform"}));
  tst->add_option("-f,--format", tst_format, "sample file format")->check(CLI::IsMember({"f32", "s16", "csv"}));
  tst->add_option("--alpha", tst_alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  tst->add_option("--bins", tst_bins, "chi-squared bins")->check(CLI::Range(5, 100000));

  // bench
  auto* bch = app.add_subcommand("bench", "throughput report (JSON)");
  double bch_seconds = 5.0;
  bch->add_option("-s,--seconds", bch_seconds, "total measurement time")->check(CLI::PositiveNumber);

  // serve
  auto* srv = app.add_subcommand("serve", "serve random output over HTTP (plaintext, no auth)");
  std::string srv_listen;
  srv->add_option("--listen", srv_listen, "host:port (else QRNG_LISTEN, else [service])");

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = config_from(config_path);

    if (*sim) {
      if (sim_seed) cfg.prng_seed = *sim_seed;
      const auto frame = sim_dark ? simulate_dark(cfg.source, sim_samples, cfg.prng_seed)
                                  : simulate_quadratures(cfg.source, sim_samples, cfg.prng_seed);
      if (sim_format == "f32") {
        write_frame_f32(sim_prefix + ".f32", frame);
      } else if (sim_format == "csv") {
        write_frame_csv(sim_prefix + ".csv", frame);
      } else {
        const auto [ci, cq] = quantize(frame, cfg.adc);
        write_codes_s16(sim_prefix + "_i.s16", ci);
        write_codes_s16(sim_prefix + "_q.s16", cq);
        std::cerr << "clamped fraction I " << ci.clamped_fraction() << ", Q " << cq.clamped_fraction() << '\n';
      }
    } else if (*sweep) {
      std::vector<double> powers(sweep_points);
      for (std::size_t k = 0; k < sweep_points; ++k)
        powers[k] = sweep_max * static_cast<double>(k) / static_cast<double>(sweep_points - 1);
      const auto points = lo_power_sweep(cfg.source, powers, sweep_samples, cfg.prng_seed);
      std::vector<double> qv;
      for (const auto& p : points) qv.push_back(p.quantum_variance());
      const auto fit = least_squares_line(powers, qv);
      std::cout << json{{"points", points}, {"fit", {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r", fit.r}}}}
                       .dump(2)
                << '\n';
    } else if (*cert) {
      const auto codes = read_codes_s16(cert_input, cfg.adc);
      const CodeBlock dark = cert_dark.empty() ? CodeBlock{{}, cfg.adc, 0} : read_codes_s16(cert_dark, cfg.adc);
      auto rep = certify_channel(codes, dark, certify_options(cfg));
      rep.channel = cert_channel;
      std::cout << json(rep).dump(2) << '\n';
    } else if (*ext) {
      const OutputType type = parse_output_type(ext_type);
      if (ext_window) cfg.extraction.sg_window = *ext_window;
      if (ext_order) cfg.extraction.sg_order = *ext_order;
      const bool file_mode = !ext_in_i.empty();
      if (file_mode && ext_in_q.empty()) throw std::invalid_argument("file mode needs both --input-i and --input-q");

      if (type == OutputType::uniform) {
        BitBlock out;
        if (file_mode) {
          const auto ci = read_codes_s16(ext_in_i, cfg.adc);
          const auto cq = read_codes_s16(ext_in_q, cfg.adc);
          for (const auto* c : {&ci, &cq}) {
            const double h = entropy_for(cfg, *c, ext_report, ext_dark);
            const std::size_t l = extractable_length(cfg.extraction.block_n, std::min(h, 1.0), cfg.extraction.epsilon);
            if (cfg.extraction.block_m > l)
              throw StartupError("block_m = " + std::to_string(cfg.extraction.block_m) + " exceeds extractable length " +
                                 std::to_string(l) + " at h = " + std::to_string(h));
          }
          const std::size_t spt = cfg.extraction.block_n / static_cast<std::size_t>(cfg.adc.bits);
          const std::size_t blocks = std::min(ci.size(), cq.size()) / spt;
          std::size_t next_block = 0;
          std::optional<ToeplitzSeed> seed;
          const auto& cache = cfg.extraction.seed_cache_path;
          if (!cache.empty() && fs::exists(cache)) {
            seed = ToeplitzSeed::load(cache);
          } else {
            // Seed from the leading raw blocks, I and Q alternately; those blocks are not reused.
            const BitBlockStream stream = [&, turn = 0]() mutable -> std::optional<BitBlock> {
              if (next_block >= blocks) return std::nullopt;
              const auto& src = (turn++ % 2 == 0) ? ci : cq;
              auto b = pack_codes(std::span(src.codes).subspan(next_block * spt, spt), cfg.adc.bits);
              if (turn % 2 == 0) ++next_block;
              return b;
            };
            seed = seed_chain(stream, cfg.extraction.block_n, cfg.extraction.block_m, cfg.extraction.dodis);
            if (!cache.empty()) seed->save(cache);
          }
          const ToeplitzExtractor extractor(*seed);
          std::vector<BitBlock> inputs;
          for (std::size_t b = next_block; b < blocks; ++b)
            for (const auto* c : {&ci, &cq})
              inputs.push_back(pack_codes(std::span(c->codes).subspan(b * spt, spt), cfg.adc.bits));
          for (const auto& o : extract_blocks(extractor, inputs, cfg.extraction.workers)) out.append(o);
        } else {
          const auto run = run_pipeline(cfg, ext_blocks, mask(OutputType::uniform));
          out = run.uniform_bits();
        }
        if (ext_format == "csv") {
          auto f = open_text(ext_out);
          f << "index,bit\n";
          for (std::size_t k = 0; k < out.size(); ++k) f << k << ',' << out.get(k) << '\n';
        } else {
          write_output(ext_out, out.to_bytes());
        }
      } else if (type == OutputType::gaussian) {
        std::vector<GaussianBatch> batches;
        if (file_mode) {
          const auto ci = read_codes_s16(ext_in_i, cfg.adc);
          const auto cq = read_codes_s16(ext_in_q, cfg.adc);
          const auto& g = cfg.extraction.gaussian;
          int ch = 0;
          for (const auto* c : {&ci, &cq}) {
            const double h = entropy_for(cfg, *c, ext_report, ext_dark);
            const auto res = extract_gaussian_channel(*c, choose_msb_bits(std::min(h, 1.0), cfg.adc.bits),
                                                      ch == 0 ? g.passes_i : g.passes_q, g);
            batches.push_back({ch, res.codes, res.n_out, res.step, res.passes, res.ks, res.chi2, 0});
            ++ch;
          }
        } else {
          Pipeline p(cfg);
          Collector sink;
          p.run(ext_blocks, mask(OutputType::gaussian), sink);
          batches = std::move(sink.gaussian);
        }
        json gof = json::array();
        for (const auto& b : batches) gof.push_back({{"channel", b.channel == 0 ? "I" : "Q"}, {"n_out", b.n_out},
                                                     {"passes", b.passes}, {"ks", b.ks}, {"chi2", b.chi2}});
        std::cerr << gof.dump(2) << '\n';
        if (ext_format == "csv") {
          auto f = open_text(ext_out);
          f << "channel,index,value\n";
          std::size_t idx[2] = {0, 0};
          for (const auto& b : batches)
            for (std::int32_t c : b.codes) f << (b.channel == 0 ? 'I' : 'Q') << ',' << idx[b.channel]++ << ',' << c * b.step << '\n';
        } else {
          std::vector<std::uint8_t> bytes;
          for (const auto& b : batches) {
            const auto chunk = gaussian_s16(b.codes, b.n_out);
            bytes.insert(bytes.end(), chunk.begin(), chunk.end());
          }
          write_output(ext_out, bytes);
        }
      } else {
        std::vector<double> r;
        if (file_mode) {
          const auto vi = dequantize(read_codes_s16(ext_in_i, cfg.adc));
          const auto vq = dequantize(read_codes_s16(ext_in_q, cfg.adc));
          r = rayleigh_raw(std::span(vi).first(std::min(vi.size(), vq.size())),
                           std::span(vq).first(std::min(vi.size(), vq.size())));
        } else {
          Pipeline p(cfg);
          const std::size_t n = ext_blocks * p.samples_per_tick();
          QuadratureSource src(cfg.source, cfg.prng_seed);
          const auto [ci, cq] = quantize(src.next(n), cfg.adc);
          const auto vi = dequantize(ci), vq = dequantize(cq);
          r = rayleigh_raw(vi, vq);
        }
        std::cerr << "quality: " << kRayleighQuality << '\n';
        if (ext_hist) {
          const auto h = rayleigh_histogram(r, 100, cfg.extraction.sg_window, cfg.extraction.sg_order, 0.05);
          const json j{{"quality", kRayleighQuality}, {"sigma", h.sigma}, {"expected_per_bin", h.expected},
                       {"raw_counts", h.raw_counts}, {"smoothed_counts", h.smoothed_counts},
                       {"raw_gof", h.raw_gof}, {"smoothed_gof", h.smoothed_gof}};
          const auto text = j.dump(2) + "\n";
          write_output(ext_out, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
        } else {
          const auto smoothed = savitzky_golay(r, cfg.extraction.sg_window, cfg.extraction.sg_order);
          if (ext_format == "csv") {
            auto f = open_text(ext_out);
            f << "index,r\n";
            for (std::size_t k = 0; k < smoothed.size(); ++k) f << k << ',' << smoothed[k] << '\n';
          } else {
            write_output(ext_out, io::encode_f32(smoothed));
          }
        }
      }
    } else if (*tst) {
      json out = json::array();
      if (tst_kind == "bits") {
        const auto bits = BitBlock::from_bytes(io::read_bytes(tst_input));
        const auto reports = bits.size() >= kBitTestMinBits
                                 ? bit_tests(bits, tst_alpha)
                                 : std::vector<GofReport>{monobit_test(bits, tst_alpha),
                                                          block_frequency_test(bits, 128, tst_alpha),
                                                          runs_test(bits, tst_alpha), longest_run_test(bits, tst_alpha)};
        if (bits.size() < kBitTestMinBits)
          std::cerr << "warning: fewer than 10^6 bits; results are indicative only\n";
        for (const auto& r : reports) out.push_back(r);
      } else {
        const auto samples = read_samples(tst_input, tst_format);
        const auto ref = Reference::parse(tst_kind);
        out.push_back(ks_test(samples, ref, tst_alpha));
        out.push_back(chi2_test(samples, ref, tst_bins, tst_alpha));
      }
      std::cout << out.dump(2) << '\n';
    } else if (*bch) {
      std::cout << run_bench(cfg, bch_seconds).to_json().dump(2) << '\n';
    } else if (*srv) {
      auto [host, port] = resolve_listen_address(cfg.service);
      if (!srv_listen.empty()) {
        const auto colon = srv_listen.rfind(':');
        host = srv_listen.substr(0, colon);
        if (colon != std::string::npos) port = std::stoi(srv_listen.substr(colon + 1));
      }
      QrngService service(cfg);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const int bound = service.start(host, port);
      std::cerr << "serving on http://" << host << ':' << bound << " (plaintext, no auth)\n";
      service.wait();
      g_service = nullptr;
    }
  } catch (const std::exception& e) {
    std::cerr << "qrng: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
