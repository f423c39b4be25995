#include "qrpl/perf/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qrpl/rng.hpp"

namespace qrpl::perf {

namespace {

// Shortest round-trip double formatting for deterministic reports.
std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("double format failed");
  return std::string(buf, ptr);
}

std::string fmt_pair(const std::pair<double, double>& p) {
  return "[" + fmt(p.first) + "," + fmt(p.second) + "]";
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

const char* to_string(CorrelationMode m) {
  return m == CorrelationMode::Independent ? "independent" : "common-shock";
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::domain_error("percentile of empty sample");
  if (q < 0 || q > 100) throw std::domain_error("percentile q outside [0,100]");
  std::sort(values.begin(), values.end());
  double pos = (q / 100.0) * static_cast<double>(values.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(pos));
  size_t hi = static_cast<size_t>(std::ceil(pos));
  double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

void ThroughputParams::validate() const {
  for (double v : {block_time_s, avg_pqc_sig_kb, avg_zkp_kb, other_tx_kb, block_size_limit_kb,
                   tx_per_block, cross_shard_reduction}) {
    if (!(v > 0)) throw std::domain_error("throughput parameters must be positive");
  }
  if (shards == 0 || num_runs == 0) throw std::domain_error("shards and num_runs must be positive");
  if (std_factor < 0 || std_factor >= 1) throw std::domain_error("std_factor outside [0,1)");
}

SimResult throughput_model(const ThroughputParams& params, uint64_t seed) {
  params.validate();
  double tps = params.tps_per_shard_closed();
  double sd = tps * params.std_factor;

  SimResult r;
  r.tps_per_shard = tps;
  r.tps_global = params.tps_global_closed();
  r.shards = params.shards;
  r.num_runs = params.num_runs;
  r.std_factor = params.std_factor;
  r.mode = params.mode;
  r.seed = seed;

  // Each run draws from its own (seed, run-index) stream, so a parallel
  // evaluation order cannot change the results.
  Rng base(seed);
  std::vector<double> shard_samples;
  std::vector<double> global_samples;
  global_samples.reserve(params.num_runs);

  if (params.mode == CorrelationMode::Independent) {
    shard_samples.reserve(static_cast<size_t>(params.num_runs) * params.shards);
    for (uint32_t run = 0; run < params.num_runs; ++run) {
      Rng rng = base.fork(run);
      double sum = 0;
      for (uint32_t s = 0; s < params.shards; ++s) {
        double x = std::max(0.0, rng.normal(tps, sd));  // truncation at zero
        shard_samples.push_back(x);
        sum += x;
      }
      global_samples.push_back(sum);
    }
  } else {
    // One shock per run scales every shard identically.
    shard_samples.reserve(params.num_runs);
    for (uint32_t run = 0; run < params.num_runs; ++run) {
      Rng rng = base.fork(run);
      double f = std::max(0.0, rng.normal(1.0, params.std_factor));
      double x = tps * f;
      shard_samples.push_back(x);
      global_samples.push_back(x * static_cast<double>(params.shards));
    }
  }

  r.ci_per_shard = {percentile(shard_samples, 2.5), percentile(shard_samples, 97.5)};
  r.ci_global = {percentile(global_samples, 2.5), percentile(global_samples, 97.5)};
  r.sample_mean_per_shard = mean_of(shard_samples);
  r.sample_std_per_shard = std_of(shard_samples, r.sample_mean_per_shard);
  r.sample_mean_global = mean_of(global_samples);
  r.sample_std_global = std_of(global_samples, r.sample_mean_global);
  r.global_samples = std::move(global_samples);
  return r;
}

std::string SimResult::to_json() const {
  std::ostringstream os;
  os << "{\"tps_per_shard\":" << fmt(tps_per_shard) << ",\"tps_global\":" << fmt(tps_global)
     << ",\"ci_per_shard\":" << fmt_pair(ci_per_shard) << ",\"ci_global\":" << fmt_pair(ci_global)
     << ",\"sample_mean_per_shard\":" << fmt(sample_mean_per_shard)
     << ",\"sample_std_per_shard\":" << fmt(sample_std_per_shard)
     << ",\"sample_mean_global\":" << fmt(sample_mean_global)
     << ",\"sample_std_global\":" << fmt(sample_std_global) << ",\"shards\":" << shards
     << ",\"num_runs\":" << num_runs << ",\"std_factor\":" << fmt(std_factor) << ",\"mode\":\""
     << to_string(mode) << "\",\"seed\":" << seed << "}";
  return os.str();
}

std::string SimResult::samples_csv() const {
  std::ostringstream os;
  os << "run,global_tps\n";
  for (size_t i = 0; i < global_samples.size(); ++i) {
    os << i << "," << fmt(global_samples[i]) << "\n";
  }
  return os.str();
}

std::vector<SweepEntry> sensitivity_sweep(const ThroughputParams& base,
                                          std::span<const double> std_factors,
                                          std::span<const double> tx_per_block_values,
                                          uint64_t seed) {
  std::vector<SweepEntry> out;
  uint64_t run_index = 0;
  for (double sf : std_factors) {
    for (double txb : tx_per_block_values) {
      ThroughputParams p = base;
      p.std_factor = sf;
      p.tx_per_block = txb;
      p.mode = CorrelationMode::CommonShock;
      SweepEntry e;
      e.std_factor = sf;
      e.tx_per_block = txb;
      e.result = throughput_model(p, Rng::splitmix(seed ^ (0x51ed270b* ++run_index)));
      double m_shard = p.tps_per_shard_closed();
      double m_global = p.tps_global_closed();
      e.sigma_band_per_shard = {m_shard * (1.0 - sf), m_shard * (1.0 + sf)};
      e.sigma_band_global = {m_global * (1.0 - sf), m_global * (1.0 + sf)};
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::string sweep_to_json(std::span<const SweepEntry> entries) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < entries.size(); ++i) {
    const SweepEntry& e = entries[i];
    if (i) os << ",";
    os << "{\"std_factor\":" << fmt(e.std_factor) << ",\"tx_per_block\":" << fmt(e.tx_per_block)
       << ",\"sigma_band_per_shard\":" << fmt_pair(e.sigma_band_per_shard)
       << ",\"sigma_band_global\":" << fmt_pair(e.sigma_band_global)
       << ",\"result\":" << e.result.to_json() << "}";
  }
  os << "]";
  return os.str();
}

void LatencyParams::validate() const {
  if (!(proof_lo_s >= 0) || !(proof_hi_s >= proof_lo_s)) {
    throw std::domain_error("proof generation bounds invalid");
  }
  for (double v : {propagation_mean_s, vote_mean_s, cross_shard_mean_s}) {
    if (v < 0) throw std::domain_error("latency means must be non-negative");
  }
  if (cross_shard_fraction < 0 || cross_shard_fraction > 1) {
    throw std::domain_error("cross_shard_fraction outside [0,1]");
  }
  if (jitter_std_fraction < 0) throw std::domain_error("jitter fraction negative");
}

LatencyReport latency_model(const LatencyParams& params, uint64_t n_samples, uint64_t seed) {
  params.validate();
  if (n_samples < 10'000) throw std::domain_error("latency model needs >= 10^4 samples");

  Rng rng(seed);
  std::vector<double> samples;
  samples.reserve(n_samples);
  uint64_t under_2s = 0;
  double sum = 0;
  for (uint64_t i = 0; i < n_samples; ++i) {
    double base = rng.uniform(params.proof_lo_s, params.proof_hi_s) + params.propagation_mean_s +
                  params.vote_mean_s;
    if (rng.bernoulli(params.cross_shard_fraction)) base += params.cross_shard_mean_s;
    double jitter = params.jitter_std_fraction > 0
                        ? std::max(0.0, rng.normal(1.0, params.jitter_std_fraction))
                        : 1.0;
    double latency = base * jitter;
    samples.push_back(latency);
    sum += latency;
    if (latency < 2.0) ++under_2s;
  }

  LatencyReport rep;
  rep.mean_s = sum / static_cast<double>(n_samples);
  rep.ci95 = {percentile(samples, 2.5), percentile(samples, 97.5)};
  rep.fraction_under_2s = static_cast<double>(under_2s) / static_cast<double>(n_samples);
  rep.samples = n_samples;
  rep.seed = seed;
  double component_sum = (params.proof_lo_s + params.proof_hi_s) / 2.0 + params.propagation_mean_s +
                         params.vote_mean_s + params.cross_shard_mean_s;
  rep.calibration_note =
      "cross_shard_fraction=" + fmt(params.cross_shard_fraction) +
      " calibrated: raw component means sum to " + fmt(component_sum) +
      " s, above the modeled 1.5 s average; only that fraction of transactions pays the "
      "cross-shard term";
  return rep;
}

std::string LatencyReport::to_json() const {
  std::ostringstream os;
  os << "{\"mean_s\":" << fmt(mean_s) << ",\"ci95\":" << fmt_pair(ci95)
     << ",\"fraction_under_2s\":" << fmt(fraction_under_2s) << ",\"samples\":" << samples
     << ",\"seed\":" << seed << ",\"calibration_note\":\"" << calibration_note << "\"}";
  return os.str();
}

void StorageParams::validate() const {
  if (!(tx_per_day_per_shard >= 0) || shards == 0 || !(retained_bytes_per_tx > 0) ||
      !(compression_ratio > 0)) {
    throw std::domain_error("storage parameters must be positive");
  }
}

StorageParams StorageParams::physical() {
  StorageParams p;
  p.retained_bytes_per_tx = (2.5 + 100.0 + 1.0) * 1024.0;
  p.compression_ratio = 0.39;
  return p;
}

StorageReport storage_model(const StorageParams& params) {
  params.validate();
  StorageReport r;
  r.per_shard_year_bytes = params.tx_per_day_per_shard * 365.0 * params.retained_bytes_per_tx;
  r.network_year_bytes = r.per_shard_year_bytes * static_cast<double>(params.shards);
  r.compressed_year_bytes = r.network_year_bytes * params.compression_ratio;
  return r;
}

std::string StorageReport::to_json() const {
  std::ostringstream os;
  os << "{\"per_shard_year_bytes\":" << fmt(per_shard_year_bytes)
     << ",\"network_year_bytes\":" << fmt(network_year_bytes)
     << ",\"compressed_year_bytes\":" << fmt(compressed_year_bytes)
     << ",\"energy_kwh_per_tx_constant\":" << fmt(energy_kwh_per_tx) << "}";
  return os.str();
}

}  // namespace qrpl::perf
