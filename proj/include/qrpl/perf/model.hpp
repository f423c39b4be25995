#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qrpl::perf {

// Two ways to correlate per-shard variability. Independent draws reproduce
// the baseline confidence intervals; a common shock across shards reproduces
// the published sensitivity ranges, which assume the whole network moves
// together.
enum class CorrelationMode { Independent, CommonShock };

const char* to_string(CorrelationMode m);

struct ThroughputParams {
  double block_time_s = 10.0;
  double avg_pqc_sig_kb = 2.5;
  double avg_zkp_kb = 100.0;
  double other_tx_kb = 1.0;
  double block_size_limit_kb = 4096.0;
  double tx_per_block = 20.0;
  double cross_shard_reduction = 0.85;
  uint32_t shards = 256;
  uint32_t num_runs = 1000;
  double std_factor = 0.3;
  CorrelationMode mode = CorrelationMode::Independent;

  void validate() const;

  double effective_tx_per_block() const { return tx_per_block * cross_shard_reduction; }
  double tps_per_shard_closed() const { return effective_tx_per_block() / block_time_s; }
  double tps_global_closed() const { return tps_per_shard_closed() * shards; }
  // Hard byte-budget ceiling on transactions per block.
  int theoretical_max_tx_per_block() const {
    return static_cast<int>(block_size_limit_kb / (avg_pqc_sig_kb + avg_zkp_kb + other_tx_kb));
  }
};

struct SimResult {
  double tps_per_shard{};  // closed form
  double tps_global{};     // closed form
  std::pair<double, double> ci_per_shard{};  // 2.5 / 97.5 percentiles, pooled shard samples
  std::pair<double, double> ci_global{};     // 2.5 / 97.5 percentiles, per-run sums
  double sample_mean_per_shard{};
  double sample_std_per_shard{};
  double sample_mean_global{};
  double sample_std_global{};
  uint32_t shards{};
  uint32_t num_runs{};
  double std_factor{};
  CorrelationMode mode{};
  uint64_t seed{};
  std::vector<double> global_samples;  // retained for audit (one per run)

  std::string to_json() const;
  std::string samples_csv() const;
};

SimResult throughput_model(const ThroughputParams& params, uint64_t seed);

struct SweepEntry {
  double std_factor{};
  double tx_per_block{};
  SimResult result;
  // Closed-form mean +/- one sigma, the arithmetic behind the published
  // sensitivity ranges.
  std::pair<double, double> sigma_band_per_shard{};
  std::pair<double, double> sigma_band_global{};
};

// Grid evaluation over std factors and batch sizes; runs in CommonShock mode.
std::vector<SweepEntry> sensitivity_sweep(const ThroughputParams& base,
                                          std::span<const double> std_factors,
                                          std::span<const double> tx_per_block_values,
                                          uint64_t seed);

std::string sweep_to_json(std::span<const SweepEntry> entries);

struct LatencyParams {
  double proof_lo_s = 0.2;
  double proof_hi_s = 0.5;
  double propagation_mean_s = 0.3;
  double vote_mean_s = 0.3;
  double cross_shard_mean_s = 0.7;
  // Calibrated so the component means sum to the modeled 1.5 s average: the
  // raw components (0.35 + 0.3 + 0.3 + 0.7) exceed it, so only ~79% of
  // transactions pay the cross-shard term.
  double cross_shard_fraction = 0.79;
  // Single multiplicative jitter on the summed latency. Per-component jitter
  // at this magnitude cannot produce the modeled sub-2 s tail; the shared
  // factor captures congestion hitting the whole path at once.
  double jitter_std_fraction = 0.2;

  void validate() const;
};

struct LatencyReport {
  double mean_s{};
  std::pair<double, double> ci95{};  // 2.5 / 97.5 sample percentiles
  double fraction_under_2s{};
  uint64_t samples{};
  uint64_t seed{};
  std::string calibration_note;

  std::string to_json() const;
};

LatencyReport latency_model(const LatencyParams& params, uint64_t n_samples, uint64_t seed);

struct StorageParams {
  double tx_per_day_per_shard = 1e6;
  uint32_t shards = 256;
  // Back-computed from the published arithmetic (1 GB/shard/year at 1M
  // tx/day); the "physical" preset below carries full transaction size.
  double retained_bytes_per_tx = 2.74;
  double compression_ratio = 0.39;

  void validate() const;
  // Full nominal transaction footprint (signature + proof + other, in bytes).
  static StorageParams physical();
};

// Emitted as a labeled constant, not a measurement.
inline constexpr double kEnergyKwhPerTx = 0.000002;

struct StorageReport {
  double per_shard_year_bytes{};
  double network_year_bytes{};
  double compressed_year_bytes{};
  double energy_kwh_per_tx{kEnergyKwhPerTx};

  std::string to_json() const;
};

StorageReport storage_model(const StorageParams& params);

// NumPy-style linear-interpolation percentile; q in [0, 100].
double percentile(std::vector<double> values, double q);

}  // namespace qrpl::perf
