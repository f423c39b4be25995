// qrpl: protocol simulation and performance-model CLI.
//
// Subcommands: simulate, perf throughput|latency|storage, attack-cost,
// ledger-demo, offline-demo. Every run writes its reports plus a manifest
// embedding the exact effective configuration and seed; feeding that manifest
// back through --config reproduces the reports byte for byte.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qrpl/consensus/consensus.hpp"
#include "qrpl/issuance/oracle.hpp"
#include "qrpl/ledger/ledger.hpp"
#include "qrpl/net/simulator.hpp"
#include "qrpl/offline/offline.hpp"
#include "qrpl/perf/model.hpp"
#include "qrpl/ratio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qrpl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenarioFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Effective settings: defaults, overridden by the config file, overridden by
// explicit CLI flags. Values are kept as strings so rational parameters stay
// exact and the manifest round-trips losslessly.
struct Settings {
  std::string scenario;
  uint64_t seed = 42;
  std::string format = "json";
  std::string out_dir = "out";
  std::map<std::string, std::string> overrides;

  bool has(const std::string& key) const { return overrides.contains(key); }
  void set(const std::string& key, const std::string& value) { overrides[key] = value; }

  double get_double(const std::string& key, double fallback) const {
    auto it = overrides.find(key);
    return it == overrides.end() ? fallback : std::stod(it->second);
  }
  uint64_t get_u64(const std::string& key, uint64_t fallback) const {
    auto it = overrides.find(key);
    return it == overrides.end() ? fallback : std::stoull(it->second);
  }
  int64_t get_i64(const std::string& key, int64_t fallback) const {
    auto it = overrides.find(key);
    return it == overrides.end() ? fallback : std::stoll(it->second);
  }
  Ratio get_ratio(const std::string& key, const Ratio& fallback) const {
    auto it = overrides.find(key);
    return it == overrides.end() ? fallback : Ratio::from_decimal(it->second);
  }
  std::string get_str(const std::string& key, const std::string& fallback) const {
    auto it = overrides.find(key);
    return it == overrides.end() ? fallback : it->second;
  }
};

const std::set<std::string>& known_override_keys() {
  static const std::set<std::string> keys{
      "perf.block_time_s", "perf.tx_per_block", "perf.cross_shard_reduction", "perf.shards",
      "perf.num_runs", "perf.std_factor", "perf.mode",
      "latency.samples", "latency.cross_shard_fraction", "latency.jitter_std_fraction",
      "storage.tx_per_day_per_shard", "storage.shards", "storage.retained_bytes_per_tx",
      "storage.compression_ratio", "storage.physical",
      "attack.total_stake", "attack.alpha", "attack.fee_rate", "attack.delta",
      "attack.block_reward",
      "sim.shards", "sim.validators", "sim.blocks", "sim.block_time_s", "sim.epoch_blocks",
      "sim.swap_probability", "sim.txs_per_block", "sim.message_loss_prob",
      "sim.delay_jitter_frac", "sim.double_sign_prob", "sim.adversary_fraction",
      "sim.genesis_funding",
      "demo.amount", "demo.tier_level"};
  return keys;
}

const std::set<std::string>& known_scenarios() {
  static const std::set<std::string> names{"simulate",      "perf-throughput", "perf-latency",
                                           "perf-storage",  "attack-cost",     "ledger-demo",
                                           "offline-demo"};
  return names;
}

std::string json_scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<uint64_t>());
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(17) << v.get<double>();
    return os.str();
  }
  throw UsageError("override values must be scalars");
}

// Strict schema: any key outside the documented set is an error.
void load_config_file(const std::string& path, Settings& settings) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config parse error: ") + e.what());
  }
  if (!config.is_object()) throw UsageError("config root must be an object");
  for (const auto& [key, value] : config.items()) {
    if (key == "scenario") {
      std::string s = value.get<std::string>();
      if (!known_scenarios().contains(s)) throw UsageError("unknown scenario: " + s);
      settings.scenario = s;
    } else if (key == "seed") {
      settings.seed = value.get<uint64_t>();
    } else if (key == "format") {
      settings.format = value.get<std::string>();
    } else if (key == "out") {
      settings.out_dir = value.get<std::string>();
    } else if (key == "overrides") {
      if (!value.is_object()) throw UsageError("overrides must be an object");
      for (const auto& [okey, oval] : value.items()) {
        if (!known_override_keys().contains(okey)) {
          throw UsageError("unknown override key: " + okey);
        }
        settings.set(okey, json_scalar_to_string(oval));
      }
    } else if (key == "config_digest" || key == "outputs") {
      // Manifest echo fields; ignored so a manifest replays as a config.
    } else {
      throw UsageError("unknown config key: " + key);
    }
  }
}

// The output directory is environmental, not part of the scenario; leaving it
// out keeps reports byte-identical wherever they land.
json settings_to_json(const Settings& s) {
  json overrides = json::object();
  for (const auto& [k, v] : s.overrides) overrides[k] = v;
  return json{{"scenario", s.scenario},
              {"seed", s.seed},
              {"format", s.format},
              {"overrides", overrides}};
}

struct ReportWriter {
  fs::path dir;
  std::vector<std::string> outputs;

  explicit ReportWriter(const std::string& out_dir) : dir(out_dir) { fs::create_directories(dir); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << content;
    outputs.push_back(name);
  }

  void finish(const Settings& settings) {
    json manifest = settings_to_json(settings);
    std::string cfg = manifest.dump();
    manifest["config_digest"] = crypto::hash(to_bytes(cfg)).hex();
    manifest["outputs"] = outputs;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
  }
};

std::string wrap_report(const Settings& settings, const std::string& result_json) {
  return "{\"config\":" + settings_to_json(settings).dump() + ",\"result\":" + result_json + "}\n";
}

std::string text_from_json(const std::string& result_json) {
  json j = json::parse(result_json);
  std::ostringstream os;
  for (const auto& [k, v] : j.items()) os << k << ": " << v.dump() << "\n";
  return os.str();
}

std::string csv_from_json(const std::string& result_json) {
  json j = json::parse(result_json);
  std::ostringstream header, row;
  bool first = true;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_primitive()) continue;
    if (!first) {
      header << ",";
      row << ",";
    }
    first = false;
    header << k;
    row << (v.is_string() ? v.get<std::string>() : v.dump());
  }
  return header.str() + "\n" + row.str() + "\n";
}

void emit(ReportWriter& writer, const Settings& settings, const std::string& result_json) {
  writer.write("report.json", wrap_report(settings, result_json));
  if (settings.format == "csv") writer.write("report.csv", csv_from_json(result_json));
  if (settings.format == "text") writer.write("report.txt", text_from_json(result_json));
}

// --- scenario runners ---------------------------------------------------

perf::ThroughputParams throughput_params_from(const Settings& s) {
  perf::ThroughputParams p;
  p.block_time_s = s.get_double("perf.block_time_s", p.block_time_s);
  p.tx_per_block = s.get_double("perf.tx_per_block", p.tx_per_block);
  p.cross_shard_reduction = s.get_double("perf.cross_shard_reduction", p.cross_shard_reduction);
  p.shards = static_cast<uint32_t>(s.get_u64("perf.shards", p.shards));
  p.num_runs = static_cast<uint32_t>(s.get_u64("perf.num_runs", p.num_runs));
  p.std_factor = s.get_double("perf.std_factor", p.std_factor);
  std::string mode = s.get_str("perf.mode", "independent");
  if (mode == "independent") {
    p.mode = perf::CorrelationMode::Independent;
  } else if (mode == "common-shock") {
    p.mode = perf::CorrelationMode::CommonShock;
  } else {
    throw UsageError("perf.mode must be independent or common-shock");
  }
  return p;
}

void run_perf_throughput(const Settings& settings, ReportWriter& writer) {
  perf::ThroughputParams p = throughput_params_from(settings);
  perf::SimResult r = perf::throughput_model(p, settings.seed);
  emit(writer, settings, r.to_json());
  writer.write("samples.csv", r.samples_csv());
}

void run_perf_latency(const Settings& settings, ReportWriter& writer) {
  perf::LatencyParams p;
  p.cross_shard_fraction = settings.get_double("latency.cross_shard_fraction", p.cross_shard_fraction);
  p.jitter_std_fraction = settings.get_double("latency.jitter_std_fraction", p.jitter_std_fraction);
  uint64_t samples = settings.get_u64("latency.samples", 100'000);
  perf::LatencyReport r = perf::latency_model(p, samples, settings.seed);
  emit(writer, settings, r.to_json());
}

void run_perf_storage(const Settings& settings, ReportWriter& writer) {
  perf::StorageParams p;
  if (settings.get_str("storage.physical", "false") == "true") p = perf::StorageParams::physical();
  p.tx_per_day_per_shard = settings.get_double("storage.tx_per_day_per_shard", p.tx_per_day_per_shard);
  p.shards = static_cast<uint32_t>(settings.get_u64("storage.shards", p.shards));
  p.retained_bytes_per_tx = settings.get_double("storage.retained_bytes_per_tx", p.retained_bytes_per_tx);
  p.compression_ratio = settings.get_double("storage.compression_ratio", p.compression_ratio);
  perf::StorageReport r = perf::storage_model(p);
  emit(writer, settings, r.to_json());
}

void run_attack_cost(const Settings& settings, ReportWriter& writer) {
  consensus::ConsensusParams params;
  params.alpha_weight = settings.get_ratio("attack.alpha", params.alpha_weight);
  params.fee_rate = settings.get_ratio("attack.fee_rate", params.fee_rate);
  int64_t total_stake = settings.get_i64("attack.total_stake", 100'000'000);
  Ratio delta = settings.get_ratio("attack.delta", Ratio(1, 100));
  int64_t reward = settings.get_i64("attack.block_reward", 5'000);
  consensus::AttackCostReport r = consensus::attack_cost(total_stake, params, delta, reward);
  emit(writer, settings, r.to_json());
}

void run_simulate(const Settings& settings, ReportWriter& writer) {
  net::SimConfig cfg;
  cfg.net.shard_count = static_cast<uint32_t>(settings.get_u64("sim.shards", 4));
  cfg.validators = static_cast<uint32_t>(settings.get_u64("sim.validators", 16));
  cfg.blocks_per_shard = settings.get_u64("sim.blocks", 100);
  cfg.net.block_time_s = settings.get_double("sim.block_time_s", cfg.net.block_time_s);
  cfg.epoch_blocks = static_cast<uint32_t>(settings.get_u64("sim.epoch_blocks", 30));
  cfg.swap_probability = settings.get_double("sim.swap_probability", cfg.swap_probability);
  cfg.txs_per_block_target = static_cast<uint32_t>(settings.get_u64("sim.txs_per_block", cfg.txs_per_block_target));
  cfg.net.message_loss_prob = settings.get_double("sim.message_loss_prob", cfg.net.message_loss_prob);
  cfg.net.delay_jitter_frac = settings.get_double("sim.delay_jitter_frac", cfg.net.delay_jitter_frac);
  cfg.double_sign_prob = settings.get_double("sim.double_sign_prob", 0.02);
  cfg.adversary_fraction = settings.get_double("sim.adversary_fraction", cfg.adversary_fraction);
  cfg.genesis_funding = settings.get_i64("sim.genesis_funding", cfg.genesis_funding);
  cfg.seed = settings.seed;

  net::SimReport report = net::run_simulation(cfg);
  emit(writer, settings, report.to_json());
  writer.write("events.jsonl", report.event_log_jsonl);
  if (!report.conservation_ok || !report.atomicity_ok) {
    throw std::runtime_error("simulation audit failed: conservation=" +
                             std::string(report.conservation_ok ? "ok" : "VIOLATED") +
                             " atomicity=" + std::string(report.atomicity_ok ? "ok" : "VIOLATED"));
  }
}

void run_ledger_demo(const Settings& settings, ReportWriter& writer) {
  Rng rng(settings.seed);
  ledger::LedgerState state;

  issuance::OracleConfig ocfg;
  std::vector<crypto::KeyPair> signers;
  for (int i = 0; i < 3; ++i) signers.push_back(crypto::generate_keypair(rng, crypto::dilithium2()));
  for (const auto& kp : signers) ocfg.signer_pks.push_back(kp.public_key);
  ocfg.threshold = 2;
  issuance::Oracle oracle(ocfg);

  ledger::Wallet alice, bob;
  alice.keys = crypto::generate_keypair(rng, crypto::dilithium2());
  bob.keys = crypto::generate_keypair(rng, crypto::dilithium2());

  int64_t deposit = settings.get_i64("demo.amount", 1'000'000);
  Bytes stmt = oracle.mint_statement(deposit, as_view(alice.keys.public_key));
  std::vector<issuance::Approval> approvals;
  for (int i = 0; i < 2; ++i) approvals.push_back({signers[i].public_key, crypto::sign(stmt, signers[i])});
  const ledger::UtxoToken& minted =
      oracle.mint(state, deposit, approvals, as_view(alice.keys.public_key), rng);
  alice.grant(minted.token_id, alice.keys);

  int64_t fee = ledger::default_fee(deposit);
  ledger::PaymentOutput pay{bob.keys.public_key, deposit - fee};
  ledger::BuiltTransaction built =
      ledger::create_transaction(state, alice, std::span<const ledger::PaymentOutput>(&pay, 1), fee, rng);
  ledger::Verdict verdict = ledger::validate_transaction(state, built.tx);
  ledger::apply_transaction(state, built.tx);
  ledger::Verdict replay = ledger::validate_transaction(state, built.tx);

  std::ostringstream result;
  result << "{\"minted\":" << deposit << ",\"fee_charged\":" << fee << ",\"first_verdict\":\""
         << ledger::to_string(verdict) << "\",\"replay_verdict\":\"" << ledger::to_string(replay)
         << "\",\"supply_after\":" << state.total_supply
         << ",\"audit_chain_ok\":" << (oracle.verify_chain() ? "true" : "false") << "}";
  emit(writer, settings, result.str());
  writer.write("ledger_snapshot.json", state.to_json() + "\n");
  writer.write("oracle_audit.jsonl", oracle.export_audit_jsonl());
}

void run_offline_demo(const Settings& settings, ReportWriter& writer) {
  Rng rng(settings.seed);
  ledger::LedgerState chain;
  offline::TierTable tiers = offline::TierTable::standard();
  uint32_t tier_level = static_cast<uint32_t>(settings.get_u64("demo.tier_level", 0));
  int64_t amount = settings.get_i64("demo.amount", 300);

  offline::DeviceState alice = offline::DeviceState::create(1, crypto::generate_keypair(rng, crypto::dilithium2()));
  offline::DeviceState bob = offline::DeviceState::create(2, crypto::generate_keypair(rng, crypto::dilithium2()));
  ledger::mint_token(chain, amount * 2, as_view(alice.wallet.keys.public_key), as_view(rng.bytes(32)));
  alice.sync_from(chain);
  bob.sync_from(chain);

  offline::OfflineVoucher voucher = offline::offline_transfer(alice, bob, amount, tiers.at(tier_level), rng);
  offline::EncodedVoucher qr = offline::encode_voucher(voucher, offline::Transport::QR);
  offline::OfflineVoucher decoded = offline::decode_voucher(qr);
  bool transport_ok = decoded.voucher_id == voucher.voucher_id;

  offline::ReconcileReport bob_report = offline::reconcile(bob, chain);
  offline::ReconcileReport alice_report = offline::reconcile(alice, chain);

  std::ostringstream result;
  result << "{\"voucher_id\":\"" << voucher.voucher_id.hex() << "\",\"amount\":" << amount
         << ",\"qr_frames\":" << qr.frames.size()
         << ",\"transport_roundtrip_ok\":" << (transport_ok ? "true" : "false")
         << ",\"bob_applied\":" << bob_report.applied.size()
         << ",\"alice_applied\":" << alice_report.applied.size()
         << ",\"bob_balance\":" << bob.spendable() << ",\"alice_balance\":" << alice.spendable()
         << ",\"ledger_supply\":" << chain.total_supply << "}";
  emit(writer, settings, result.str());
}

void dispatch(const Settings& settings) {
  ReportWriter writer(settings.out_dir);
  if (settings.scenario == "perf-throughput") {
    run_perf_throughput(settings, writer);
  } else if (settings.scenario == "perf-latency") {
    run_perf_latency(settings, writer);
  } else if (settings.scenario == "perf-storage") {
    run_perf_storage(settings, writer);
  } else if (settings.scenario == "attack-cost") {
    run_attack_cost(settings, writer);
  } else if (settings.scenario == "simulate") {
    run_simulate(settings, writer);
  } else if (settings.scenario == "ledger-demo") {
    run_ledger_demo(settings, writer);
  } else if (settings.scenario == "offline-demo") {
    run_offline_demo(settings, writer);
  } else {
    throw UsageError("no scenario selected: give a subcommand or a config with one");
  }
  writer.finish(settings);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QRPL protocol simulator and performance models"};
  app.require_subcommand(0, 1);

  std::string config_path;
  Settings settings;
  bool seed_given = false;
  app.add_option("--config", config_path, "JSON config file (strict schema)");
  auto* seed_opt = app.add_option("--seed", settings.seed, "Deterministic seed");
  auto* out_opt = app.add_option("--out", settings.out_dir, "Output directory");
  auto* format_opt = app.add_option("--format", settings.format, "Report format")
                         ->check(CLI::IsMember({"json", "csv", "text"}));

  // Per-scenario flags land in this staging map; only flags the user actually
  // passed override the config file.
  std::map<std::string, std::string> flag_values;
  auto stage = [&flag_values](const std::string& key) {
    return [&flag_values, key](const std::string& value) { flag_values[key] = value; };
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Run the multi-shard protocol simulation");
  simulate->fallthrough();
  simulate->add_option_function<std::string>("--shards", stage("sim.shards"));
  simulate->add_option_function<std::string>("--validators", stage("sim.validators"));
  simulate->add_option_function<std::string>("--blocks", stage("sim.blocks"));
  simulate->add_option_function<std::string>("--block-time", stage("sim.block_time_s"));
  simulate->add_option_function<std::string>("--epoch-blocks", stage("sim.epoch_blocks"));
  simulate->add_option_function<std::string>("--swap-probability", stage("sim.swap_probability"));
  simulate->add_option_function<std::string>("--txs-per-block", stage("sim.txs_per_block"));
  simulate->add_option_function<std::string>("--message-loss", stage("sim.message_loss_prob"));
  simulate->add_option_function<std::string>("--delay-jitter", stage("sim.delay_jitter_frac"));
  simulate->add_option_function<std::string>("--double-sign-prob", stage("sim.double_sign_prob"));
  simulate->add_option_function<std::string>("--adversary-fraction", stage("sim.adversary_fraction"));

  CLI::App* perf_cmd = app.add_subcommand("perf", "Performance models");
  perf_cmd->require_subcommand(1);
  perf_cmd->fallthrough();
  CLI::App* thr = perf_cmd->add_subcommand("throughput", "Block-level throughput Monte Carlo");
  thr->fallthrough();
  thr->add_option_function<std::string>("--runs", stage("perf.num_runs"));
  thr->add_option_function<std::string>("--std-factor", stage("perf.std_factor"));
  thr->add_option_function<std::string>("--tx-per-block", stage("perf.tx_per_block"));
  thr->add_option_function<std::string>("--shards", stage("perf.shards"));
  thr->add_option_function<std::string>("--mode", stage("perf.mode"));
  CLI::App* lat = perf_cmd->add_subcommand("latency", "Per-transaction latency decomposition");
  lat->fallthrough();
  lat->add_option_function<std::string>("--samples", stage("latency.samples"));
  lat->add_option_function<std::string>("--cross-shard-fraction", stage("latency.cross_shard_fraction"));
  lat->add_option_function<std::string>("--jitter", stage("latency.jitter_std_fraction"));
  CLI::App* sto = perf_cmd->add_subcommand("storage", "Annual storage arithmetic");
  sto->fallthrough();
  sto->add_option_function<std::string>("--tx-per-day", stage("storage.tx_per_day_per_shard"));
  sto->add_option_function<std::string>("--shards", stage("storage.shards"));
  sto->add_option_function<std::string>("--retained-bytes", stage("storage.retained_bytes_per_tx"));
  sto->add_option_function<std::string>("--compression", stage("storage.compression_ratio"));
  sto->add_flag_function("--physical", [&flag_values](int64_t) { flag_values["storage.physical"] = "true"; });

  CLI::App* attack = app.add_subcommand("attack-cost", "Activity-score attack economics");
  attack->fallthrough();
  attack->add_option_function<std::string>("--total-stake", stage("attack.total_stake"));
  attack->add_option_function<std::string>("--alpha", stage("attack.alpha"));
  attack->add_option_function<std::string>("--fee-rate", stage("attack.fee_rate"));
  attack->add_option_function<std::string>("--delta", stage("attack.delta"));
  attack->add_option_function<std::string>("--block-reward", stage("attack.block_reward"));

  CLI::App* ldemo = app.add_subcommand("ledger-demo", "Mint, transfer, validate, replay");
  ldemo->fallthrough();
  ldemo->add_option_function<std::string>("--amount", stage("demo.amount"));
  CLI::App* odemo = app.add_subcommand("offline-demo", "Offline voucher round trip");
  odemo->fallthrough();
  odemo->add_option_function<std::string>("--amount", stage("demo.amount"));
  odemo->add_option_function<std::string>("--tier-level", stage("demo.tier_level"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  seed_given = seed_opt->count() > 0;

  try {
    // Layering: config file first, then CLI flags on top.
    uint64_t cli_seed = settings.seed;
    std::string cli_out = settings.out_dir, cli_format = settings.format;
    if (!config_path.empty()) load_config_file(config_path, settings);
    if (seed_given) settings.seed = cli_seed;
    if (out_opt->count() > 0) settings.out_dir = cli_out;
    if (format_opt->count() > 0) settings.format = cli_format;
    for (const auto& [k, v] : flag_values) settings.set(k, v);

    if (simulate->parsed()) settings.scenario = "simulate";
    if (perf_cmd->parsed()) {
      if (thr->parsed()) settings.scenario = "perf-throughput";
      if (lat->parsed()) settings.scenario = "perf-latency";
      if (sto->parsed()) settings.scenario = "perf-storage";
    }
    if (attack->parsed()) settings.scenario = "attack-cost";
    if (ldemo->parsed()) settings.scenario = "ledger-demo";
    if (odemo->parsed()) settings.scenario = "offline-demo";
    if (settings.scenario.empty()) {
      throw UsageError("no scenario: pass a subcommand or --config with a scenario");
    }

    dispatch(settings);
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "{\"error\":\"usage\",\"detail\":" << json(e.what()).dump() << "}\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"scenario\",\"detail\":" << json(e.what()).dump() << "}\n";
    return kExitScenarioFailure;
  }
}
