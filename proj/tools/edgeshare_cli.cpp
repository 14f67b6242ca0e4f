// edgeshare: command-line front end for the edge node.
//
// Exit codes: 0 success, 1 error, 2 ledger tamper detected, 3 transaction
// rejected, 4 not found (filter query), 64 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "edgeshare/bloom.hpp"
#include "edgeshare/error.hpp"
#include "edgeshare/json_io.hpp"
#include "edgeshare/ledger.hpp"
#include "edgeshare/profiler.hpp"
#include "edgeshare/quasigroup.hpp"
#include "edgeshare/secure_zone.hpp"
#include "edgeshare/simnet.hpp"
#include "state_dir.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace edgeshare;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitTamper = 2;
constexpr int kExitRejected = 3;
constexpr int kExitNotFound = 4;
constexpr int kExitUsage = 64;

struct Options {
  std::string state_dir;
  std::string format = "text";
  std::optional<std::uint64_t> seed;

  bool json_mode() const { return format == "json"; }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const Options& opt, const json& payload, const std::string& text) {
  if (opt.json_mode()) {
    std::cout << payload.dump() << '\n';
  } else {
    std::cout << text << '\n';
  }
}

int report_error(const Options& opt, std::string_view code, const std::string& message) {
  if (opt.json_mode()) {
    std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
  } else {
    std::cerr << "error [" << code << "]: " << message << '\n';
  }
  return code == "usage" ? kExitUsage : kExitError;
}

std::uint64_t seed_or_random(const Options& opt) {
  if (opt.seed) return *opt.seed;
  std::array<std::uint8_t, 8> b{};
  secure_random(b);
  std::uint64_t v = 0;
  for (auto x : b) v = v << 8 | x;
  return v;
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return cli::read_file(path);
}

void write_output(const std::string& path, std::string_view contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    cli::write_file(path, contents);
  }
}

ContextId resolve_context(cli::StateDir& state, const std::string& context_hex,
                          const std::string& device) {
  if (!context_hex.empty()) return fixed_from_hex<32>(context_hex);
  if (device.empty()) throw UsageError("either --context or --device is required");
  const IdentityLedger ledger = state.load_ledger();
  for (const auto& e : ledger.entries()) {
    if (e.device_label == device) return e.h2;
  }
  throw Error(ErrorCode::unknown_key, "no ledger entry for device " + device);
}

// ---------------------------------------------------------------------------
// ledger

struct LedgerArgs {
  std::string group = "default";
  std::string p_hex, a1 = "0", a2 = "0", a3 = "0", a4 = "0", a6 = "0";
  bool force = false;
  std::string label;
  std::string file;
  std::string out;
};

int ledger_init(const Options& opt, const LedgerArgs& a) {
  cli::StateDir state(opt.state_dir);
  state.lock();
  if (state.has_ledger() && !a.force) {
    throw Error(ErrorCode::invalid_state, "ledger already exists (use --force to replace it)");
  }
  WeierstrassCurve curve = WeierstrassCurve::default_curve();
  if (!a.p_hex.empty()) {
    curve = WeierstrassCurve(CurveCoefficients{mpz_from_hex(a.p_hex), mpz_from_hex(a.a1),
                                               mpz_from_hex(a.a2), mpz_from_hex(a.a3),
                                               mpz_from_hex(a.a4), mpz_from_hex(a.a6)});
  }
  IdentityLedger ledger(a.group, std::move(curve));
  state.zone();
  state.save_ledger(ledger);
  state.save_zone(&ledger);
  emit(opt, {{"group_id", a.group}, {"entries", 0}}, "initialized ledger for group " + a.group);
  return kExitOk;
}

int ledger_register(const Options& opt, const LedgerArgs& a) {
  cli::StateDir state(opt.state_dir);
  state.lock();
  IdentityLedger ledger = state.load_ledger();
  const LedgerEntry& e = state.zone().register_device(ledger, a.label, seed_or_random(opt));
  const json out = {{"index", e.index}, {"device_label", e.device_label}, {"h1_hex", to_hex(e.h1)},
                    {"h2_hex", to_hex(e.h2)}, {"sequence", e.timestamp.sequence}};
  const std::string text = "registered " + e.device_label + " as entry " + std::to_string(e.index) +
                           "\ndevice id " + to_hex(e.h2);
  state.save_ledger(ledger);
  state.save_zone(&ledger);
  emit(opt, out, text);
  return kExitOk;
}

int ledger_verify(const Options& opt, const LedgerArgs& a) {
  cli::StateDir state(opt.state_dir);
  const fs::path path = a.file.empty() ? state.ledger_path() : fs::path(a.file);
  LedgerReplica parsed;
  try {
    parsed = parse_snapshot(cli::read_file(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::parse_error) throw;
    emit(opt, {{"valid", false}, {"first_bad_index", nullptr}, {"reason", "header"}},
         "INVALID: ledger header is corrupt");
    return kExitTamper;
  }
  const ChainReport report = parsed.verify();
  if (report.valid) {
    emit(opt, {{"valid", true}, {"entries", parsed.entries.size()}},
         "valid: " + std::to_string(parsed.entries.size()) + " entries");
    return kExitOk;
  }
  emit(opt, {{"valid", false}, {"first_bad_index", *report.first_bad_index}},
       "INVALID: first bad entry at index " + std::to_string(*report.first_bad_index));
  return kExitTamper;
}

int ledger_export(const Options& opt, const LedgerArgs& a) {
  cli::StateDir state(opt.state_dir);
  const IdentityLedger ledger = state.load_ledger();
  write_output(a.out, sync_to_cloud(ledger).jsonl);
  return kExitOk;
}

int ledger_sync(const Options& opt, const LedgerArgs&) {
  cli::StateDir state(opt.state_dir);
  state.lock();
  const IdentityLedger ledger = state.load_ledger();
  const LedgerSnapshot snapshot = sync_to_cloud(ledger);
  cli::write_file(state.cloud_ledger_path(), snapshot.jsonl);
  const ChainReport cloud = parse_snapshot(cli::read_file(state.cloud_ledger_path())).verify();
  emit(opt, {{"synced_entries", ledger.entries().size()}, {"cloud_valid", cloud.valid},
             {"path", state.cloud_ledger_path().string()}},
       "synced " + std::to_string(ledger.entries().size()) + " entries to " +
           state.cloud_ledger_path().string());
  return cloud.valid ? kExitOk : kExitTamper;
}

// ---------------------------------------------------------------------------
// keys

struct KeysArgs {
  std::string purpose = "data-encryption";
  std::uint64_t budget = kDefaultUsageBudget;
  std::string key_id;
  std::string context;
  std::string device;
  std::uint32_t order = kDefaultShareOrder;
  std::string share;
  std::string timestamp;
  std::string save_timestamp;
  std::string out;
};

int keys_generate(const Options& opt, const KeysArgs& a) {
  cli::StateDir state(opt.state_dir);
  state.lock();
  const KeyId id = state.zone().generate_key(parse_key_purpose(a.purpose), a.budget, opt.seed);
  state.save_zone();
  emit(opt, {{"key_id", to_hex(id)}, {"purpose", a.purpose}, {"usage_budget", a.budget}}, to_hex(id));
  return kExitOk;
}

int keys_split(const Options& opt, const KeysArgs& a) {
  cli::StateDir state(opt.state_dir);
  state.lock();
  const ContextId context = resolve_context(state, a.context, a.device);
  const KeyId key_id = fixed_from_hex<16>(a.key_id);
  const Distribution dist = state.zone().split_and_distribute(key_id, context, a.order, opt.seed);
  state.save_zone();
  write_output(a.out, to_json(dist.cloud_share).dump(2) + "\n");
  if (!a.out.empty() && a.out != "-") {
    emit(opt, {{"context_id", to_hex(context)}, {"cloud_share", a.out}},
         "cloud share written to " + a.out);
  }
  return kExitOk;
}

int keys_authorize(const Options& opt, const KeysArgs& a) {
  cli::StateDir state(opt.state_dir);
  state.lock();
  const ContextId context = resolve_context(state, a.context, a.device);
  const SealedShare share = sealed_share_from_json(json::parse(read_input(a.share)));
  SecureZone& zone = state.zone();
  const Timestamp ts = a.timestamp.empty() ? state.tsa().issue(context)
                                           : timestamp_from_json(json::parse(cli::read_file(a.timestamp)));
  if (!a.save_timestamp.empty()) cli::write_file(a.save_timestamp, to_json(ts).dump() + "\n");
  const Decision d = zone.authorize_transaction(context, share, ts);
  state.save_zone();
  if (d.accepted) {
    emit(opt, {{"decision", "accepted"}, {"sequence", ts.sequence}}, "accepted");
    return kExitOk;
  }
  const std::string reason(to_string(*d.reason));
  emit(opt, {{"decision", "rejected"}, {"reason", reason}, {"sequence", ts.sequence}}, "rejected");
  std::cerr << "rejected: " << reason << '\n';
  return kExitRejected;
}

int keys_list(const Options& opt) {
  cli::StateDir state(opt.state_dir);
  const json view = state.zone().public_state();
  std::string text;
  for (const auto& k : view.at("keys")) {
    text += k.at("key_id").get<std::string>() + "  " + k.at("purpose").get<std::string>() + "  " +
            k.at("state").get<std::string>() + "  uses " + std::to_string(k.at("uses").get<std::uint64_t>()) +
            "/" + std::to_string(k.at("usage_budget").get<std::uint64_t>()) + "\n";
  }
  if (!text.empty()) text.pop_back();
  emit(opt, view, text.empty() ? "no keys" : text);
  return kExitOk;
}

int keys_retire(const Options& opt, const KeysArgs& a) {
  cli::StateDir state(opt.state_dir);
  state.lock();
  state.zone().retire_key(fixed_from_hex<16>(a.key_id));
  state.save_zone();
  emit(opt, {{"key_id", a.key_id}, {"state", "retired"}}, "retired " + a.key_id);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// qg

struct QgArgs {
  std::uint32_t order = 16;
  std::string table;
  std::string out;
  std::uint32_t samples = 0;
};

int qg_generate(const Options& opt, const QgArgs& a) {
  const std::uint64_t seed = seed_or_random(opt);
  const Quasigroup q = Quasigroup::generate(a.order, seed);
  const json doc = {{"order", q.order()}, {"seed", seed}, {"table", q.rows()}};
  write_output(a.out, doc.dump() + "\n");
  return kExitOk;
}

int qg_check(const Options& opt, const QgArgs& a) {
  const json doc = json::parse(read_input(a.table));
  const json& rows_json = doc.is_object() ? doc.at("table") : doc;
  Table rows;
  try {
    rows = rows_json.get<Table>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::malformed_table, ex.what());
  }
  VerificationMode mode = Exhaustive{};
  if (a.samples > 0) mode = Sampled{a.samples, seed_or_random(opt)};
  const IdentityReport report = verify_parastroph_identities(rows, mode);
  json failures = json::array();
  for (const auto& f : report.failures) failures.push_back({{"identity", f.identity}, {"x", f.x}, {"y", f.y}});
  emit(opt, {{"passed", report.passed}, {"pairs_checked", report.pairs_checked}, {"failures", failures}},
       std::string(report.passed ? "passed" : "FAILED") + ": " + std::to_string(report.pairs_checked) +
           " pairs x 6 identities");
  return report.passed ? kExitOk : kExitError;
}

// ---------------------------------------------------------------------------
// profile

struct ProfileArgs {
  std::string input;
  std::string label;
  double sigmas = 3.0;
};

json report_json(const FitReport& r) {
  json per_family = json::object();
  for (std::size_t f = 0; f < kFamilies.size(); ++f) {
    const double rss = r.per_family_rss[f];
    per_family[std::string(to_string(kFamilies[f]))] = std::isfinite(rss) ? json(rss) : json(nullptr);
  }
  return {{"device_label", r.device_label},
          {"best_family", to_string(r.best_family)},
          {"params", r.params},
          {"rss", r.rss},
          {"per_family_rss", per_family}};
}

int profile_fit(const Options& opt, const ProfileArgs& a) {
  const Sample sample{parse_csv_values(read_input(a.input)), a.label};
  const FitReport r = fit_distribution(sample);
  std::string text = std::string(to_string(r.best_family)) + " params=";
  for (double p : r.params) text += std::to_string(p) + " ";
  text += "rss=" + std::to_string(r.rss);
  emit(opt, report_json(r), text);
  return kExitOk;
}

int profile_outliers(const Options& opt, const ProfileArgs& a) {
  const auto values = parse_csv_values(read_input(a.input));
  const auto idx = detect_outliers(values, a.sigmas);
  std::string text = std::to_string(idx.size()) + " outliers";
  for (auto i : idx) text += "\n" + std::to_string(i) + "\t" + std::to_string(values[i]);
  emit(opt, {{"threshold_sigmas", a.sigmas}, {"indices", idx}}, text);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// filter

struct FilterArgs {
  std::string ids;
  std::string filter;
  std::string id;
  std::string out;
  double fpr = 0.01;
  std::uint64_t expected = 0;
};

int filter_build(const Options& opt, const FilterArgs& a) {
  std::vector<Digest> ids;
  if (!a.ids.empty()) {
    std::istringstream in(read_input(a.ids));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) ids.push_back(fixed_from_hex<32>(line));
    }
  } else {
    cli::StateDir state(opt.state_dir);
    for (const auto& e : state.load_ledger().entries()) ids.push_back(e.h2);
  }
  const std::uint64_t expected = a.expected ? a.expected : std::max<std::uint64_t>(1, ids.size());
  BloomFilter filter = BloomFilter::create(expected, a.fpr);
  for (const auto& id : ids) filter.insert(id);
  const Bytes raw = filter.serialize();
  cli::write_file(a.out, std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
  emit(opt, {{"m", filter.bit_count()}, {"k", filter.hash_count()}, {"n_inserted", filter.inserted()},
             {"estimated_fpr", filter.estimated_fpr()}},
       "filter m=" + std::to_string(filter.bit_count()) + " k=" + std::to_string(filter.hash_count()) +
           " n=" + std::to_string(filter.inserted()));
  return kExitOk;
}

int filter_query(const Options& opt, const FilterArgs& a) {
  const std::string raw = cli::read_file(a.filter);
  const BloomFilter filter = BloomFilter::deserialize(as_bytes(raw));
  const bool hit = filter.contains(fixed_from_hex<32>(a.id));
  emit(opt, {{"maybe_present", hit}}, hit ? "maybe-present" : "absent");
  return hit ? kExitOk : kExitNotFound;
}

// ---------------------------------------------------------------------------
// sim

struct SimArgs {
  std::string scenario;
  std::string log;
  std::string name;
  std::string out_dir = ".";
};

int sim_run(const Options& opt, const SimArgs& a) {
  SimScenario scenario = scenario_from_json(json::parse(read_input(a.scenario)));
  if (opt.seed) scenario.seed = *opt.seed;
  const SimResult result = run_scenario(scenario);
  if (!a.log.empty()) write_output(a.log, result.event_log());
  std::string text = std::string(result.passed ? "PASS" : "FAIL") + " " + scenario.name + ": " +
                     std::to_string(result.events.size()) + " events, attacks detected " +
                     std::to_string(result.attacks_detected) + "/" + std::to_string(result.attacks);
  for (const auto& d : result.diffs) text += "\n  " + d;
  emit(opt, {{"scenario", scenario.name}, {"verdict", result.passed ? "pass" : "fail"},
             {"events", result.events.size()}, {"attacks", result.attacks},
             {"attacks_detected", result.attacks_detected}, {"diffs", result.diffs}},
       text);
  return result.passed ? kExitOk : kExitError;
}

int sim_builtin(const Options& opt, const SimArgs& a) {
  json written = json::array();
  for (const auto& s : builtin_scenarios()) {
    if (!a.name.empty() && s.name != a.name) continue;
    const fs::path path = fs::path(a.out_dir) / (s.name + ".json");
    cli::write_file(path, to_json(s).dump(2) + "\n");
    written.push_back(path.string());
  }
  if (written.empty()) throw UsageError("no built-in scenario named " + a.name);
  std::string text;
  for (const auto& w : written) text += w.get<std::string>() + "\n";
  text.pop_back();
  emit(opt, {{"written", written}}, text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgeshare - edge/cloud identity ledger, verifiable key splitting and simulation"};
  app.require_subcommand(1);
  Options opt;
  const char* env_dir = std::getenv("EDGESHARE_STATE_DIR");
  opt.state_dir = env_dir ? env_dir : ".edgeshare";
  app.add_option("--state-dir", opt.state_dir, "State directory (env EDGESHARE_STATE_DIR)");
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::function<int()> action;
  auto seed_flag = [&](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { opt.seed = s; },
                                            "Deterministic seed");
  };

  // ledger
  LedgerArgs la;
  auto* ledger = app.add_subcommand("ledger", "Hash-chained identity ledger");
  ledger->require_subcommand(1);
  auto* l_init = ledger->add_subcommand("init", "Create an empty ledger for a device group");
  l_init->add_option("--group", la.group, "Group id");
  l_init->add_option("--p", la.p_hex, "Curve prime (hex); default is the built-in 256-bit curve");
  l_init->add_option("--a1", la.a1);
  l_init->add_option("--a2", la.a2);
  l_init->add_option("--a3", la.a3);
  l_init->add_option("--a4", la.a4);
  l_init->add_option("--a6", la.a6);
  l_init->add_flag("--force", la.force, "Replace an existing ledger");
  l_init->callback([&] { action = [&] { return ledger_init(opt, la); }; });
  auto* l_reg = ledger->add_subcommand("register", "Register a device (steps: point, seal, stamp, chain)");
  l_reg->add_option("--label", la.label, "Device label")->required();
  seed_flag(l_reg);
  l_reg->callback([&] { action = [&] { return ledger_register(opt, la); }; });
  auto* l_ver = ledger->add_subcommand("verify", "Verify a ledger file (exit 2 on tamper)");
  l_ver->add_option("--file", la.file, "Ledger JSONL (default: edge ledger)");
  l_ver->callback([&] { action = [&] { return ledger_verify(opt, la); }; });
  auto* l_exp = ledger->add_subcommand("export", "Print the ledger snapshot");
  l_exp->add_option("--out", la.out, "Output file (default stdout)");
  l_exp->callback([&] { action = [&] { return ledger_export(opt, la); }; });
  auto* l_sync = ledger->add_subcommand("sync", "Copy the verified ledger to the cloud location");
  l_sync->callback([&] { action = [&] { return ledger_sync(opt, la); }; });

  // keys
  KeysArgs ka;
  auto* keys = app.add_subcommand("keys", "Secure-zone key lifecycle");
  keys->require_subcommand(1);
  auto* k_gen = keys->add_subcommand("generate", "Generate a managed key");
  k_gen->add_option("--purpose", ka.purpose)
      ->check(CLI::IsMember({"data-encryption", "key-encryption", "point-sealing"}));
  k_gen->add_option("--budget", ka.budget, "Usage budget before rotation");
  seed_flag(k_gen);
  k_gen->callback([&] { action = [&] { return keys_generate(opt, ka); }; });
  auto* k_split = keys->add_subcommand("split", "Split a key into edge and cloud shares");
  k_split->add_option("--key-id", ka.key_id)->required();
  k_split->add_option("--context", ka.context, "Context id (hex)");
  k_split->add_option("--device", ka.device, "Use the ledger id of this device as context");
  k_split->add_option("--order", ka.order, "Quasigroup order");
  k_split->add_option("--out", ka.out, "Cloud share JSON output (default stdout)");
  seed_flag(k_split);
  k_split->callback([&] { action = [&] { return keys_split(opt, ka); }; });
  auto* k_auth = keys->add_subcommand("authorize", "Verify a presented cloud share (exit 3 on reject)");
  k_auth->add_option("--context", ka.context);
  k_auth->add_option("--device", ka.device);
  k_auth->add_option("--share", ka.share, "Cloud share JSON")->required();
  k_auth->add_option("--timestamp", ka.timestamp, "Present this timestamp instead of a fresh one");
  k_auth->add_option("--save-timestamp", ka.save_timestamp, "Write the timestamp used");
  k_auth->callback([&] { action = [&] { return keys_authorize(opt, ka); }; });
  auto* k_list = keys->add_subcommand("list", "Show key metadata");
  k_list->callback([&] { action = [&] { return keys_list(opt); }; });
  auto* k_ret = keys->add_subcommand("retire", "Retire a key");
  k_ret->add_option("--key-id", ka.key_id)->required();
  k_ret->callback([&] { action = [&] { return keys_retire(opt, ka); }; });

  // qg
  QgArgs qa;
  auto* qg = app.add_subcommand("qg", "Quasigroup tools");
  qg->require_subcommand(1);
  auto* q_gen = qg->add_subcommand("generate", "Generate a quasigroup table");
  q_gen->add_option("--order", qa.order)->required();
  q_gen->add_option("--out", qa.out);
  seed_flag(q_gen);
  q_gen->callback([&] { action = [&] { return qg_generate(opt, qa); }; });
  auto* q_chk = qg->add_subcommand("check", "Check the six parastroph identities");
  q_chk->add_option("--table", qa.table, "Table JSON ({\"table\": [[...]]} or [[...]])")->required();
  q_chk->add_option("--samples", qa.samples, "Sample this many pairs instead of all");
  seed_flag(q_chk);
  q_chk->callback([&] { action = [&] { return qg_check(opt, qa); }; });

  // profile
  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Edge data profiling");
  profile->require_subcommand(1);
  auto* p_fit = profile->add_subcommand("fit", "Best-fit distribution by RSS");
  p_fit->add_option("--input", pa.input, "CSV, one value per line")->required();
  p_fit->add_option("--label", pa.label);
  p_fit->callback([&] { action = [&] { return profile_fit(opt, pa); }; });
  auto* p_out = profile->add_subcommand("outliers", "Standard-deviation outliers");
  p_out->add_option("--input", pa.input)->required();
  p_out->add_option("--sigmas", pa.sigmas);
  p_out->callback([&] { action = [&] { return profile_outliers(opt, pa); }; });

  // filter
  FilterArgs fa;
  auto* filter = app.add_subcommand("filter", "Bloom allowlist");
  filter->require_subcommand(1);
  auto* f_build = filter->add_subcommand("build", "Build a filter from ids or the edge ledger");
  f_build->add_option("--ids", fa.ids, "File with one hex device id per line");
  f_build->add_option("--fpr", fa.fpr);
  f_build->add_option("--expected", fa.expected, "Design capacity (default: number of ids)");
  f_build->add_option("--out", fa.out)->required();
  f_build->callback([&] { action = [&] { return filter_build(opt, fa); }; });
  auto* f_query = filter->add_subcommand("query", "Query a device id (exit 4 when absent)");
  f_query->add_option("--filter", fa.filter)->required();
  f_query->add_option("--id", fa.id)->required();
  f_query->callback([&] { action = [&] { return filter_query(opt, fa); }; });

  // sim
  SimArgs sa;
  auto* sim = app.add_subcommand("sim", "Deterministic edge/cloud simulator");
  sim->require_subcommand(1);
  auto* s_run = sim->add_subcommand("run", "Run a scenario file (exit mirrors verdict)");
  s_run->add_option("scenario", sa.scenario)->required();
  s_run->add_option("--log", sa.log, "Write the JSONL event log here");
  seed_flag(s_run);
  s_run->callback([&] { action = [&] { return sim_run(opt, sa); }; });
  auto* s_builtin = sim->add_subcommand("builtin", "Write built-in scenario files");
  s_builtin->add_option("--name", sa.name);
  s_builtin->add_option("--out-dir", sa.out_dir);
  s_builtin->callback([&] { action = [&] { return sim_builtin(opt, sa); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(opt, "usage", e.what());
  }

  try {
    return action();
  } catch (const UsageError& e) {
    return report_error(opt, "usage", e.what());
  } catch (const Error& e) {
    return report_error(opt, to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return report_error(opt, "parse-error", e.what());
  } catch (const std::exception& e) {
    return report_error(opt, "internal", e.what());
  }
}
