// idks — streaming anomaly detection with an incrementally updated
// isolation distributional kernel. Subcommands: run, bench, verify, sweep.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "idks/eval.hpp"
#include "idks/io.hpp"
#include "idks/snapshot.hpp"
#include "idks/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// sub-seed lanes derived from the master --seed
constexpr std::uint64_t kLaneSynth = 1;
constexpr std::uint64_t kLaneShuffle = 2;
constexpr std::uint64_t kLaneStream = 3;

struct InputOptions {
  std::string input_path;
  std::string synth;  // "two-cluster"
  std::size_t synth_n = 100000;
  double anomaly_rate = 0.05;
  double cluster_sigma = 0.5;
  std::string label_name;
  int label_index = -1;
  bool no_header = false;
  std::string normalize = "none";
  bool shuffle = false;
};

void add_input_flags(CLI::App* cmd, InputOptions& in) {
  auto* input = cmd->add_option("--input", in.input_path, "CSV dataset (features then label)");
  auto* synth = cmd->add_option("--synth", in.synth, "synthetic stream generator")
                    ->check(CLI::IsMember({"two-cluster"}));
  input->excludes(synth);
  cmd->add_option("--n", in.synth_n, "synthetic stream length");
  cmd->add_option("--anomaly-rate", in.anomaly_rate, "synthetic anomaly rate");
  cmd->add_option("--sigma", in.cluster_sigma, "synthetic cluster stddev");
  cmd->add_option("--label-col", in.label_name, "label column name (CSV with header)");
  cmd->add_option("--label-index", in.label_index, "label column index (default: last)");
  cmd->add_flag("--no-header", in.no_header, "CSV has no header row");
  cmd->add_option("--normalize", in.normalize, "feature scaling fitted on the first window")
      ->check(CLI::IsMember({"none", "minmax"}));
  cmd->add_flag("--shuffle", in.shuffle, "randomly permute the dataset before the run");
}

idks::LabeledDataset load_input(const InputOptions& in, std::size_t omega, std::uint64_t seed,
                                json& manifest_input) {
  idks::LabeledDataset ds;
  if (!in.input_path.empty()) {
    idks::CsvOptions opts;
    opts.has_header = !in.no_header;
    opts.label_name = in.label_name;
    opts.label_index = in.label_index;
    opts.normalize =
        in.normalize == "minmax" ? idks::Normalize::kMinMaxFirstWindow : idks::Normalize::kNone;
    opts.first_window = omega;
    ds = idks::load_csv(in.input_path, opts);
    manifest_input = {{"kind", "csv"},
                      {"path", in.input_path},
                      {"normalize", in.normalize},
                      {"fingerprint", idks::hex64(idks::fingerprint_file(in.input_path))}};
  } else if (in.synth == "two-cluster") {
    idks::TwoClusterSpec spec;
    spec.n = in.synth_n;
    spec.anomaly_rate = in.anomaly_rate;
    spec.cluster_sigma = in.cluster_sigma;
    spec.seed = idks::split_seed(seed, kLaneSynth);
    ds = idks::gen_two_cluster(spec);
    manifest_input = {{"kind", "two-cluster"},
                      {"n", spec.n},
                      {"anomaly_rate", spec.anomaly_rate},
                      {"cluster_sigma", spec.cluster_sigma},
                      {"fingerprint", idks::hex64(idks::fingerprint_dataset(ds))}};
  } else {
    throw idks::ParameterError("no input: pass --input PATH or --synth two-cluster");
  }
  if (in.shuffle) {
    ds = idks::shuffle_dataset(ds, idks::split_seed(seed, kLaneShuffle));
    manifest_input["shuffled"] = true;
  }
  return ds;
}

fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("IDKS_OUT_DIR"); env && *env) return env;
  return "out";
}

void write_manifest(const fs::path& dir, const std::string& command, const json& parameters,
                    std::uint64_t seed, const json& input, const std::string& started_at,
                    const std::vector<std::string>& outputs) {
  json m{{"tool", "idks"},
         {"version", idks::kVersion},
         {"command", command},
         {"parameters", parameters},
         {"seed", seed},
         {"input", input},
         {"started_at", started_at},
         {"finished_at", idks::iso8601_utc_now()},
         {"outputs", outputs}};
  idks::write_text_file(m.dump(2) + "\n", (dir / "manifest.json").string());
}

int cmd_run(const InputOptions& in, idks::StreamConfig cfg, std::uint64_t seed,
            const std::string& out_flag, bool ndjson, bool with_sliding_auc,
            std::size_t auc_stride, const std::string& snapshot_path,
            const std::string& dump_dataset) {
  cfg.validate();
  const std::string started_at = idks::iso8601_utc_now();
  json manifest_input;
  const idks::LabeledDataset ds = load_input(in, cfg.omega, seed, manifest_input);
  if (!dump_dataset.empty()) idks::write_csv(ds, dump_dataset);

  cfg.seed = idks::split_seed(seed, kLaneStream);
  const idks::RunResult run = idks::run_stream(ds, cfg);

  const fs::path dir = resolve_out_dir(out_flag);
  fs::create_directories(dir);
  std::vector<std::string> outputs{"scores.csv", "metrics.json"};
  idks::write_scores_csv(run.records, (dir / "scores.csv").string());
  if (ndjson) {
    idks::write_scores_ndjson(run.records, (dir / "scores.ndjson").string());
    outputs.push_back("scores.ndjson");
  }

  json metrics = idks::metrics_to_json(run.metrics, cfg);
  metrics["auc"] = idks::records_auc(run.records);
  {
    std::vector<idks::ScoreRecord> post_warmup;
    for (const auto& r : run.records)
      if (r.scored_at_step > 0) post_warmup.push_back(r);
    bool two_class = false;
    for (std::size_t i = 1; i < post_warmup.size(); ++i)
      if (post_warmup[i].label != post_warmup[0].label) two_class = true;
    if (two_class) metrics["auc_excluding_warmup"] = idks::records_auc(post_warmup);
  }
  idks::write_text_file(metrics.dump(2) + "\n", (dir / "metrics.json").string());

  if (with_sliding_auc) {
    const auto points =
        idks::sliding_auc(run.records, cfg.omega, auc_stride == 0 ? cfg.step : auc_stride);
    idks::write_auc_csv(points, (dir / "auc.csv").string());
    outputs.push_back("auc.csv");
  }
  if (!snapshot_path.empty()) {
    // rebuild deterministically to snapshot the final model state
    idks::Rng rng(cfg.seed);
    if (ds.size() >= cfg.omega && cfg.mode != idks::Mode::kOffline) {
      idks::Model model = idks::Model::init(ds.view(0, cfg.omega), cfg.psi, cfg.t, rng);
      std::size_t pos = cfg.omega;
      while (pos < ds.size()) {
        const std::size_t l = std::min(cfg.step, ds.size() - pos);
        if (cfg.mode == idks::Mode::kIncremental)
          idks::update_incremental(model, ds.view(pos, l), rng, cfg.policy);
        else
          idks::update_retrain(model, ds.view(pos, l), rng);
        pos += l;
      }
      idks::Snapshot::save_file(model, snapshot_path);
      outputs.push_back(snapshot_path);
    } else {
      std::cerr << "warning: no windowed model to snapshot\n";
    }
  }

  json params{{"mode", idks::mode_name(cfg.mode)}, {"window", cfg.omega},
              {"step", cfg.step},                  {"psi", cfg.psi},
              {"t", cfg.t},                        {"retrain_every", cfg.retrain_every}};
  write_manifest(dir, "run", params, seed, manifest_input, started_at, outputs);
  std::cout << "wrote " << (dir / "scores.csv").string() << " (" << run.records.size()
            << " records), auc=" << metrics["auc"].get<double>() << "\n";
  return 0;
}

int cmd_bench(const InputOptions& in, const std::vector<std::size_t>& omegas,
              const std::vector<std::string>& modes, std::size_t step, std::uint32_t psi,
              std::uint32_t t, std::size_t repeats, std::uint64_t seed,
              const std::string& out_flag) {
  if (omegas.empty() || modes.empty()) throw idks::ParameterError("bench: empty config grid");
  const std::string started_at = idks::iso8601_utc_now();
  const std::size_t max_omega = *std::max_element(omegas.begin(), omegas.end());
  json manifest_input;
  const idks::LabeledDataset ds = load_input(in, max_omega, seed, manifest_input);

  std::vector<idks::StreamConfig> grid;
  for (const std::string& mode : modes)
    for (const std::size_t omega : omegas) {
      idks::StreamConfig cfg;
      cfg.omega = omega;
      cfg.step = step;
      cfg.psi = psi;
      cfg.t = t;
      cfg.mode = idks::parse_mode(mode);
      cfg.validate();
      grid.push_back(cfg);
    }

  const auto rows = idks::bench_runtime(grid, ds, repeats, idks::split_seed(seed, kLaneStream));

  const fs::path dir = resolve_out_dir(out_flag);
  fs::create_directories(dir);
  idks::write_bench_csv(rows, (dir / "bench.csv").string());
  json params{{"omegas", omegas}, {"modes", modes},     {"step", step},
              {"psi", psi},       {"t", t},             {"repeats", repeats}};
  write_manifest(dir, "bench", params, seed, manifest_input, started_at, {"bench.csv"});

  for (const auto& r : rows)
    if (r.is_median)
      std::cout << idks::mode_name(r.mode) << " omega=" << r.omega
                << " median_update_s=" << r.median_update_s << " auc=" << r.auc << "\n";
  return 0;
}

int cmd_verify(std::size_t omega, std::uint32_t psi, std::size_t step, std::size_t slides,
               std::uint64_t trials, std::uint64_t seed, const std::string& sabotage,
               std::size_t eq_n, std::size_t eq_omega, std::size_t eq_step, std::uint32_t eq_psi,
               std::uint32_t eq_t, const std::string& out_flag) {
  const auto policy = sabotage.empty() ? idks::ReplacementPolicy::kUniform
                                       : idks::ReplacementPolicy::kNewestOnly;

  const auto uni = idks::uniformity_test(omega, psi, step, slides, trials, seed, policy);
  std::cout << "uniformity: chi2=" << uni.chi_square << " dof=" << uni.dof
            << " p=" << uni.p_value << " subsets=" << uni.n_subsets << " trials=" << uni.trials
            << (sabotage.empty() ? "" : " [sabotage: " + sabotage + "]")
            << " -> " << (uni.pass ? "PASS" : "FAIL") << "\n";

  idks::TwoClusterSpec spec;
  spec.n = eq_n;
  spec.seed = idks::split_seed(seed, kLaneSynth);
  const auto ds = idks::gen_two_cluster(spec);
  idks::StreamConfig cfg;
  cfg.omega = eq_omega;
  cfg.step = eq_step;
  cfg.psi = eq_psi;
  cfg.t = eq_t;
  cfg.seed = idks::split_seed(seed, kLaneStream);
  const auto eq = idks::verify_incremental_equivalence(ds, cfg);
  std::cout << "equivalence: updates=" << eq.updates_checked
            << " assignment_mismatches=" << eq.assignment_mismatches
            << " count_mismatches=" << eq.count_mismatches
            << " max_score_rel_err=" << eq.max_score_rel_err << " -> "
            << (eq.pass ? "PASS" : "FAIL") << "\n";

  if (!out_flag.empty()) {
    const fs::path dir = resolve_out_dir(out_flag);
    fs::create_directories(dir);
    json report{{"uniformity",
                 {{"chi_square", uni.chi_square},
                  {"dof", uni.dof},
                  {"p_value", uni.p_value},
                  {"n_subsets", uni.n_subsets},
                  {"trials", uni.trials},
                  {"sabotage", sabotage},
                  {"pass", uni.pass}}},
                {"equivalence",
                 {{"updates", eq.updates_checked},
                  {"assignment_mismatches", eq.assignment_mismatches},
                  {"count_mismatches", eq.count_mismatches},
                  {"max_score_rel_err", eq.max_score_rel_err},
                  {"pass", eq.pass}}}};
    idks::write_text_file(report.dump(2) + "\n", (dir / "verify.json").string());
  }
  return (uni.pass && eq.pass) ? 0 : 4;
}

int cmd_sweep(const InputOptions& in, const std::vector<std::uint32_t>& psis, std::size_t omega,
              std::size_t step, std::uint32_t t, std::uint64_t seed,
              const std::string& out_flag) {
  if (psis.empty()) throw idks::ParameterError("sweep: empty psi list");
  const std::string started_at = idks::iso8601_utc_now();
  json manifest_input;
  const idks::LabeledDataset ds = load_input(in, omega, seed, manifest_input);

  idks::StreamConfig base;
  base.omega = omega;
  base.step = step;
  base.t = t;
  base.seed = idks::split_seed(seed, kLaneStream);
  for (std::uint32_t psi : psis) {
    idks::StreamConfig probe = base;
    probe.psi = psi;
    probe.validate();
  }

  const auto res = idks::psi_sweep(ds, base, psis);

  const fs::path dir = resolve_out_dir(out_flag);
  fs::create_directories(dir);
  idks::write_sweep_csv(res.rows, (dir / "sweep.csv").string());
  json params{{"psis", psis}, {"window", omega}, {"step", step}, {"t", t}};
  write_manifest(dir, "sweep", params, seed, manifest_input, started_at, {"sweep.csv"});

  double best_auc = 0.0;
  for (const auto& r : res.rows)
    if (r.psi == res.argmax_psi) best_auc = r.auc;
  std::cout << "argmax psi=" << res.argmax_psi << " auc=" << best_auc << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isolation-distributional-kernel streaming anomaly detection"};
  app.set_version_flag("--version", idks::kVersion);
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "score a stream and write scores/metrics/manifest");
  InputOptions run_in;
  add_input_flags(run, run_in);
  idks::StreamConfig run_cfg;
  std::string run_mode = "idks";
  std::uint64_t run_seed = 0;
  std::string run_out;
  std::string run_snapshot;
  bool run_ndjson = false, run_auc = false;
  std::size_t run_auc_stride = 0;
  run->add_option("--mode", run_mode)->check(CLI::IsMember({"idks", "retrain", "offline"}));
  run->add_option("--window", run_cfg.omega, "sliding window size")->capture_default_str();
  run->add_option("--step", run_cfg.step, "update step size")->capture_default_str();
  run->add_option("--psi", run_cfg.psi, "samples per partitioning")->capture_default_str();
  run->add_option("--t", run_cfg.t, "partitionings in the ensemble")->capture_default_str();
  run->add_option("--retrain-every", run_cfg.retrain_every, "retrain cadence in slides");
  run->add_option("--seed", run_seed, "master seed")->capture_default_str();
  run->add_option("--out", run_out, "output directory (default: $IDKS_OUT_DIR or ./out)");
  run->add_flag("--ndjson", run_ndjson, "also write scores.ndjson");
  run->add_flag("--sliding-auc", run_auc, "also write the sliding-AUC series (auc.csv)");
  run->add_option("--auc-stride", run_auc_stride, "sliding-AUC stride (default: step)");
  run->add_option("--snapshot", run_snapshot, "also write the final model snapshot to this path");
  std::string run_dump;
  run->add_option("--dump-dataset", run_dump, "write the (generated/loaded) dataset as CSV");

  // bench
  auto* bench = app.add_subcommand("bench", "runtime/accuracy grid over window sizes and modes");
  InputOptions bench_in;
  add_input_flags(bench, bench_in);
  std::vector<std::size_t> bench_omegas{1024, 2048, 4096, 8192};
  std::vector<std::string> bench_modes{"idks", "retrain"};
  std::size_t bench_step = 100, bench_repeats = 3;
  std::uint32_t bench_psi = 4, bench_t = 100;
  std::uint64_t bench_seed = 0;
  std::string bench_out;
  bench->add_option("--omegas", bench_omegas, "window sizes")->delimiter(',');
  bench->add_option("--modes", bench_modes, "modes to compare")->delimiter(',');
  bench->add_option("--step", bench_step)->capture_default_str();
  bench->add_option("--psi", bench_psi)->capture_default_str();
  bench->add_option("--t", bench_t)->capture_default_str();
  bench->add_option("--repeats", bench_repeats, "seeds per grid cell")->capture_default_str();
  bench->add_option("--seed", bench_seed)->capture_default_str();
  bench->add_option("--out", bench_out);

  // verify
  auto* verify = app.add_subcommand(
      "verify", "chi-square sampling-uniformity test plus incremental-vs-retrain equivalence");
  std::size_t v_omega = 6, v_step = 2, v_slides = 3;
  std::uint32_t v_psi = 2;
  std::uint64_t v_trials = 150000, v_seed = 1;
  std::string v_sabotage, v_out;
  std::size_t v_eq_n = 4000, v_eq_omega = 256, v_eq_step = 25;
  std::uint32_t v_eq_psi = 4, v_eq_t = 10;
  verify->add_option("--omega", v_omega)->capture_default_str();
  verify->add_option("--psi", v_psi)->capture_default_str();
  verify->add_option("--step", v_step)->capture_default_str();
  verify->add_option("--slides", v_slides)->capture_default_str();
  verify->add_option("--trials", v_trials)->capture_default_str();
  verify->add_option("--seed", v_seed)->capture_default_str();
  verify->add_option("--sabotage", v_sabotage, "negative control (expected to fail)")
      ->check(CLI::IsMember({"newest-only"}));
  verify->add_option("--eq-n", v_eq_n, "equivalence-check stream length");
  verify->add_option("--eq-omega", v_eq_omega)->capture_default_str();
  verify->add_option("--eq-step", v_eq_step)->capture_default_str();
  verify->add_option("--eq-psi", v_eq_psi)->capture_default_str();
  verify->add_option("--eq-t", v_eq_t)->capture_default_str();
  verify->add_option("--out", v_out, "also write verify.json to this directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "AUC/time per candidate psi; reports the argmax");
  InputOptions sweep_in;
  add_input_flags(sweep, sweep_in);
  std::vector<std::uint32_t> sweep_psis{2, 4, 8, 16, 32, 64};
  std::size_t sweep_omega = 2048, sweep_step = 100;
  std::uint32_t sweep_t = 100;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  sweep->add_option("--psis", sweep_psis, "candidate psi values")->delimiter(',');
  sweep->add_option("--window", sweep_omega)->capture_default_str();
  sweep->add_option("--step", sweep_step)->capture_default_str();
  sweep->add_option("--t", sweep_t)->capture_default_str();
  sweep->add_option("--seed", sweep_seed)->capture_default_str();
  sweep->add_option("--out", sweep_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0; any parse error is a config error
  }

  try {
    if (run->parsed()) {
      run_cfg.mode = idks::parse_mode(run_mode);
      return cmd_run(run_in, run_cfg, run_seed, run_out, run_ndjson, run_auc, run_auc_stride,
                     run_snapshot, run_dump);
    }
    if (bench->parsed())
      return cmd_bench(bench_in, bench_omegas, bench_modes, bench_step, bench_psi, bench_t,
                       bench_repeats, bench_seed, bench_out);
    if (verify->parsed())
      return cmd_verify(v_omega, v_psi, v_step, v_slides, v_trials, v_seed, v_sabotage, v_eq_n,
                        v_eq_omega, v_eq_step, v_eq_psi, v_eq_t, v_out);
    if (sweep->parsed())
      return cmd_sweep(sweep_in, sweep_psis, sweep_omega, sweep_step, sweep_t, sweep_seed,
                       sweep_out);
  } catch (const idks::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const idks::IngestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
