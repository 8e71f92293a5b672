#include "blip/cli.hpp"

#include "blip/identities.hpp"
#include "blip/montecarlo.hpp"
#include "blip/particles.hpp"
#include "blip/passage.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

namespace blip::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kWorkersEnv = "BLIP_WORKERS";

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_open_unit(double v, const std::string& name) {
  require(v > 0.0 && v < 1.0, fmt::format("{}: must lie in the open interval (0, 1), got {}", name, v));
}

/// Options shared by every subcommand.
struct Common {
  double p = 0.5;
  std::string seed = "0";
  std::string out;
  std::int64_t workers = 1;

  std::uint64_t seed_value() const {
    try {
      return parse_seed(seed);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("seed: ") + e.what());
    }
  }
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--p", common.p, "Mark probability p (geometric parameter for weights)");
  sub->add_option("--seed", common.seed, "Master seed, decimal or 0x hex");
  sub->add_option("--out", common.out, "Run directory (default runs/<subcommand>-<seed>)");
  sub->add_option("--workers", common.workers, "Worker threads; never changes results")
      ->envname(kWorkersEnv);
}

/// JSON view of a subcommand's resolved options (given or default).
json resolved_options(const CLI::App* sub) {
  json config = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    const std::string& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      std::vector<std::string> parts = opt->results();
      config[name] = fmt::format("{}", fmt::join(parts, ","));
    } else {
      config[name] = opt->get_default_str();
    }
  }
  return config;
}

class RunDirectory {
 public:
  RunDirectory(const std::string& subcommand, const CLI::App* sub, const Common& common)
      : subcommand_(subcommand) {
    dir_ = common.out.empty() ? fs::path("runs") / fmt::format("{}-{}", subcommand, common.seed)
                              : fs::path(common.out);
    fs::create_directories(dir_);
    manifest_ = {{"subcommand", subcommand},
                 {"version", kVersion},
                 {"config", resolved_options(sub)},
                 {"seed", common.seed_value()},
                 {"started_at", utc_now()},
                 {"finished_at", nullptr},
                 {"status", "running"},
                 {"outputs", json::array({"records.jsonl", "summary.csv"})}};
    write_manifest();
  }

  void add_output(const std::string& name) { manifest_["outputs"].push_back(name); }
  void set(const std::string& key, json value) { manifest_[key] = std::move(value); }

  void finish(int exit_code) {
    manifest_["finished_at"] = utc_now();
    manifest_["status"] = exit_code == kExitOk ? "complete" : "failed";
    manifest_["exit_code"] = exit_code;
    write_manifest();
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    return out;
  }

  const fs::path& dir() const { return dir_; }

 private:
  void write_manifest() const {
    const fs::path tmp = dir_ / "manifest.json.tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << manifest_.dump(2) << '\n';
    }
    fs::rename(tmp, dir_ / "manifest.json");
  }

  std::string subcommand_;
  fs::path dir_;
  json manifest_;
};

void write_records(const RunDirectory& run, const std::vector<ReplicaRecord>& records) {
  std::ofstream out = run.open("records.jsonl");
  for (const ReplicaRecord& r : records) {
    const json line = {{"experiment", r.experiment}, {"n", r.n},           {"replica", r.replica},
                       {"value", r.value},           {"seed", r.seed},     {"stream", r.stream}};
    out << line.dump() << '\n';
  }
}

void write_summary(const RunDirectory& run, const std::vector<SampleSummary>& rows) {
  std::ofstream out = run.open("summary.csv");
  out << "n,replicas,mean,se,median,exceedance,ref_value\n";
  for (const SampleSummary& s : rows) {
    out << fmt::format("{},{},{},{},{},{},{}\n", s.n, s.replicas, s.mean, s.se, s.median, s.exceedance,
                       s.ref_value);
  }
}

/// summarize(), also defined for a single sample (se = 0).
SampleSummary summary_of(const std::vector<double>& values, double ref, double epsilon, std::int64_t n) {
  SampleSummary s;
  if (values.size() >= 2) {
    s = summarize(values, ref, epsilon);
  } else if (values.size() == 1) {
    s.replicas = 1;
    s.mean = s.median = values.front();
    s.exceedance = std::abs(values.front() - ref) >= epsilon ? 1.0 : 0.0;
    s.ref_value = ref;
  }
  s.n = n;
  return s;
}

ExperimentConfig base_config(const Common& common) {
  require_open_unit(common.p, "p");
  ExperimentConfig config;
  config.params = ModelParams::from_p(common.p);
  config.seed = common.seed_value();
  config.workers = common.workers;
  return config;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string kind = "blip";
  std::int64_t m = 20;
  std::int64_t n = 20;
  std::int64_t reps = 1;
  std::string convention = "shifted";
};

int run_simulate(const CLI::App* sub, const Common& common, const SimulateOptions& o) {
  require_open_unit(common.p, "p");
  require(o.kind == "blip" || o.kind == "lpp", "kind: expected blip or lpp");
  require(o.convention == "shifted" || o.convention == "unshifted", "convention: expected shifted or unshifted");
  require(o.m >= 1 && o.n >= 1, "m, n: must be positive");
  require(o.reps >= 1, "reps: must be positive");
  const ModelParams params = ModelParams::from_p(common.p);
  const std::uint64_t seed = common.seed_value();
  const std::string experiment = "simulate-" + o.kind;
  const WeightConvention conv = o.convention == "shifted" ? WeightConvention::shifted : WeightConvention::unshifted;

  RunDirectory run("simulate", sub, common);
  run.add_output("table.csv");
  std::vector<double> values;
  std::vector<ReplicaRecord> records;
  for (std::int64_t r = 0; r < o.reps; ++r) {
    const RngSpec rng{seed, replica_stream(experiment, o.n, r)};
    double value = 0.0;
    if (o.kind == "blip") {
      const BernoulliField field(params, rng);
      const BlipTable table = blip_table(field, o.m, o.n);
      value = table(o.m - 1, o.n - 1);
      if (r == 0) {
        std::ofstream out = run.open("table.csv");
        write_table_csv(out, table);
      }
    } else {
      const GeometricField field(params, rng, conv);
      const PassageTable table = corner_growth_table(field, o.m, o.n);
      value = static_cast<double>(table(o.m - 1, o.n - 1));
      if (r == 0) {
        std::ofstream out = run.open("table.csv");
        write_table_csv(out, table);
      }
    }
    values.push_back(value);
    records.push_back({experiment, o.n, r, value, seed, rng.stream_id});
  }
  write_records(run, records);
  write_summary(run, {summary_of(values, 0.0, 1.0, o.n)});
  run.finish(kExitOk);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Monte Carlo ladders

struct LadderOptions {
  std::vector<std::int64_t> n_list;
  std::int64_t reps = 0;
  double x = 1.0;
  double y = 1.0;
  double a = 0.75;
  double epsilon = 1.0;
  std::string dn = "power:0.25";
  double strip_constant = 4.0;
  std::string sampler = "auto";
  double c1 = 1.0;
  double beta = 0.5;
  std::int64_t cell_budget = std::int64_t{1} << 27;
  double tolerance = 0.0;
};

int finish_ladder(RunDirectory& run, const LadderResult& result, bool ok) {
  write_records(run, result.records);
  write_summary(run, result.summaries);
  const int code = ok ? kExitOk : kExitFailure;
  run.finish(code);
  return code;
}

int run_shape(const CLI::App* sub, const Common& common, const LadderOptions& o) {
  ExperimentConfig config = base_config(common);
  config.x = o.x;
  config.y = o.y;
  config.n_list = o.n_list;
  config.replicas = o.reps;
  config.epsilon = o.epsilon;
  config.cell_budget = o.cell_budget;
  config.validate();
  require(o.x > 0.0 && o.y > 0.0, "x, y: must be positive");
  RunDirectory run("shape", sub, common);
  const LadderResult result = estimate_shape(config);
  const SampleSummary& last = result.summaries.back();
  return finish_ladder(run, result, o.tolerance <= 0.0 || std::abs(last.mean - last.ref_value) <= o.tolerance);
}

int run_soft_edge(const CLI::App* sub, const Common& common, const LadderOptions& o) {
  ExperimentConfig config = base_config(common);
  require_open_unit(o.a, "a");
  config.a = o.a;
  config.x = o.x;
  config.n_list = o.n_list;
  config.replicas = o.reps;
  config.epsilon = o.epsilon;
  config.dn = DnRule::parse(o.dn);
  config.strip_constant = o.strip_constant;
  config.mode = parse_sampler_mode(o.sampler);
  config.cell_budget = o.cell_budget;
  config.validate();
  RunDirectory run("soft-edge", sub, common);
  const bool sub_critical = o.a <= 0.5;
  const LadderResult result = sub_critical ? soft_edge_subcritical(config) : soft_edge_supercritical(config);
  const SampleSummary& last = result.summaries.back();
  bool ok = true;
  if (o.tolerance > 0.0) {
    ok = sub_critical ? last.exceedance <= o.tolerance : std::abs(last.median - last.ref_value) <= o.tolerance;
  }
  return finish_ladder(run, result, ok);
}

int run_hard_edge(const CLI::App* sub, const Common& common, const LadderOptions& o) {
  ExperimentConfig config = base_config(common);
  require_open_unit(o.beta, "beta");
  config.c1 = o.c1;
  config.y = o.y;
  config.beta = o.beta;
  config.n_list = o.n_list;
  config.replicas = o.reps;
  config.epsilon = o.epsilon;
  config.cell_budget = o.cell_budget;
  config.validate();
  require(o.c1 > 0.0 && o.y > 0.0, "c1, y: must be positive");
  RunDirectory run("hard-edge", sub, common);
  const LadderResult result = hard_edge_check(config);
  const SampleSummary& last = result.summaries.back();
  const bool ok =
      o.tolerance <= 0.0 || std::abs(last.median - last.ref_value) / last.ref_value <= o.tolerance;
  return finish_ladder(run, result, ok);
}

// ---------------------------------------------------------------------------
// identities

struct IdentityOptions {
  std::vector<std::string> which{"relation", "jump-lemma", "lm-formula"};
  std::int64_t size = 40;
  std::int64_t fields = 200;
  std::int64_t particles = 50;
  std::int64_t horizon = 100;
};

const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names{"relation", "jump-lemma", "lm-formula",
                                              "tau-g",    "coupling",   "duality"};
  return names;
}

IdentityReport run_identity(const std::string& name, const ModelParams& params, RngSpec rng,
                            const IdentityOptions& o) {
  if (name == "tau-g") {
    return check_tau_equals_g(GeometricField(params, rng, WeightConvention::unshifted), o.size, o.size);
  }
  const BernoulliField field(params, rng);
  if (name == "relation") return check_relation(field, o.size, o.size - 1);
  if (name == "jump-lemma") return check_jump_lemma(field, o.size, o.size - 1);
  if (name == "lm-formula") return check_lm_formula(field, o.size, o.size);
  if (name == "coupling") return check_coupling(field, o.particles, o.horizon);
  return check_shear_duality(field, o.particles, o.horizon);
}

int run_identities(const CLI::App* sub, const Common& common, const IdentityOptions& o) {
  require_open_unit(common.p, "p");
  require(o.size >= 1, "size: must be positive");
  require(o.fields >= 1, "fields: must be positive");
  require(o.particles >= 1 && o.horizon >= 0, "particles, horizon: out of range");
  for (const std::string& name : o.which) {
    const auto& names = identity_names();
    require(std::find(names.begin(), names.end(), name) != names.end(),
            fmt::format("identity: unknown '{}' (relation, jump-lemma, lm-formula, tau-g, coupling, duality)", name));
  }
  const ModelParams params = ModelParams::from_p(common.p);
  const std::uint64_t seed = common.seed_value();
  RunDirectory run("identities", sub, common);
  run.add_output("identities.jsonl");

  std::ofstream reports = run.open("identities.jsonl");
  std::vector<ReplicaRecord> records;
  std::vector<SampleSummary> rows;
  bool all_passed = true;
  for (const std::string& name : o.which) {
    const std::string experiment = "identities-" + name;
    std::vector<IdentityReport> batch(static_cast<std::size_t>(o.fields));
    const std::vector<double> passed = run_replicas(o.fields, common.workers, [&](std::int64_t f) {
      const RngSpec rng{seed, replica_stream(experiment, o.size, f)};
      batch[static_cast<std::size_t>(f)] = run_identity(name, params, rng, o);
      return batch[static_cast<std::size_t>(f)].passed() ? 1.0 : 0.0;
    });
    for (std::int64_t f = 0; f < o.fields; ++f) {
      const IdentityReport& report = batch[static_cast<std::size_t>(f)];
      reports << to_json(report).dump() << '\n';
      records.push_back({experiment, o.size, f, passed[static_cast<std::size_t>(f)], seed, report.stream});
      all_passed = all_passed && report.passed();
    }
    rows.push_back(summary_of(passed, 1.0, 0.5, o.size));
  }
  reports.close();
  write_records(run, records);
  write_summary(run, rows);
  const int code = all_passed ? kExitOk : kExitFailure;
  run.finish(code);
  return code;
}

// ---------------------------------------------------------------------------
// processes

struct ProcessOptions {
  std::string kind = "r";
  std::int64_t particles = 20;
  std::int64_t horizon = 20;
  std::vector<std::int64_t> platoon_sizes{1, 3, 10};
  std::int64_t events = 10000;
  double alpha = 0.01;
};

int run_processes(const CLI::App* sub, const Common& common, const ProcessOptions& o) {
  require_open_unit(common.p, "p");
  require(o.particles >= 1 && o.horizon >= 0, "particles, horizon: out of range");
  const std::vector<std::string> kinds{"r", "dtasep", "fragmentation", "z", "w", "fragmentation-law"};
  require(std::find(kinds.begin(), kinds.end(), o.kind) != kinds.end(),
          "kind: expected r, dtasep, fragmentation, z, w or fragmentation-law");
  const ModelParams params = ModelParams::from_p(common.p);
  const std::uint64_t seed = common.seed_value();
  const std::string experiment = "processes-" + o.kind;
  const RngSpec rng{seed, replica_stream(experiment, o.particles, 0)};

  if (o.kind == "fragmentation-law") {
    require(o.events >= 1, "events: must be positive");
    for (const auto size : o.platoon_sizes) require(size >= 1, "platoon-sizes: must be positive");
    RunDirectory run("processes", sub, common);
    run.add_output("fragmentation_law.json");
    json law = json::array();
    std::vector<ReplicaRecord> records;
    std::vector<SampleSummary> rows;
    bool ok = true;
    for (const auto size : o.platoon_sizes) {
      const RngSpec law_rng{seed, replica_stream(experiment, size, 0)};
      const FragmentationLawResult r = fragmentation_law(params, law_rng, size, o.events);
      double exact_mean = 0.0;
      std::vector<double> pieces;
      for (std::int64_t k = 0; k <= size; ++k) {
        exact_mean += static_cast<double>(k) * break_size_probability(params, size, k);
        const auto count = r.histogram[static_cast<std::size_t>(k)];
        pieces.insert(pieces.end(), static_cast<std::size_t>(count), static_cast<double>(k));
        records.push_back({experiment, size, k, static_cast<double>(count), seed, law_rng.stream_id});
      }
      rows.push_back(summary_of(pieces, exact_mean, 1.0, size));
      law.push_back({{"platoon_size", size},
                     {"events", r.events},
                     {"histogram", r.histogram},
                     {"chi_square", r.chi_square.statistic},
                     {"dof", r.chi_square.degrees_of_freedom},
                     {"p_value", r.chi_square.p_value}});
      ok = ok && r.chi_square.p_value > o.alpha;
    }
    run.open("fragmentation_law.json") << law.dump(2) << '\n';
    write_records(run, records);
    write_summary(run, rows);
    const int code = ok ? kExitOk : kExitFailure;
    run.finish(code);
    return code;
  }

  RunDirectory run("processes", sub, common);
  std::vector<std::int64_t> packed(static_cast<std::size_t>(o.particles));
  std::iota(packed.begin(), packed.end(), std::int64_t{1});
  const BernoulliField field(params, rng);

  std::optional<ParticleTrajectory> traj;
  if (o.kind == "r") {
    traj = evolve_r(shift_to_corner_indexing(field), o.particles, o.horizon);
  } else if (o.kind == "dtasep") {
    traj = evolve_dtasep(SiteKeyedDraws(params, rng), packed, o.horizon);
  } else if (o.kind == "z") {
    traj = evolve_marked_left(field, spread_initial(field, o.particles), o.horizon);
  } else if (o.kind == "w") {
    traj = evolve_blocking_right(field, spread_initial(field, o.particles), o.horizon);
  } else {
    run.add_output("fragmentation.csv");
    const FragmentationRun frag =
        evolve_fragmentation(SiteKeyedDraws(params, rng), PlatoonState::from_positions(packed), o.horizon);
    {
      std::ofstream out = run.open("fragmentation.csv");
      write_fragmentation_csv(out, frag.events);
    }
    std::vector<ReplicaRecord> records;
    std::vector<double> pieces;
    for (std::size_t e = 0; e < frag.events.size(); ++e) {
      pieces.push_back(static_cast<double>(frag.events[e].broken));
      records.push_back({experiment, o.particles, static_cast<std::int64_t>(e), pieces.back(), seed, rng.stream_id});
    }
    write_records(run, records);
    write_summary(run, {summary_of(pieces, 0.0, 1.0, o.particles)});
    run.finish(kExitOk);
    return kExitOk;
  }

  run.add_output("trajectory.csv");
  {
    std::ofstream out = run.open("trajectory.csv");
    write_trajectory_csv(out, *traj);
  }
  // One record per label: displacement over the horizon (escaped W
  // particles are left out of the summary).
  std::vector<ReplicaRecord> records;
  std::vector<double> moves;
  for (std::int64_t k = traj->first_label(); k <= traj->last_label(); ++k) {
    const std::int64_t end = traj->pos(k, traj->horizon());
    const std::int64_t start = traj->pos(k, 0);
    if (end == kEscaped) continue;
    const double move = static_cast<double>(end - start);
    moves.push_back(move);
    records.push_back({experiment, o.particles, k, move, seed, rng.stream_id});
  }
  write_records(run, records);
  write_summary(run, {summary_of(moves, 0.0, 1.0, o.particles)});
  run.finish(kExitOk);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// crosscheck

struct CrosscheckOptions {
  std::int64_t n = 500;
  double x = 1.0;
  double a = 0.5;
  std::int64_t j = 0;
  std::int64_t reps = 2000;
  std::int64_t pilot_reps = 400;
  double compare_a = 0.75;
  double compare_x = 1.0;
  std::int64_t cell_budget = std::int64_t{1} << 27;
};

SampleSummary summary_from_records(const std::vector<ReplicaRecord>& records, const std::string& experiment,
                                   double ref) {
  std::vector<double> values;
  std::int64_t n = 0;
  for (const ReplicaRecord& r : records) {
    if (r.experiment == experiment) {
      values.push_back(r.value);
      n = r.n;
    }
  }
  return summary_of(values, ref, 0.5, n);
}

int run_crosscheck(const CLI::App* sub, const Common& common, const CrosscheckOptions& o) {
  ExperimentConfig config = base_config(common);
  require_open_unit(o.a, "a");
  require_open_unit(o.compare_a, "compare-a");
  require(o.n >= 1, "n: must be positive");
  require(o.pilot_reps >= 1, "pilot-reps: must be positive");
  config.n_list = {o.n};
  config.replicas = o.reps;
  config.x = o.x;
  config.a = o.a;
  config.cell_budget = o.cell_budget;
  config.validate();
  const std::int64_t m = soft_edge_columns(config.params, o.x, o.a, o.n);
  const std::int64_t lo = std::max<std::int64_t>(m - o.n, 1);
  require(o.j == 0 || (o.j >= lo && o.j <= m), fmt::format("j: must be 0 (pilot) or lie in [{}, {}]", lo, m));

  RunDirectory run("crosscheck", sub, common);
  run.add_output("crosscheck.json");
  const std::int64_t j = o.j != 0 ? o.j : pilot_threshold(config, m, o.n, o.pilot_reps);
  const CrosscheckResult cross = exceedance_crosscheck(config, m, o.n, j);

  ExperimentConfig compare = config;
  compare.a = o.compare_a;
  compare.x = o.compare_x;
  const ComparisonResult cmp = fast_vs_direct(compare);

  std::vector<ReplicaRecord> records = cross.records;
  records.insert(records.end(), cmp.records.begin(), cmp.records.end());
  write_records(run, records);
  write_summary(run, {summary_from_records(records, "crosscheck-direct", cross.p_geometric),
                      summary_from_records(records, "crosscheck-geometric", cross.p_direct),
                      summary_from_records(records, "compare-fast", cmp.direct.mean),
                      summary_from_records(records, "compare-direct", cmp.fast.mean)});
  const json details = {
      {"exceedance", {{"m", m}, {"n", o.n}, {"j", j}, {"replicas", cross.replicas},
                      {"p_direct", cross.p_direct}, {"p_geometric", cross.p_geometric},
                      {"joint_se", cross.joint_se}, {"agrees", cross.agrees()}}},
      {"fast_vs_direct", {{"m", soft_edge_columns(config.params, o.compare_x, o.compare_a, o.n)},
                          {"n", o.n}, {"a", o.compare_a}, {"x", o.compare_x},
                          {"mean_fast", cmp.fast.mean}, {"mean_direct", cmp.direct.mean},
                          {"joint_se", cmp.joint_se}, {"rank_p_value", cmp.rank.p_value},
                          {"agrees", cmp.agrees()}}}};
  run.open("crosscheck.json") << details.dump(2) << '\n';
  const int code = cross.agrees() && cmp.agrees() ? kExitOk : kExitFailure;
  run.finish(code);
  return code;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"BLIP longest increasing paths: simulation, limit checks and exact identities", "blip_cli"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_version_flag("--version", kVersion);

  Common common;

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Tabulate L(i, j) or G(i, j) on random fields");
  add_common(simulate, common);
  simulate->add_option("--kind", sim.kind, "blip (Bernoulli marks) or lpp (geometric weights)");
  simulate->add_option("--m", sim.m, "Columns");
  simulate->add_option("--n", sim.n, "Rows");
  simulate->add_option("--reps", sim.reps, "Independent fields; the table is written for the first");
  simulate->add_option("--convention", sim.convention, "Weights for lpp: shifted (>= 1) or unshifted (>= 0)");

  LadderOptions shape_o;
  shape_o.n_list = {2000};
  shape_o.reps = 100;
  shape_o.epsilon = 0.02;
  CLI::App* shape = app.add_subcommand("shape", "Estimate the limit shape n^-1 L(nx, ny)");
  add_common(shape, common);
  shape->add_option("--x", shape_o.x, "Column scale");
  shape->add_option("--y", shape_o.y, "Row scale");
  shape->add_option("--n", shape_o.n_list, "Size ladder, comma separated")->delimiter(',');
  shape->add_option("--reps", shape_o.reps, "Replicas per size");
  shape->add_option("--epsilon", shape_o.epsilon, "Exceedance threshold around the limit");
  shape->add_option("--cell-budget", shape_o.cell_budget, "Largest DP per sample, in cells");
  shape->add_option("--tolerance", shape_o.tolerance, "Exit 1 if |mean - limit| exceeds this at the largest n (0: off)");

  LadderOptions soft_o;
  soft_o.n_list = {4000, 16000, 64000};
  soft_o.reps = 200;
  CLI::App* soft = app.add_subcommand("soft-edge", "(n - L(n/p - x n^a, n)) scaled, near the soft edge");
  add_common(soft, common);
  soft->add_option("--x", soft_o.x, "Amplitude x");
  soft->add_option("--a", soft_o.a, "Exponent a; a <= 1/2 scales by d_n, a > 1/2 by n^(2a-1)");
  soft->add_option("--n", soft_o.n_list, "Size ladder, comma separated")->delimiter(',');
  soft->add_option("--reps", soft_o.reps, "Replicas per size");
  soft->add_option("--dn", soft_o.dn, "d_n for a <= 1/2: power:g, log_power:k or power_log:g");
  soft->add_option("--epsilon", soft_o.epsilon, "Exceedance threshold");
  soft->add_option("--strip-constant", soft_o.strip_constant, "Thin-strip margin multiplier");
  soft->add_option("--sampler", soft_o.sampler, "auto, direct or fast");
  soft->add_option("--cell-budget", soft_o.cell_budget, "Largest DP or strip per sample, in cells");
  soft->add_option("--tolerance", soft_o.tolerance,
                   "Exit 1 if the largest-n median misses the limit (a > 1/2) or the exceedance exceeds this (a <= 1/2); 0: off");

  LadderOptions hard_o;
  hard_o.n_list = {1000, 4000, 16000};
  hard_o.reps = 200;
  CLI::App* hard = app.add_subcommand("hard-edge", "(G(c1 n, y n^beta) - mu c1 n) / n^((1+beta)/2)");
  add_common(hard, common);
  hard->add_option("--c1", hard_o.c1, "Column scale c1");
  hard->add_option("--y", hard_o.y, "Strip amplitude y");
  hard->add_option("--beta", hard_o.beta, "Strip exponent beta");
  hard->add_option("--n", hard_o.n_list, "Size ladder, comma separated")->delimiter(',');
  hard->add_option("--reps", hard_o.reps, "Replicas per size");
  hard->add_option("--epsilon", hard_o.epsilon, "Exceedance threshold");
  hard->add_option("--cell-budget", hard_o.cell_budget, "Largest DP per sample, in cells");
  hard->add_option("--tolerance", hard_o.tolerance, "Exit 1 if |median - ref| / ref exceeds this at the largest n (0: off)");

  IdentityOptions id_o;
  CLI::App* ids = app.add_subcommand("identities", "Exact pathwise identity checks on random fields");
  add_common(ids, common);
  ids->add_option("--identity", id_o.which,
                  "relation, jump-lemma, lm-formula, tau-g, coupling, duality (comma separated)")
      ->delimiter(',');
  ids->add_option("--size", id_o.size, "Field side for relation/jump-lemma/lm-formula/tau-g");
  ids->add_option("--fields", id_o.fields, "Random fields per identity");
  ids->add_option("--particles", id_o.particles, "K for coupling/duality");
  ids->add_option("--horizon", id_o.horizon, "T for coupling/duality");

  ProcessOptions proc_o;
  CLI::App* procs = app.add_subcommand("processes", "Particle trajectories and the fragmentation law");
  add_common(procs, common);
  procs->add_option("--kind", proc_o.kind, "r, dtasep, fragmentation, z, w or fragmentation-law");
  procs->add_option("--particles", proc_o.particles, "Particle count K");
  procs->add_option("--horizon", proc_o.horizon, "Time steps T");
  procs->add_option("--platoon-sizes", proc_o.platoon_sizes, "fragmentation-law block sizes")->delimiter(',');
  procs->add_option("--events", proc_o.events, "fragmentation-law break events per size");
  procs->add_option("--alpha", proc_o.alpha, "fragmentation-law chi-square significance");

  CrosscheckOptions cross_o;
  CLI::App* cross = app.add_subcommand("crosscheck", "Bernoulli vs geometric exceedance and fast vs direct sampler");
  add_common(cross, common);
  cross->add_option("--n", cross_o.n, "Rows n");
  cross->add_option("--x", cross_o.x, "Exceedance amplitude; m = floor(n/p - x n^a)");
  cross->add_option("--a", cross_o.a, "Exceedance exponent");
  cross->add_option("--j", cross_o.j, "Threshold j; 0 picks it from a pilot run");
  cross->add_option("--reps", cross_o.reps, "Replicas per estimator");
  cross->add_option("--pilot-reps", cross_o.pilot_reps, "Pilot replicas for choosing j");
  cross->add_option("--compare-a", cross_o.compare_a, "Exponent a of the fast vs direct comparison");
  cross->add_option("--compare-x", cross_o.compare_x, "Amplitude x of the fast vs direct comparison");
  cross->add_option("--cell-budget", cross_o.cell_budget, "Largest DP per sample, in cells");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return run_simulate(simulate, common, sim);
    if (shape->parsed()) return run_shape(shape, common, shape_o);
    if (soft->parsed()) return run_soft_edge(soft, common, soft_o);
    if (hard->parsed()) return run_hard_edge(hard, common, hard_o);
    if (ids->parsed()) return run_identities(ids, common, id_o);
    if (procs->parsed()) return run_processes(procs, common, proc_o);
    if (cross->parsed()) return run_crosscheck(cross, common, cross_o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("blip_cli");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data());
}

}  // namespace blip::cli
