#include "respg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "respg/baselines.hpp"
#include "respg/config.hpp"
#include "respg/hydrology.hpp"
#include "respg/kernels.hpp"
#include "respg/reservoir_env.hpp"
#include "respg/text.hpp"

namespace respg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigInvalid, what); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::Io, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << content;
  if (!out.flush()) throw Error(Errc::Io, "write failed for " + path.string());
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

env::ReservoirSpec load_spec(const fs::path& path) {
  auto spec = path.empty() ? env::folsom_fixture() : env::load_reservoir_file(path);
  spec.validate();
  return spec;
}

hydrology::FlowSeries parse_flows_text(const std::string& text) {
  std::istringstream in(text);
  return hydrology::load_flow_csv(in);
}

// ------------------------------------------------------------ value parsing

double as_double(const std::string& key, const std::string& v) {
  const auto d = text::parse_double(v);
  if (!d || !std::isfinite(*d)) config_error(key + ": '" + v + "' is not a number");
  return *d;
}

long long as_int(const std::string& key, const std::string& v) {
  const auto i = text::parse_int(v);
  if (!i) config_error(key + ": '" + v + "' is not an integer");
  return *i;
}

std::size_t as_count(const std::string& key, const std::string& v) {
  const auto i = as_int(key, v);
  if (i < 1) config_error(key + " must be >= 1");
  return static_cast<std::size_t>(i);
}

std::uint64_t as_seed(const std::string& key, const std::string& v) {
  const auto i = as_int(key, v);
  if (i < 0) config_error(key + " must be non-negative");
  return static_cast<std::uint64_t>(i);
}

std::vector<std::string> as_list(const std::string& v) {
  std::vector<std::string> out;
  for (auto part : text::split(v, ',')) {
    const auto t = text::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

}  // namespace

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::ConfigInvalid:
    case Errc::InvalidSpec:
    case Errc::NoInputs:
      return kExitUsage;
    case Errc::MalformedRow:
    case Errc::NonContiguousMonths:
    case Errc::NegativeFlow:
    case Errc::InsufficientYears:
    case Errc::NonPositiveFlowUnderLog:
    case Errc::DegenerateStats:
    case Errc::NotPositiveDefinite:
    case Errc::OutOfTable:
    case Errc::LengthMismatch:
    case Errc::ZeroDemand:
    case Errc::PartialYear:
    case Errc::CheckpointUnreadable:
    case Errc::Io:
      return kExitData;
    case Errc::FlowExceedsTurbine:
    case Errc::StorageOutOfBounds:
    case Errc::ShapeMismatch:
    case Errc::InsufficientSamples:
    case Errc::FactorOutOfRange:
      return kExitInternal;
  }
  return kExitInternal;
}

// ------------------------------------------------------------ generate-flows

void cmd_generate_flows(const GenerateFlowsArgs& args) {
  if (args.years < 1) config_error("years must be >= 1");
  if (args.out.empty()) config_error("an output path is required");
  const auto history = parse_flows_text(read_file(args.history));
  const auto stats = hydrology::monthly_statistics(history, args.log_transform);
  const auto generated = hydrology::generate_synthetic_flows(
      stats, hydrology::SyntheticGenConfig{args.years, args.seed, args.log_transform}, history);

  std::ostringstream flows_csv;
  hydrology::write_flow_csv(flows_csv, generated, args.seed);
  std::ostringstream stats_csv;
  hydrology::write_stats_csv(stats_csv, stats);

  write_file(args.out, flows_csv.str());
  write_file(fs::path(args.out.string() + ".stats.csv"), stats_csv.str());
}

// ------------------------------------------------------------ train

const std::vector<std::pair<std::string, std::string>>& train_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"agent", "algo"},
      {"agent", "gamma"},
      {"agent", "tau"},
      {"agent", "buffer_size"},
      {"agent", "critic_lr"},
      {"agent", "actor_lr"},
      {"agent", "batch_size"},
      {"agent", "q_lr"},
      {"agent", "alpha"},
      {"agent", "explore_std"},
      {"agent", "target_noise_std"},
      {"agent", "noise_clip"},
      {"agent", "policy_delay"},
      {"agent", "target_entropy"},
      {"agent", "hidden"},
      {"agent", "lrelu_slope"},
      {"agent", "log_std_min"},
      {"agent", "log_std_max"},
      {"agent", "squash"},
      {"agent", "reward_scale"},
      {"agent", "action_init_bias"},
      {"training", "episodes"},
      {"training", "seed"},
      {"training", "seeds"},
      {"training", "out"},
      {"environment", "reservoir"},
      {"environment", "penalty_coefficient"},
      {"data", "flows"},
      {"data", "history"},
      {"data", "synthetic_years"},
      {"data", "synthetic_seed"},
  };
  return keys;
}

TrainArgs resolve_train_args(const std::map<std::string, std::string>& settings) {
  std::set<std::string> known;
  for (const auto& [section, key] : train_keys()) known.insert(key);
  for (const auto& [key, value] : settings)
    if (!known.count(key)) config_error("unknown setting '" + key + "'");

  const auto get = [&](const std::string& key) -> const std::string* {
    const auto it = settings.find(key);
    return it == settings.end() ? nullptr : &it->second;
  };

  TrainArgs a;
  if (const auto* v = get("algo")) {
    const auto kind = agents::parse_agent_kind(*v);
    if (!kind) config_error("algo must be one of ddpg, td3, sac18, sac19 (got '" + *v + "')");
    a.kind = *kind;
  }
  auto& c = a.agent;
  c = agents::AgentConfig::defaults(a.kind);

  const std::map<std::string, double*> doubles = {
      {"gamma", &c.gamma},
      {"tau", &c.tau},
      {"critic_lr", &c.critic_lr},
      {"actor_lr", &c.actor_lr},
      {"q_lr", &c.q_lr},
      {"alpha", &c.alpha},
      {"explore_std", &c.explore_std},
      {"target_noise_std", &c.target_noise_std},
      {"noise_clip", &c.noise_clip},
      {"target_entropy", &c.target_entropy},
      {"lrelu_slope", &c.lrelu_slope},
      {"log_std_min", &c.log_std_min},
      {"log_std_max", &c.log_std_max},
      {"reward_scale", &c.reward_scale},
      {"action_init_bias", &c.action_init_bias},
  };
  for (const auto& [key, slot] : doubles)
    if (const auto* v = get(key)) *slot = as_double(key, *v);
  if (const auto* v = get("buffer_size")) c.buffer_size = as_count("buffer_size", *v);
  if (const auto* v = get("batch_size")) c.batch_size = as_count("batch_size", *v);
  if (const auto* v = get("policy_delay"))
    c.policy_delay = static_cast<int>(as_count("policy_delay", *v));
  if (const auto* v = get("hidden")) {
    c.hidden.clear();
    for (const auto& part : as_list(*v)) c.hidden.push_back(as_count("hidden", part));
  }
  if (const auto* v = get("squash")) {
    if (*v == "sigmoid")
      c.squash = nn::Squash::Sigmoid;
    else if (*v == "tanh")
      c.squash = nn::Squash::Tanh;
    else
      config_error("squash must be sigmoid or tanh");
  }
  c.validate();

  if (const auto* v = get("episodes")) a.episodes = static_cast<int>(as_count("episodes", *v));
  if (const auto* v = get("seed")) a.seed = as_seed("seed", *v);
  if (const auto* v = get("seeds"))
    for (const auto& part : as_list(*v)) a.seeds.push_back(as_seed("seeds", part));
  if (const auto* v = get("out")) a.out = *v;
  if (const auto* v = get("reservoir")) a.reservoir = *v;
  if (const auto* v = get("penalty_coefficient"))
    a.penalty_coefficient = as_double("penalty_coefficient", *v);
  if (const auto* v = get("flows")) a.flows = *v;
  if (const auto* v = get("history")) a.history = *v;
  if (const auto* v = get("synthetic_years")) a.synthetic_years = as_count("synthetic_years", *v);
  if (const auto* v = get("synthetic_seed")) a.synthetic_seed = as_seed("synthetic_seed", *v);
  return a;
}

namespace {

struct InflowSource {
  hydrology::FlowSeries flows;
  json meta;
};

InflowSource resolve_inflows(const TrainArgs& a) {
  if (!a.flows.empty() && a.synthetic_years > 0)
    config_error("give either flows or synthetic_years, not both");
  InflowSource src;
  if (!a.flows.empty()) {
    const auto bytes = read_file(a.flows);
    src.flows = parse_flows_text(bytes);
    src.meta = {{"source", "file"}, {"path", a.flows.generic_string()}, {"fnv1a", hex64(fnv1a(bytes))}};
    return src;
  }
  if (a.synthetic_years > 0) {
    if (a.history.empty()) config_error("synthetic inflows need a history file");
    const auto bytes = read_file(a.history);
    const auto history = parse_flows_text(bytes);
    const auto stats = hydrology::monthly_statistics(history, true);
    src.flows = hydrology::generate_synthetic_flows(
        stats, hydrology::SyntheticGenConfig{a.synthetic_years, a.synthetic_seed, true}, history);
    src.meta = {{"source", "synthetic"},
                {"history", a.history.generic_string()},
                {"history_fnv1a", hex64(fnv1a(bytes))},
                {"years", a.synthetic_years},
                {"seed", a.synthetic_seed}};
    return src;
  }
  config_error("no inflow source: give flows or synthetic_years with history");
}

void train_one(const TrainArgs& a, std::uint64_t seed, const fs::path& dir,
               const env::ReservoirSpec& spec, const InflowSource& inflow) {
  agents::TrainOptions opts;
  opts.episodes = a.episodes;
  opts.seed = seed;
  const auto result = agents::train(a.kind, a.agent, spec, inflow.flows, opts);

  std::ostringstream rewards;
  rewards << "episode,cumulative_reward\n";
  for (std::size_t e = 0; e < result.episode_rewards.size(); ++e)
    rewards << e + 1 << ',' << text::fixed(result.episode_rewards[e], 6) << '\n';

  std::ostringstream spec_text;
  env::write_reservoir_spec(spec_text, spec);
  const json run = {
      {"command", "train"},
      {"algo", std::string(agents::agent_kind_name(a.kind))},
      {"seed", seed},
      {"episodes", a.episodes},
      {"transitions", result.transitions},
      {"reservoir", a.reservoir.empty() ? std::string("builtin:folsom") : a.reservoir.generic_string()},
      {"reservoir_fnv1a", hex64(fnv1a(spec_text.str()))},
      {"penalty_coefficient", spec.penalty_coefficient},
      {"inflow", inflow.meta},
  };
  agents::save_agent(dir, result.agent, run.dump());
  write_file(dir / "rewards.csv", rewards.str());
}

}  // namespace

void cmd_train(const TrainArgs& a) {
  if (a.out.empty()) config_error("an output directory is required");
  if (a.episodes < 1) config_error("episodes must be >= 1");
  a.agent.validate();
  auto spec = load_spec(a.reservoir);
  if (a.penalty_coefficient) {
    spec.penalty_coefficient = *a.penalty_coefficient;
    spec.validate();
  }
  const auto inflow = resolve_inflows(a);

  if (a.seeds.empty()) {
    train_one(a, a.seed, a.out, spec, inflow);
    return;
  }
  std::vector<std::exception_ptr> errors(a.seeds.size());
  std::vector<std::thread> workers;
  workers.reserve(a.seeds.size());
  for (std::size_t i = 0; i < a.seeds.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        train_one(a, a.seeds[i], a.out / ("seed-" + std::to_string(a.seeds[i])), spec, inflow);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ------------------------------------------------------------ evaluate

EvaluateResult cmd_evaluate(const EvaluateArgs& args) {
  if (args.policy.empty()) config_error("a policy is required");
  if (args.out.empty()) config_error("an output directory is required");
  const auto spec = load_spec(args.reservoir);
  const auto flows = parse_flows_text(read_file(args.flows));

  baselines::RunResult run;
  if (args.policy == "sop") {
    run = baselines::run_policy(baselines::sop_policy(spec), spec, flows);
  } else if (args.policy == "random") {
    run = baselines::run_policy(baselines::random_policy(spec, args.seed), spec, flows);
  } else if (args.policy == "replay") {
    if (args.releases.empty()) config_error("replay needs a releases file");
    std::istringstream in(read_file(args.releases));
    const auto releases = baselines::align_releases(baselines::load_release_csv(in), flows);
    run = baselines::run_replay(releases, spec, flows);
  } else {
    const auto agent = agents::load_agent(args.policy);
    run = baselines::run_policy(baselines::agent_policy(agent, spec), spec, flows);
  }

  EvaluateResult result;
  result.clipped = run.clipped;
  result.report = metrics::report(run.trajectory);
  if (args.factors) {
    auto& r = result.report;
    r.rel = args.factors->rel;
    r.res = args.factors->res;
    r.vul = args.factors->vul;
    r.max_deficit = args.factors->max_deficit;
    r.si = metrics::sustainability_index(r.rel, r.res, r.vul, r.max_deficit);
  }

  std::string label = args.label;
  if (label.empty())
    label = args.policy == "sop" || args.policy == "random" || args.policy == "replay"
                ? args.policy
                : fs::path(args.policy).lexically_normal().filename().string();
  if (label.empty()) label = "policy";

  std::ostringstream traj_csv;
  metrics::write_trajectory_csv(traj_csv, run.trajectory);
  std::ostringstream report_csv;
  metrics::write_report_header(report_csv);
  metrics::write_report_row(report_csv, label, result.report);
  write_file(args.out / "trajectory.csv", traj_csv.str());
  write_file(args.out / "report.csv", report_csv.str());
  return result;
}

// ------------------------------------------------------------ report

std::vector<std::pair<int, double>> annual_deficit_percent(const metrics::Trajectory& traj) {
  std::vector<std::pair<int, double>> out;
  double def = 0.0;
  double dem = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    def += traj[t].deficit;
    dem += traj[t].demand;
    const bool last = t + 1 == traj.size() ||
                      metrics::water_year(traj[t + 1].year, traj[t + 1].month) !=
                          metrics::water_year(traj[t].year, traj[t].month);
    if (last) {
      out.emplace_back(metrics::water_year(traj[t].year, traj[t].month),
                       dem > 0.0 ? def / dem * 100.0 : 0.0);
      def = dem = 0.0;
    }
  }
  return out;
}

void cmd_report(const ReportArgs& args) {
  if (args.inputs.empty()) throw Error(Errc::NoInputs, "no trajectory files given");
  if (args.out.empty()) config_error("an output directory is required");
  const auto spec = load_spec(args.reservoir);

  std::ostringstream comparison, storage, release, deficit, power;
  metrics::write_report_header(comparison);
  storage << "method,year,month,storage_taf\n";
  release << "method,year,month,release_taf\n";
  deficit << "method,water_year,deficit_pct\n";
  power << "method,water_year,power_gwh\n";

  for (const auto& [label, path] : args.inputs) {
    std::istringstream in(read_file(path));
    const auto traj = metrics::read_trajectory_csv(in, spec.demand);
    metrics::write_report_row(comparison, label, metrics::report(traj));
    for (const auto& m : traj) {
      storage << label << ',' << m.year << ',' << m.month << ',' << text::fixed(m.storage, 6) << '\n';
      release << label << ',' << m.year << ',' << m.month << ',' << text::fixed(m.release, 6) << '\n';
    }
    for (const auto& [wy, pct] : annual_deficit_percent(traj))
      deficit << label << ',' << wy << ',' << text::fixed(pct, 6) << '\n';
    std::map<int, double> annual_power;
    for (const auto& m : traj) annual_power[metrics::water_year(m.year, m.month)] += m.power_gwh;
    for (const auto& [wy, gwh] : annual_power)
      power << label << ',' << wy << ',' << text::fixed(gwh, 6) << '\n';
  }

  write_file(args.out / "comparison.csv", comparison.str());
  write_file(args.out / "plot_storage.csv", storage.str());
  write_file(args.out / "plot_release.csv", release.str());
  write_file(args.out / "plot_annual_deficit.csv", deficit.str());
  write_file(args.out / "plot_annual_power.csv", power.str());
}

// ------------------------------------------------------------ argv front end

namespace {

std::string flag_names(const std::string& key) {
  auto dashed = key;
  std::replace(dashed.begin(), dashed.end(), '_', '-');
  return dashed == key ? "--" + key : "--" + key + ",--" + dashed;
}

std::map<std::string, std::string> load_train_config(const fs::path& path) {
  const auto doc = config::Document::load(path);
  std::map<std::string, std::string> known;
  for (const auto& [section, key] : train_keys()) known[key] = section;
  static const std::set<std::string> path_keys = {"out", "reservoir", "flows", "history"};
  const auto base = path.parent_path();

  std::map<std::string, std::string> settings;
  for (const auto& name : doc.section_names()) {
    const auto* sec = doc.section(name);
    if (!sec->rows.empty()) config_error("[" + name + "] contains a line without '='");
    for (const auto& [key, value] : sec->values) {
      const auto it = known.find(key);
      if (it == known.end() || it->second != name)
        config_error("unknown key '" + key + "' in [" + name + "]");
      if (path_keys.count(key) && !value.empty() && fs::path(value).is_relative())
        settings[key] = (base / value).generic_string();
      else
        settings[key] = value;
    }
  }
  return settings;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reservoir operation with actor-critic policy-gradient agents"};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel instruction set: auto, scalar, avx2, neon");

  GenerateFlowsArgs gen;
  auto* gen_cmd = app.add_subcommand("generate-flows", "Generate synthetic monthly inflows");
  gen_cmd->add_option("--history", gen.history, "Historical inflow CSV")->required();
  gen_cmd->add_option("--years", gen.years, "Years to generate");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Output CSV (stats sidecar at <out>.stats.csv)")->required();
  bool no_log = false;
  gen_cmd->add_flag("--no-log-transform", no_log, "Work on raw instead of log flows");

  auto* train_cmd = app.add_subcommand("train", "Train an agent");
  std::string config_path;
  train_cmd->add_option("--config", config_path, "Config file with [environment] [agent] [training] [data]");
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const auto& [section, key] : train_keys())
    flag_opts[key] = train_cmd->add_option(flag_names(key), flag_values[key], "[" + section + "] " + key);

  EvaluateArgs eval;
  std::string eval_out;
  auto* eval_cmd = app.add_subcommand("evaluate", "Simulate a policy and score it");
  eval_cmd->add_option("--policy", eval.policy, "sop, random, replay or a checkpoint directory")->required();
  eval_cmd->add_option("--flows", eval.flows, "Inflow CSV")->required();
  eval_cmd->add_option("--reservoir", eval.reservoir, "Reservoir config (default: bundled fixture)");
  eval_cmd->add_option("--releases", eval.releases, "Release CSV for replay");
  eval_cmd->add_option("--seed", eval.seed, "Seed for the random policy");
  eval_cmd->add_option("--out", eval_out, "Output directory")->required();
  eval_cmd->add_option("--label", eval.label, "Method name in report.csv");

  ReportArgs rep;
  std::vector<std::string> rep_inputs;
  std::string rep_out;
  auto* rep_cmd = app.add_subcommand("report", "Compare trajectories and emit plot data");
  rep_cmd->add_option("--trajectory", rep_inputs, "Trajectory CSV, optionally label=path (repeatable)");
  rep_cmd->add_option("--reservoir", rep.reservoir, "Reservoir config for the demand schedule");
  rep_cmd->add_option("--out", rep_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    kernels::Isa chosen{};
    if (isa != "auto") {
      if (!kernels::parse_isa(isa, chosen)) config_error("unknown isa '" + isa + "'");
      if (!kernels::select_isa(chosen)) config_error("isa '" + isa + "' is not available here");
    }

    if (*gen_cmd) {
      gen.log_transform = !no_log;
      cmd_generate_flows(gen);
      out << "wrote " << gen.years * 12 << " months to " << gen.out.string() << '\n';
    } else if (*train_cmd) {
      std::map<std::string, std::string> settings;
      if (!config_path.empty()) settings = load_train_config(config_path);
      for (const auto& [key, opt] : flag_opts)
        if (opt->count() > 0) settings[key] = flag_values[key];
      const auto args = resolve_train_args(settings);
      cmd_train(args);
      out << "trained " << agents::agent_kind_name(args.kind) << " for " << args.episodes
          << " episodes into " << args.out.string() << '\n';
    } else if (*eval_cmd) {
      eval.out = eval_out;
      const auto r = cmd_evaluate(eval);
      out << "SI " << text::fixed(r.report.si, 4) << " (Rel " << text::fixed(r.report.rel, 4)
          << ", Res " << text::fixed(r.report.res, 4) << ", Vul " << text::general(r.report.vul, 4)
          << ", MaxDeficit " << text::fixed(r.report.max_deficit, 4) << ")";
      if (eval.policy == "replay") out << "; clipped " << r.clipped << " releases";
      out << '\n';
    } else if (*rep_cmd) {
      for (const auto& item : rep_inputs) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
          rep.inputs.emplace_back(fs::path(item).stem().string(), item);
        else
          rep.inputs.emplace_back(item.substr(0, eq), item.substr(eq + 1));
      }
      rep.out = rep_out;
      cmd_report(rep);
      out << "compared " << rep.inputs.size() << " trajectories into " << rep.out.string() << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace respg::cli
