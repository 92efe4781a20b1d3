// ccpopt: generate desk-scale instances, compute classical GMI baselines,
// run continuous cut optimization, and solve instances exactly.
//
// Exit codes: 0 success (including budget exhaustion), 1 numerical failure,
// 2 usage error, 3 node limit, 4 infeasible.

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccp/ccp.hpp"

namespace fs = std::filesystem;
using namespace ccp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNodeLimit = 3;
constexpr int kExitInfeasible = 4;

std::vector<int> parse_widths(const std::string& text) {
  std::vector<int> widths;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      widths.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ValidationError("widths: cannot parse \"" + item + "\"");
    }
    if (widths.back() < 1) throw ValidationError("widths: entries must be >= 1");
  }
  if (widths.empty()) throw ValidationError("widths: empty list");
  return widths;
}

LayerVariant parse_variant(const std::string& text) {
  if (text == "gmi") return LayerVariant::gmi;
  if (text == "log") return LayerVariant::log;
  throw ValidationError("variant: expected gmi or log");
}

std::string format_gap(const GapValue& gap) {
  std::ostringstream os;
  os << gap.value;
  if (gap.absolute) os << " (absolute, optimum near zero)";
  return os.str();
}

// Options that a JSON config file may supply; command-line values win.
struct ConfigBinding {
  CLI::Option* opt;
  std::function<void(const nlohmann::json&)> apply;
};

class ConfigFile {
 public:
  void attach(CLI::App& app) {
    app.add_option("--config", path_, "JSON config file; command line overrides its values");
  }

  template <typename T>
  void bind(CLI::Option* opt, const std::string& key, T& target) {
    bindings_.push_back({key, {opt, [&target, key](const nlohmann::json& v) {
                                 try {
                                   target = v.get<T>();
                                 } catch (const nlohmann::json::exception&) {
                                   throw ParseError("config key \"" + key + "\" has the wrong type");
                                 }
                               }}});
  }

  void apply() const {
    if (path_.empty()) return;
    const nlohmann::json j = [&] {
      std::ifstream in(path_);
      if (!in) throw IoError("cannot open config file " + path_);
      try {
        return nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path_ + ": " + e.what());
      }
    }();
    if (!j.is_object()) throw ParseError(path_ + ": config must be a JSON object");
    for (const auto& [key, binding] : bindings_) {
      if (binding.opt->count() > 0) continue;  // given on the command line
      if (j.contains(key)) binding.apply(j.at(key));
    }
  }

 private:
  std::string path_;
  std::vector<std::pair<std::string, ConfigBinding>> bindings_;
};

// ----------------------------------------------------------------- generate

struct GenerateArgs {
  std::string family;
  int rows = 20, cols = 40;
  double density = 0.2;
  int nodes = 10;
  double edge_prob = 0.3;
  int m = 4, k = 3, ncont = 2;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& args) {
  MilpInstance inst;
  if (args.family == "setcover")
    inst = generate_set_cover(args.rows, args.cols, args.density, args.seed);
  else if (args.family == "indepset")
    inst = generate_max_indep_set(args.nodes, args.edge_prob, args.seed);
  else
    inst = generate_random_mixed(args.m, args.k, args.ncont, args.seed);
  save_instance(inst, args.out);
  std::cout << "generated " << args.family << " m=" << inst.m << " n=" << inst.n << " k=" << inst.k
            << " -> " << args.out << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- baseline

struct BaselineArgs {
  std::string instance;
  int rounds = 1;
  bool rounds_given = false;
  std::string widths;  // empty: the classical full width each round
  std::string variant = "gmi";
  std::string out;
  long node_limit = 20000;
};

int cmd_baseline(const BaselineArgs& args) {
  const MilpInstance inst = load_instance(args.instance);

  std::optional<double> optimum = inst.known_optimum;
  if (!optimum) {
    const BnbResult exact = branch_and_bound(inst, args.node_limit);
    if (exact.status == BnbStatus::optimal) optimum = exact.optimum;
  }

  std::vector<int> widths;
  if (!args.widths.empty()) {
    widths = parse_widths(args.widths);
    if (args.rounds_given && int(widths.size()) != args.rounds)
      throw ValidationError("widths: expected one entry per round");
  } else {
    int dim = inst.m;
    for (int r = 0; r < args.rounds; ++r) {
      widths.push_back(dim);
      dim *= 2;
    }
  }

  const WarmStartResult ws = gmi_warm_start(inst, widths, parse_variant(args.variant));
  std::cout << "lp bound " << ws.lp_bound;
  if (optimum) std::cout << " gap " << format_gap(gap_for_report(ws.lp_bound, *optimum));
  std::cout << "\n";
  for (size_t r = 0; r < ws.round_bounds.size(); ++r) {
    std::cout << "round " << (r + 1) << ": bound " << ws.round_bounds[r];
    if (optimum) std::cout << " gap " << format_gap(gap_for_report(ws.round_bounds[r], *optimum));
    std::cout << "\n";
  }
  if (!args.out.empty()) save_net(ws.net, args.out);
  return kExitOk;
}

// ----------------------------------------------------------------- optimize

struct OptimizeArgs {
  std::vector<std::string> instances;
  std::string widths = "32";
  std::string init = "gmi";
  std::string variant = "gmi";
  OptimizerConfig config;
  std::string trace;
  std::string out;
  int jobs = 1;
};

int optimize_one(const OptimizeArgs& args, const std::string& instance_path, const std::string& trace_path,
                 const std::string& out_path) {
  const MilpInstance inst = load_instance(instance_path);
  const std::vector<int> widths = parse_widths(args.widths);
  const LayerVariant variant = parse_variant(args.variant);

  SubadditiveNet net0;
  if (args.init == "gmi")
    net0 = gmi_warm_start(inst, widths, variant).net;
  else if (args.init == "random")
    net0 = random_orthogonal_init(inst.m, widths, args.config.seed, variant);
  else
    throw ValidationError("init: expected gmi or random");

  const OptimizeResult res = two_step_optimize(inst, net0, args.config);

  if (!trace_path.empty()) {
    std::ofstream os(trace_path);
    if (!os) throw IoError("cannot open " + trace_path + " for writing");
    write_trace_csv(res.trace, os);
  }
  if (!out_path.empty()) save_net(res.net_best, out_path);

  std::cout << instance_path << ": initial bound " << res.initial_bound << ", best bound "
            << res.best_bound << ", steps " << res.total_grad_steps;
  if (inst.known_optimum) {
    std::cout << ", best gap " << format_gap(gap_for_report(res.best_bound, *inst.known_optimum));
  }
  std::cout << "\n";
  return kExitOk;
}

int run_worker_pool(const OptimizeArgs& args, const std::vector<std::array<std::string, 3>>& tasks) {
  int worst = kExitOk;
  size_t next = 0;
  int running = 0;
  while (next < tasks.size() || running > 0) {
    while (running < args.jobs && next < tasks.size()) {
      const auto task = tasks[next++];
      const pid_t pid = fork();
      if (pid < 0) throw IoError("fork failed");
      if (pid == 0) {
        int code = kExitNumerical;
        try {
          code = optimize_one(args, task[0], task[1], task[2]);
        } catch (const std::exception& e) {
          std::cerr << task[0] << ": " << e.what() << "\n";
        }
        std::cout.flush();
        std::cerr.flush();
        _exit(code);
      }
      ++running;
    }
    int status = 0;
    if (waitpid(-1, &status, 0) > 0) {
      --running;
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : kExitNumerical;
      worst = std::max(worst, code);
    }
  }
  return worst;
}

int cmd_optimize(const OptimizeArgs& args) {
  if (args.instances.size() == 1)
    return optimize_one(args, args.instances[0], args.trace, args.out);

  // Batch mode: --trace/--out name directories, one file per instance.
  std::vector<std::array<std::string, 3>> tasks;
  for (const auto& path : args.instances) {
    const std::string stem = fs::path(path).stem().string();
    std::string trace_path, out_path;
    if (!args.trace.empty()) {
      fs::create_directories(args.trace);
      trace_path = (fs::path(args.trace) / (stem + ".trace.csv")).string();
    }
    if (!args.out.empty()) {
      fs::create_directories(args.out);
      out_path = (fs::path(args.out) / (stem + ".net.json")).string();
    }
    tasks.push_back({path, trace_path, out_path});
  }
  if (args.jobs <= 1) {
    int worst = kExitOk;
    for (const auto& task : tasks) worst = std::max(worst, optimize_one(args, task[0], task[1], task[2]));
    return worst;
  }
  return run_worker_pool(args, tasks);
}

// -------------------------------------------------------------- solve-exact

struct SolveExactArgs {
  std::string instance;
  long node_limit = 100000;
  bool write_back = false;
};

int cmd_solve_exact(const SolveExactArgs& args) {
  MilpInstance inst = load_instance(args.instance);
  const BnbResult res = branch_and_bound(inst, args.node_limit);
  if (res.status == BnbStatus::infeasible) {
    std::cout << "infeasible after " << res.nodes << " nodes\n";
    return kExitInfeasible;
  }
  if (res.status == BnbStatus::node_limit) {
    std::cout << "node limit reached: lower bound " << res.lower_bound;
    if (res.incumbent) std::cout << ", incumbent " << res.optimum;
    std::cout << " (" << res.nodes << " nodes)\n";
    return kExitNodeLimit;
  }
  std::cout << "optimum " << res.optimum << " (" << res.nodes << " nodes)\n";
  if (args.write_back) {
    inst.known_optimum = res.optimum;
    save_instance(inst, args.instance);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous cutting plane optimization over generalized GMI networks"};
  app.require_subcommand(1);
  app.fallthrough();  // global options like --config may follow the subcommand
  ConfigFile config_file;
  config_file.attach(app);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "write a random instance file");
  generate->require_subcommand(1);
  CLI::App* setcover = generate->add_subcommand("setcover", "minimum set covering instance");
  setcover->add_option("--rows", gen.rows, "covering rows")->check(CLI::PositiveNumber);
  setcover->add_option("--cols", gen.cols, "variables")->check(CLI::PositiveNumber);
  setcover->add_option("--density", gen.density, "membership probability");
  CLI::App* indepset = generate->add_subcommand("indepset", "maximum independent set instance");
  indepset->add_option("--nodes", gen.nodes, "graph nodes")->check(CLI::PositiveNumber);
  indepset->add_option("--edge-prob", gen.edge_prob, "edge probability");
  CLI::App* mixed = generate->add_subcommand("mixed", "random mixed-integer instance");
  mixed->add_option("--m", gen.m, "rows")->check(CLI::PositiveNumber);
  mixed->add_option("--k", gen.k, "integer variables")->check(CLI::PositiveNumber);
  mixed->add_option("--ncont", gen.ncont, "continuous variables")->check(CLI::PositiveNumber);
  for (CLI::App* sub : {setcover, indepset, mixed}) {
    sub->add_option("--seed", gen.seed, "random seed");
    sub->add_option("--out", gen.out, "output instance file")->required();
  }

  BaselineArgs base;
  CLI::App* baseline = app.add_subcommand("baseline", "classical GMI rounds and their bounds");
  baseline->add_option("--instance", base.instance, "instance file")->required();
  CLI::Option* b_rounds =
      baseline->add_option("--rounds", base.rounds, "GMI rounds")->check(CLI::PositiveNumber);
  baseline->add_option("--widths", base.widths, "comma list, one width per round");
  baseline->add_option("--variant", base.variant, "cut family: gmi or log");
  baseline->add_option("--out", base.out, "warm-start checkpoint file");
  baseline->add_option("--node-limit", base.node_limit, "node budget when computing the gap");

  OptimizeArgs opt;
  CLI::App* optimize = app.add_subcommand("optimize", "continuous cut optimization");
  optimize->add_option("--instance", opt.instances, "instance file(s)")->required()->expected(-1);
  CLI::Option* o_widths = optimize->add_option("--widths", opt.widths, "comma list of layer widths");
  CLI::Option* o_init = optimize->add_option("--init", opt.init, "initializer: gmi or random");
  CLI::Option* o_variant = optimize->add_option("--variant", opt.variant, "cut family: gmi or log");
  CLI::Option* o_alpha = optimize->add_option("--alpha", opt.config.alpha, "learning rate");
  CLI::Option* o_beta = optimize->add_option("--beta", opt.config.beta, "target noise scale");
  CLI::Option* o_steps =
      optimize->add_option("--max-steps", opt.config.max_total_steps, "total gradient step budget");
  CLI::Option* o_inner =
      optimize->add_option("--max-inner", opt.config.max_inner, "gradient steps per LP solve");
  CLI::Option* o_outer = optimize->add_option("--max-outer", opt.config.max_outer, "LP solve budget");
  CLI::Option* o_seed = optimize->add_option("--seed", opt.config.seed, "noise / initializer seed");
  CLI::Option* o_ctol =
      optimize->add_option("--conv-tol", opt.config.conv_tol, "relative improvement threshold");
  CLI::Option* o_cwin =
      optimize->add_option("--conv-window", opt.config.conv_window, "stall window, outer iterations");
  optimize->add_option("--trace", opt.trace, "trace CSV path (directory in batch mode)");
  optimize->add_option("--out", opt.out, "best-net checkpoint path (directory in batch mode)");
  optimize->add_option("--jobs", opt.jobs, "parallel worker processes in batch mode")
      ->check(CLI::PositiveNumber);
  optimize->add_flag("--timing", opt.config.measure_time,
                     "record wall-clock seconds in the trace (breaks byte reproducibility)");

  config_file.bind(o_widths, "widths", opt.widths);
  config_file.bind(o_init, "init", opt.init);
  config_file.bind(o_variant, "variant", opt.variant);
  config_file.bind(o_alpha, "alpha", opt.config.alpha);
  config_file.bind(o_beta, "beta", opt.config.beta);
  config_file.bind(o_steps, "max-steps", opt.config.max_total_steps);
  config_file.bind(o_inner, "max-inner", opt.config.max_inner);
  config_file.bind(o_outer, "max-outer", opt.config.max_outer);
  config_file.bind(o_seed, "seed", opt.config.seed);
  config_file.bind(o_ctol, "conv-tol", opt.config.conv_tol);
  config_file.bind(o_cwin, "conv-window", opt.config.conv_window);

  SolveExactArgs sx;
  CLI::App* solve_exact = app.add_subcommand("solve-exact", "branch-and-bound to optimality");
  solve_exact->add_option("--instance", sx.instance, "instance file")->required();
  solve_exact->add_option("--node-limit", sx.node_limit, "node budget");
  solve_exact->add_flag("--write-back", sx.write_back, "store the optimum in the instance file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    config_file.apply();
    if (generate->parsed()) {
      gen.family = setcover->parsed() ? "setcover" : indepset->parsed() ? "indepset" : "mixed";
      return cmd_generate(gen);
    }
    if (baseline->parsed()) {
      base.rounds_given = b_rounds->count() > 0;
      return cmd_baseline(base);
    }
    if (optimize->parsed()) return cmd_optimize(opt);
    if (solve_exact->parsed()) return cmd_solve_exact(sx);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
