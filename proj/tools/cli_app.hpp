#pragma once

// mclim command-line front end. Kept in a header so tests can drive it
// in-process through run_cli().
//
// Exit codes: 0 success, 1 validation failure, 2 tie, 3 non-convergence /
// non-alternating / reducible, 4 parse, IO or usage error.
//
// --machine appends key=value lines. Keys:
//   validate     states ok errors tie_warnings
//   limit        limit (one line per start: "<start>:<A>,<B>,...,<start>")
//   simulate     run (one per replica: "<seed>:<converged>:<events>:<cycle or ->")
//                runs converged agreed agreement greedy epsilon delta
//   sojourn      method s_good s_bad stc residual replications se_good se_bad cycle note
//   export-dot   nodes edges highlighted_edges output

#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mclim/mclim.hpp"

namespace mclim::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kTie = 2, kNoConvergence = 3, kUsage = 4 };

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string num(double v) { return detail::format_g(v, 17); }
inline std::string shown(double v) { return detail::format_g(v, 12); }

inline std::string join_cycle(const ChainModel& m, const Cycle& c, StateIndex entry) {
  std::string s;
  for (auto x : c.from(entry)) s += m.names[x] + ",";
  return s + m.names[entry];
}

struct Options {
  std::string model_path;
  bool machine = false;

  // limit
  std::string start;
  bool all_starts = false;
  std::optional<double> perturb;

  // simulate
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  std::uint64_t runs = 1;
  std::uint64_t max_events = 1'000'000;
  double delta = 0.01;

  // sojourn
  std::vector<std::string> good;
  std::string mode = "stationary";
  std::uint64_t entries = 100'000;

  // export-dot
  std::string cycle_from;
  std::string output;
};

inline int cmd_validate(const Options& o, std::ostream& out) {
  const ChainModel model = read_model(read_file(o.model_path));
  const auto rep = validate(model);
  const auto errors = rep.count(Severity::error);
  out << o.model_path << ": " << model.size() << " states, " << rep.tie_warnings() << " tie warnings";
  if (errors) out << ", " << errors << " errors";
  out << "\n";
  for (const auto& i : rep.issues) out << "  " << (i.severity == Severity::error ? "error: " : "warning: ") << i.message << "\n";
  out << (rep.ok ? "valid\n" : "INVALID\n");
  if (o.machine) {
    out << "states=" << model.size() << "\nok=" << (rep.ok ? 1 : 0) << "\nerrors=" << errors
        << "\ntie_warnings=" << rep.tie_warnings() << "\n";
  }
  return rep.ok ? kOk : kInvalid;
}

inline int cmd_limit(const Options& o, std::ostream& out) {
  ChainModel model = parse_model(read_file(o.model_path));
  if (o.perturb) model = perturb_ties(model, *o.perturb);
  std::vector<StateIndex> starts;
  if (o.all_starts) {
    for (StateIndex s = 0; s < model.size(); ++s) starts.push_back(s);
  } else {
    starts.push_back(o.start.empty() ? 0 : model.index_of(o.start));
  }
  std::ostringstream machine;
  for (auto s : starts) {
    const auto path = greedy_walk(model, s);
    const auto cycle = extract_cycle(path);
    out << model.names[s] << ": " << format_cycle(model, cycle, path.entry()) << "\n";
    machine << "limit=" << model.names[s] << ":" << join_cycle(model, cycle, path.entry()) << "\n";
  }
  if (o.machine) out << machine.str();
  return kOk;
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
  const ChainModel model = parse_model(read_file(o.model_path));
  SimConfig base;
  base.epsilon = o.epsilon;
  base.delta = o.delta;
  base.max_events = o.max_events;
  base.start = o.start.empty() ? 0 : model.index_of(o.start);
  base.seed = o.seed;
  base.check(model.size());
  if (o.runs < 1) throw std::invalid_argument("--runs must be at least 1");
  const Cycle greedy = limit_of(model, base.start);

  // Share-nothing replicas, one seed each; results collected in seed order.
  std::vector<SimResult> results(o.runs);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(o.runs, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = w; k < results.size(); k += workers) {
        SimConfig cfg = base;
        cfg.seed = base.seed + k;
        results[k] = run(model, cfg);
      }
    }));
  }
  for (auto& j : jobs) j.get();

  std::uint64_t converged = 0, agreed = 0;
  std::ostringstream machine;
  for (const auto& r : results) {
    out << "seed " << r.seed << ": ";
    if (r.converged) {
      ++converged;
      if (*r.realized == greedy) ++agreed;
      out << "converged after " << r.events_used << " events, cycle " << format_cycle(model, *r.realized) << "\n";
      machine << "run=" << r.seed << ":1:" << r.events_used << ":"
              << join_cycle(model, *r.realized, r.realized->states().front()) << "\n";
    } else {
      out << "not converged after " << r.events_used << " events\n";
      machine << "run=" << r.seed << ":0:" << r.events_used << ":-\n";
    }
  }
  const double fraction = converged ? static_cast<double>(agreed) / static_cast<double>(converged) : 0.0;
  out << converged << "/" << o.runs << " converged\n";
  out << "greedy limit: " << format_cycle(model, greedy) << "\n";
  out << "agreement with greedy limit: " << agreed << "/" << converged << " = " << shown(fraction) << "\n";
  if (o.machine) {
    out << machine.str() << "runs=" << o.runs << "\nconverged=" << converged << "\nagreed=" << agreed
        << "\nagreement=" << num(fraction) << "\ngreedy=" << join_cycle(model, greedy, greedy.states().front())
        << "\nepsilon=" << num(o.epsilon) << "\ndelta=" << num(o.delta) << "\n";
  }
  return converged == o.runs ? kOk : kNoConvergence;
}

inline int cmd_sojourn(const Options& o, std::ostream& out) {
  const ChainModel model = parse_model(read_file(o.model_path));
  const Partition part = Partition::from_names(model, o.good);
  SojournReport rep;
  if (o.mode == "stationary") {
    rep = stationary_sojourn(model, part);
  } else if (o.mode == "cycle") {
    const StateIndex start = o.start.empty() ? 0 : model.index_of(o.start);
    rep = cycle_sojourn(model, limit_of(model, start), part);
  } else if (o.mode == "mc") {
    rep = monte_carlo_sojourn(model, part, o.seed, o.entries);
  } else {
    throw std::invalid_argument("unknown --mode '" + o.mode + "'");
  }

  out << "s(G)=" << shown(rep.s_good) << " s(Gc)=" << shown(rep.s_bad) << " STC=" << shown(rep.stc) << "\n";
  out << "method: " << to_string(rep.method) << "\n";
  const auto& d = rep.detail;
  if (d.residual) out << "stationary residual: " << detail::format_g(*d.residual, 3) << "\n";
  if (d.cycle) out << "cycle: " << format_cycle(model, *d.cycle) << "\n";
  if (d.replications)
    out << "entries averaged: " << *d.replications << ", standard errors: s(G) " << shown(*d.se_good) << ", s(Gc) "
        << shown(*d.se_bad) << "\n";
  if (!d.note.empty()) out << "note: " << d.note << "\n";

  if (o.machine) {
    out << "method=" << to_string(rep.method) << "\ns_good=" << num(rep.s_good) << "\ns_bad=" << num(rep.s_bad)
        << "\nstc=" << num(rep.stc) << "\n";
    if (d.residual) out << "residual=" << num(*d.residual) << "\n";
    if (d.replications)
      out << "replications=" << *d.replications << "\nse_good=" << num(*d.se_good) << "\nse_bad=" << num(*d.se_bad)
          << "\n";
    if (d.cycle) out << "cycle=" << join_cycle(model, *d.cycle, d.cycle->states().front()) << "\n";
    if (!d.note.empty()) out << "note=" << d.note << "\n";
  }
  return kOk;
}

inline int cmd_export_dot(const Options& o, std::ostream& out) {
  const ChainModel model = parse_model(read_file(o.model_path));
  std::optional<Cycle> cycle;
  if (!o.cycle_from.empty()) cycle = limit_of(model, model.index_of(o.cycle_from));
  const std::string dot = to_dot(model, cycle);

  if (o.output.empty()) {
    out << dot;
  } else {
    std::ofstream f(o.output, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + o.output + "'");
    f << dot;
    if (!f.flush()) throw IoError("write failed for '" + o.output + "'");
  }
  if (o.machine) {
    std::size_t edges = 0;
    for (std::size_t i = 0; i < model.size(); ++i)
      for (std::size_t j = 0; j < model.size(); ++j) edges += model.trans(i, j) > 0.0;
    out << "nodes=" << model.size() << "\nedges=" << edges << "\nhighlighted_edges=" << (cycle ? cycle->size() : 0)
        << "\noutput=" << (o.output.empty() ? "-" : o.output) << "\n";
  }
  return kOk;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Limits of epsilon-reinforced continuous-time Markov chains", "mclim"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("model", o.model_path, "Model file")->required();
    sub->add_flag("--machine", o.machine, "Append key=value lines");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a model file");
  common(validate_cmd);

  auto* limit_cmd = app.add_subcommand("limit", "Greedy limit cycle per start state");
  common(limit_cmd);
  auto* start_opt = limit_cmd->add_option("--start", o.start, "Start state name");
  auto* all_opt = limit_cmd->add_flag("--all-starts", o.all_starts, "Report every start state");
  start_opt->excludes(all_opt);
  limit_cmd->add_option("--perturb", o.perturb, "Break tied row maxima with this magnitude");

  auto* sim_cmd = app.add_subcommand("simulate", "Run seeded reinforcement simulations");
  common(sim_cmd);
  sim_cmd->add_option("--epsilon", o.epsilon, "Reinforcement fraction")->capture_default_str();
  sim_cmd->add_option("--seed", o.seed, "First seed")->capture_default_str();
  sim_cmd->add_option("--runs", o.runs, "Number of replicas")->capture_default_str();
  sim_cmd->add_option("--max-events", o.max_events, "Event budget per replica")->capture_default_str();
  sim_cmd->add_option("--delta", o.delta, "Concentration threshold")->capture_default_str();
  sim_cmd->add_option("--start", o.start, "Start state name");

  auto* soj_cmd = app.add_subcommand("sojourn", "Sojourn-time cycle for a partition");
  common(soj_cmd);
  soj_cmd->add_option("--good", o.good, "Comma-separated states in G")->required()->delimiter(',');
  soj_cmd->add_option("--mode", o.mode, "stationary | cycle | mc")
      ->check(CLI::IsMember({"stationary", "cycle", "mc"}))
      ->capture_default_str();
  soj_cmd->add_option("--start", o.start, "Start state for cycle mode");
  soj_cmd->add_option("--entries", o.entries, "G-entries to average in mc mode")->capture_default_str();
  soj_cmd->add_option("--seed", o.seed, "Seed for mc mode")->capture_default_str();

  auto* dot_cmd = app.add_subcommand("export-dot", "Write the transition network as Graphviz DOT");
  common(dot_cmd);
  dot_cmd->add_option("--cycle-from", o.cycle_from, "Highlight the limit cycle from this start");
  dot_cmd->add_option("-o,--output", o.output, "Output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "mclim: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(o, out);
    if (limit_cmd->parsed()) return cmd_limit(o, out);
    if (sim_cmd->parsed()) return cmd_simulate(o, out);
    if (soj_cmd->parsed()) return cmd_sojourn(o, out);
    if (dot_cmd->parsed()) return cmd_export_dot(o, out);
  } catch (const TieError& e) {
    err << "mclim: " << e.what() << " (try --perturb 1e-9 with 'limit', or edit the model)\n";
    return kTie;
  } catch (const ReducibleChainError& e) {
    err << "mclim: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const NonAlternatingError& e) {
    err << "mclim: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const ModelError& e) {
    err << "mclim: invalid model:\n" << e.what();
    return kInvalid;
  } catch (const std::exception& e) {
    err << "mclim: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace mclim::cli
