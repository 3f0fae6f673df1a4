#include "prefsched/bounds.hpp"
#include "prefsched/feasible.hpp"
#include "prefsched/gen.hpp"
#include "prefsched/sim.hpp"
#include "prefsched/stream_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace prefsched;
using ordered_json = nlohmann::ordered_json;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write output file: " + path);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  open_output(path) << text;
}

void save_with_metadata(const QueryStream& stream, const std::string& out_path,
                        const ordered_json& metadata) {
  save_stream(stream, out_path);
  open_output(out_path + ".meta.json") << metadata.dump(2) << '\n';
}

SimConfig make_config(const std::string& start, const std::string& c_attn,
                      std::optional<std::uint64_t> batch_bin) {
  SimConfig cfg;
  cfg.cost.c_attn = parse_decimal(c_attn);
  if (cfg.cost.c_attn < 0) {
    throw CLI::ValidationError("--c-attn must be >= 0");
  }
  if (start != "immediate") {
    constexpr std::string_view prefix = "delayed:";
    if (start.rfind(prefix, 0) != 0) {
      throw CLI::ValidationError("--start must be 'immediate' or 'delayed:<T>'");
    }
    cfg.start_mode = StartMode::delayed;
    cfg.start_at = parse_decimal(start.substr(prefix.size()));
    if (cfg.start_at < 0) {
      throw CLI::ValidationError("--start delayed:<T> needs T >= 0");
    }
  }
  cfg.batch_bin = batch_bin;
  return cfg;
}

Scheduler policy_or_fail(const std::string& text) {
  const auto policy = parse_policy(text);
  if (!policy) {
    throw CLI::ValidationError("unknown policy '" + text +
                               "' (expected fcfs, lpm, klpm:<k>, or klpm:inf)");
  }
  return *policy;
}

std::string summary_line(const SimResult& result) {
  std::string line = "summary max=" + to_decimal_string(result.max_ttft);
  const char* names[] = {"p50", "p90", "p95", "p99"};
  for (std::size_t i = 0; i < result.percentile_table.size() && i < 4; ++i) {
    line += std::string(" ") + names[i] + "=" +
            to_decimal_string(result.percentile_table[i].second);
  }
  return line;
}

struct SweepAxis {
  bool poisson = false;
  std::vector<std::string> values;  // gap or rate literals
};

void run_sweep(const std::vector<std::string>& k_values, const SweepAxis& axis,
               std::uint64_t n, std::uint64_t k_rep, std::uint64_t u, std::uint64_t d,
               const std::string& c_attn, std::uint64_t seeds, std::uint64_t base_seed,
               const std::string& out_path) {
  if (k_values.empty() || axis.values.empty()) {
    throw CLI::ValidationError("sweep needs non-empty --k and --s/--rate grids");
  }
  if (seeds == 0) {
    throw CLI::ValidationError("--seeds must be >= 1");
  }
  SimConfig cfg;
  cfg.cost.c_attn = parse_decimal(c_attn);

  std::string csv = "policy,k,s_or_rate,n,u,d,c_attn,seed,max,p50,p90,p95,p99\n";
  for (const std::string& k_text : k_values) {
    Scheduler policy = Scheduler::klpm_inf();
    std::string label = "lpm";
    if (k_text != "inf") {
      const std::uint64_t k = std::stoull(k_text);
      policy = Scheduler::klpm(k);
      label = k == 1 ? "fcfs" : "klpm";
    }
    for (const std::string& axis_text : axis.values) {
      for (std::uint64_t offset = 0; offset < seeds; ++offset) {
        const std::uint64_t seed = base_seed + offset;
        QueryStream stream;
        if (axis.poisson) {
          PoissonParams params;
          params.n = n;
          params.k_rep = k_rep;
          params.u = u;
          params.d = d;
          params.rate = std::stod(axis_text);
          params.seed = seed;
          stream = gen_poisson(params);
        } else {
          ShuffledQueueParams params;
          params.n = n;
          params.k_rep = k_rep;
          params.u = u;
          params.d = d;
          params.s = parse_decimal(axis_text);
          params.seed = seed;
          stream = gen_shuffled(params);
        }
        const auto [schedule, result] = run_policy(stream, policy, cfg, seed);
        csv += label + "," + k_text + "," + axis_text + "," + std::to_string(n) + "," +
               std::to_string(u) + "," + std::to_string(d) + "," + c_attn + "," +
               std::to_string(seed) + "," + to_decimal_string(result.max_ttft);
        for (const auto& [p, value] : result.percentile_table) {
          csv += "," + to_decimal_string(value);
        }
        csv += "\n";
      }
    }
  }
  write_text(out_path, csv);
}

void run_bounds(const BoundInputs& inputs, std::optional<std::uint64_t> j,
                const std::string& format, const std::string& out_path) {
  struct Row {
    std::string formula;
    std::string value;
  };
  std::vector<Row> rows = {
      {"klpm_upper", to_number_string(klpm_upper(inputs))},
      {"lpm_lower", to_number_string(lpm_lower(inputs))},
      {"fcfs_lower", to_number_string(fcfs_lower(inputs))},
  };
  if (j) {
    rows.push_back({"lpm_completion_identity[j=" + std::to_string(*j) + "]",
                    to_number_string(lpm_completion_identity(*j, inputs.k, inputs.u,
                                                             inputs.d, inputs.start_at))});
  }
  rows.push_back({"separation_holds", separation_holds(inputs) ? "true" : "false"});

  const std::string s_text = to_number_string(inputs.s);
  const std::string t_text = to_number_string(inputs.start_at);
  const std::string eps_text = to_number_string(inputs.epsilon);
  if (format == "json") {
    ordered_json table = ordered_json::array();
    for (const Row& row : rows) {
      ordered_json entry;
      entry["formula"] = row.formula;
      entry["inputs"] = ordered_json{{"n", inputs.n}, {"u", inputs.u}, {"d", inputs.d},
                                     {"s", s_text},   {"k", inputs.k}, {"T", t_text},
                                     {"epsilon", eps_text}};
      entry["value"] = row.value;
      table.push_back(entry);
    }
    write_text(out_path, table.dump(2) + "\n");
    return;
  }
  std::string csv = "formula,n,u,d,s,k,T,epsilon,value\n";
  for (const Row& row : rows) {
    csv += row.formula + "," + std::to_string(inputs.n) + "," + std::to_string(inputs.u) +
           "," + std::to_string(inputs.d) + "," + s_text + "," + std::to_string(inputs.k) +
           "," + t_text + "," + eps_text + "," + row.value + "\n";
  }
  write_text(out_path, csv);
}

void run_feasible(const std::string& stream_path, const std::string& t_text,
                  const std::string& p_text, const std::string& mode, std::size_t limit,
                  const std::string& out_path) {
  const QueryStream stream = load_stream(stream_path);
  const Time ttft_limit = parse_decimal(t_text);
  FeasibleOptions opts;
  opts.brute_force_limit = limit;

  FeasibilityOutcome outcome;
  if (mode == "exact") {
    outcome = brute_force(stream, ttft_limit, SimConfig{}, opts);
  } else if (mode == "percentile") {
    outcome = percentile_schedule(stream, ttft_limit, parse_decimal(p_text), opts);
  } else {
    throw CLI::ValidationError("--mode must be 'exact' or 'percentile'");
  }

  ordered_json report;
  report["outcome"] = outcome.feasible ? "feasible" : "infeasible";
  report["satisfied_count"] = outcome.satisfied_count;
  report["schedule"] = outcome.schedule.order;
  if (!outcome.feasible) {
    report["certificate"] = outcome.certificate;
  }
  write_text(out_path, report.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator for LLM query scheduling under prefix reuse"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "Generate a query stream (JSONL + metadata)");
  gen->require_subcommand(1);

  ShuffledQueueParams shuffled_params;
  std::string shuffled_s = "0";
  std::string gen_out;
  auto* shuffled = gen->add_subcommand("shuffled", "Regular-arrival shuffled queue");
  shuffled->add_option("--n", shuffled_params.n, "stream length")->required();
  shuffled->add_option("--k-rep", shuffled_params.k_rep, "queries per user prefix")->required();
  shuffled->add_option("--u", shuffled_params.u, "user prefix length")->required();
  shuffled->add_option("--d", shuffled_params.d, "doc suffix length")->required();
  shuffled->add_option("--s", shuffled_s, "inter-arrival gap (decimal)")->required();
  shuffled->add_option("--seed", shuffled_params.seed, "shuffle seed");
  shuffled->add_option("--out", gen_out, "output JSONL path")->required();
  shuffled->callback([&] {
    shuffled_params.s = parse_decimal(shuffled_s);
    const QueryStream stream = gen_shuffled(shuffled_params);
    ordered_json metadata;
    metadata["generator"] = "shuffled";
    metadata["n"] = shuffled_params.n;
    metadata["k_rep"] = shuffled_params.k_rep;
    metadata["u"] = shuffled_params.u;
    metadata["d"] = shuffled_params.d;
    metadata["s"] = shuffled_s;
    metadata["seed"] = shuffled_params.seed;
    save_with_metadata(stream, gen_out, metadata);
  });

  PartitionInstance partition_inst;
  auto* partition = gen->add_subcommand("partition", "Hardness-reduction stream");
  partition->set_help_flag("--help", "print help");  // frees -h for the --h option
  partition->add_option("--m", partition_inst.m, "number of triples")->required();
  partition->add_option("--h", partition_inst.h, "per-triple target sum")->required();
  partition->add_option("--a", partition_inst.a, "comma-separated 3m integers")
      ->required()
      ->delimiter(',');
  partition->add_option("--out", gen_out, "output JSONL path")->required();
  partition->callback([&] {
    const PartitionStream ps = gen_3partition_stream(partition_inst);
    ordered_json metadata;
    metadata["generator"] = "partition";
    metadata["m"] = partition_inst.m;
    metadata["h"] = partition_inst.h;
    metadata["a"] = partition_inst.a;
    metadata["T"] = to_u64(ceil_of(ps.ttft_bound));
    save_with_metadata(ps.stream, gen_out, metadata);
  });

  PoissonParams poisson_params;
  auto* poisson = gen->add_subcommand("poisson", "Poisson-arrival stream");
  poisson->add_option("--n", poisson_params.n, "stream length")->required();
  poisson->add_option("--k-rep", poisson_params.k_rep, "queries per user prefix")->required();
  poisson->add_option("--u", poisson_params.u, "user prefix length")->required();
  poisson->add_option("--d", poisson_params.d, "doc suffix length")->required();
  poisson->add_option("--rate", poisson_params.rate, "arrival rate (queries per token-time)")
      ->required();
  poisson->add_option("--seed", poisson_params.seed, "rng seed");
  poisson->add_option("--out", gen_out, "output JSONL path")->required();
  poisson->callback([&] {
    const QueryStream stream = gen_poisson(poisson_params);
    ordered_json metadata;
    metadata["generator"] = "poisson";
    metadata["n"] = poisson_params.n;
    metadata["k_rep"] = poisson_params.k_rep;
    metadata["u"] = poisson_params.u;
    metadata["d"] = poisson_params.d;
    metadata["rate"] = poisson_params.rate;
    metadata["seed"] = poisson_params.seed;
    save_with_metadata(stream, gen_out, metadata);
  });

  auto* toy = gen->add_subcommand("toy", "Four-query worked example");
  toy->add_option("--out", gen_out, "output JSONL path")->required();
  toy->callback([&] {
    ordered_json metadata;
    metadata["generator"] = "toy";
    save_with_metadata(gen_toy(), gen_out, metadata);
  });

  // ---- run ----
  auto* run = app.add_subcommand("run", "Simulate one policy over a stream file");
  std::string run_stream;
  std::string run_policy_text = "fcfs";
  std::string run_start = "immediate";
  std::string run_c_attn = "0";
  std::uint64_t run_seed = 0;
  std::optional<std::uint64_t> run_batch_bin;
  std::string run_out;
  run->add_option("--stream", run_stream, "input JSONL stream")->required();
  run->add_option("--policy", run_policy_text, "fcfs | lpm | klpm:<k> | klpm:inf");
  run->add_option("--start", run_start, "immediate | delayed:<T>");
  run->add_option("--c-attn", run_c_attn, "quadratic attention weight (decimal)");
  run->add_option("--seed", run_seed, "tie-break seed");
  run->add_option("--batch-bin", run_batch_bin, "batch-size binning B");
  run->add_option("--out", run_out, "per-query CSV path")->required();
  run->callback([&] {
    const QueryStream stream = load_stream(run_stream);
    const SimConfig cfg = make_config(run_start, run_c_attn, run_batch_bin);
    const auto [schedule, result] =
        run_policy(stream, policy_or_fail(run_policy_text), cfg, run_seed);
    std::ostringstream csv;
    write_result_csv(result, csv);
    write_text(run_out, csv.str());
    std::cout << summary_line(result) << '\n';
  });

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "Grid of seeded runs, one CSV row per cell");
  std::vector<std::string> sweep_k;
  std::vector<std::string> sweep_s;
  std::vector<std::string> sweep_rate;
  std::uint64_t sweep_n = 0;
  std::uint64_t sweep_k_rep = 4;
  std::uint64_t sweep_u = 0;
  std::uint64_t sweep_d = 0;
  std::string sweep_c_attn = "0";
  std::uint64_t sweep_seeds = 1;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  sweep->add_option("--k", sweep_k, "k grid, e.g. 1,4,inf")->required()->delimiter(',');
  sweep->add_option("--s", sweep_s, "gap grid (decimals)")->delimiter(',');
  sweep->add_option("--rate", sweep_rate, "Poisson rate grid")->delimiter(',');
  sweep->add_option("--n", sweep_n, "stream length")->required();
  sweep->add_option("--k-rep", sweep_k_rep, "user replication of the stream");
  sweep->add_option("--u", sweep_u, "user prefix length")->required();
  sweep->add_option("--d", sweep_d, "doc suffix length")->required();
  sweep->add_option("--c-attn", sweep_c_attn, "quadratic attention weight");
  sweep->add_option("--seeds", sweep_seeds, "seeds per cell");
  sweep->add_option("--seed", sweep_seed, "base seed");
  sweep->add_option("--out", sweep_out, "output CSV path")->required();
  sweep->callback([&] {
    if (sweep_s.empty() == sweep_rate.empty()) {
      throw CLI::ValidationError("provide exactly one of --s or --rate");
    }
    SweepAxis axis;
    axis.poisson = !sweep_rate.empty();
    axis.values = axis.poisson ? sweep_rate : sweep_s;
    run_sweep(sweep_k, axis, sweep_n, sweep_k_rep, sweep_u, sweep_d, sweep_c_attn,
              sweep_seeds, sweep_seed, sweep_out);
  });

  // ---- bounds ----
  auto* bounds = app.add_subcommand("bounds", "Evaluate the closed-form TTFT bounds");
  BoundInputs bound_inputs;
  std::string bounds_s = "0";
  std::string bounds_t = "0";
  std::string bounds_eps = "0.1";
  std::optional<std::uint64_t> bounds_j;
  std::string bounds_format = "csv";
  std::string bounds_out;
  bounds->add_option("--n", bound_inputs.n, "stream length")->required();
  bounds->add_option("--u", bound_inputs.u, "user prefix length")->required();
  bounds->add_option("--d", bound_inputs.d, "doc suffix length")->required();
  bounds->add_option("--s", bounds_s, "inter-arrival gap (decimal)")->required();
  bounds->add_option("--k", bound_inputs.k, "cycle length / user replication")->required();
  bounds->add_option("--t", bounds_t, "delayed-start origin T");
  bounds->add_option("--epsilon", bounds_eps, "asymptotic slack");
  bounds->add_option("--j", bounds_j, "also evaluate the LPM completion identity at j");
  bounds->add_option("--format", bounds_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  bounds->add_option("--out", bounds_out, "output path (stdout when omitted)");
  bounds->callback([&] {
    bound_inputs.s = parse_decimal(bounds_s);
    bound_inputs.start_at = parse_decimal(bounds_t);
    bound_inputs.epsilon = parse_decimal(bounds_eps);
    run_bounds(bound_inputs, bounds_j, bounds_format, bounds_out);
  });

  // ---- feasible ----
  auto* feasible = app.add_subcommand("feasible", "TTFT feasibility search over a stream");
  std::string feasible_stream;
  std::string feasible_t;
  std::string feasible_p = "0.5";
  std::string feasible_mode = "exact";
  std::size_t feasible_limit = 10;
  std::string feasible_out;
  feasible->add_option("--stream", feasible_stream, "input JSONL stream")->required();
  feasible->add_option("--t", feasible_t, "TTFT limit (decimal)")->required();
  feasible->add_option("--p", feasible_p, "percentile fraction p in (0,1)");
  feasible->add_option("--mode", feasible_mode, "exact | percentile");
  feasible->add_option("--limit", feasible_limit, "max n for the exact search");
  feasible->add_option("--out", feasible_out, "output path (stdout when omitted)");
  feasible->callback([&] {
    run_feasible(feasible_stream, feasible_t, feasible_p, feasible_mode, feasible_limit,
                 feasible_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const InstanceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
