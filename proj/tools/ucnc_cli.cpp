#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ucnc/harness.hpp"
#include "ucnc/oracle.hpp"

using namespace ucnc;

namespace {

struct Source {
  std::string config;
  std::string preset;
  std::uint64_t preset_seed = 1;
};

void add_source(CLI::App* app, Source& source) {
  auto* config = app->add_option("-c,--config", source.config, "Scenario config file (JSON)");
  auto* name = app->add_option("-p,--preset", source.preset, "Built-in preset name");
  config->excludes(name);
  app->add_option("--preset-seed", source.preset_seed, "Generator seed for randomized presets")->capture_default_str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Scenario load(const Source& source) {
  if (!source.config.empty()) return load_scenario(read_file(source.config));
  if (!source.preset.empty()) return preset(source.preset, source.preset_seed);
  throw std::runtime_error("one of --config or --preset is required");
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct Overrides {
  std::string policy;
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> lambdas;
};

void add_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--policy", o.policy, "Policy name");
  app->add_option("-T,--horizon", o.horizon, "Number of slots");
  app->add_option("--seeds", o.seeds, "Arrival seeds")->delimiter(',');
  app->add_option("--lambda", o.lambdas, "Rate multipliers")->delimiter(',');
}

void apply(const Overrides& o, Scenario& s) {
  if (!o.policy.empty()) s.policy = parse_policy(o.policy);
  if (o.horizon > 0) s.horizon = o.horizon;
  if (!o.seeds.empty()) s.seeds = o.seeds;
  if (!o.lambdas.empty()) s.lambda_grid = o.lambdas;
  validate_scenario(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal computing network control simulator"};
  app.require_subcommand(1);

  Source source;
  Overrides overrides;
  std::string output;

  auto* run_cmd = app.add_subcommand("run", "Simulate the scenario's policy for each lambda and seed");
  add_source(run_cmd, source);
  add_overrides(run_cmd, overrides);
  run_cmd->add_option("-o,--output", output, "CSV output path (default stdout)");
  std::string trace_path;
  run_cmd->add_option("--backlog-trace", trace_path, "Write the total backlog per slot of the first run");

  auto* sweep_cmd = app.add_subcommand("sweep", "Simulate several policies over the lambda grid and seeds");
  add_source(sweep_cmd, source);
  add_overrides(sweep_cmd, overrides);
  std::vector<std::string> policies;
  unsigned threads = 0;
  sweep_cmd->add_option("--policies", policies, "Policies to compare (default: all)")->delimiter(',');
  sweep_cmd->add_option("-j,--threads", threads, "Worker threads (default: hardware)");
  sweep_cmd->add_option("-o,--output", output, "CSV output path (default stdout)");

  auto* capacity_cmd = app.add_subcommand("capacity", "Query the capacity region");
  add_source(capacity_cmd, source);
  std::vector<std::string> direction;
  std::vector<std::string> rates;
  std::string witness_path;
  std::string route_mode = "auto";
  capacity_cmd->add_option("--direction", direction, "Direction for the maximum scalar rate (default: base rates)")
      ->delimiter(',');
  capacity_cmd->add_option("--rates", rates, "Rate vector to test for membership")->delimiter(',');
  capacity_cmd->add_option("--witness", witness_path, "Write the flow assignment as JSON");
  capacity_cmd->add_option("--routes", route_mode, "Route source: auto, enumerate, generate")->capture_default_str();
  bool split = false;
  capacity_cmd->add_flag("--split-multicast", split, "Treat multicast commodities as unicast flows");

  auto* presets_cmd = app.add_subcommand("presets", "List presets or export one as a config file");
  std::string export_name;
  std::uint64_t export_seed = 1;
  presets_cmd->add_option("--export", export_name, "Preset to print as a config document");
  presets_cmd->add_option("--preset-seed", export_seed, "Generator seed for randomized presets");

  auto* plot_cmd = app.add_subcommand("gnuplot", "Convert CSV results into gnuplot data blocks");
  std::string csv_path;
  plot_cmd->add_option("csv", csv_path, "CSV file produced by run or sweep")->required();
  plot_cmd->add_option("-o,--output", output, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      Scenario s = load(source);
      apply(overrides, s);
      std::vector<CsvRow> rows;
      bool first = true;
      for (double lambda : s.lambda_grid) {
        for (std::uint64_t seed : s.seeds) {
          RunResult r = run(s, lambda, seed);
          rows.insert(rows.end(), r.rows.begin(), r.rows.end());
          if (first && !trace_path.empty()) {
            std::ostringstream trace;
            for (std::size_t t = 0; t < r.backlog_trace.size(); ++t) trace << t << ' ' << r.backlog_trace[t] << '\n';
            write_output(trace_path, trace.str());
          }
          first = false;
        }
      }
      write_output(output, to_csv(rows));
    } else if (*sweep_cmd) {
      Scenario s = load(source);
      apply(overrides, s);
      std::vector<Policy> selected;
      for (const auto& p : policies) selected.push_back(parse_policy(p));
      if (selected.empty()) selected = all_policies();
      write_output(output, to_csv(sweep(s, selected, s.lambda_grid, s.seeds, threads)));
    } else if (*capacity_cmd) {
      Scenario s = load(source);
      if (split) s = split_multicast(s);
      auto model = make_service_model(s.net, s.chains, s.commodities);
      OracleOptions options;
      if (route_mode == "enumerate") {
        options.routes = RouteSource::kEnumerate;
      } else if (route_mode == "generate") {
        options.routes = RouteSource::kColumnGeneration;
      } else if (route_mode != "auto") {
        throw std::invalid_argument("unknown route source '" + route_mode + "'");
      }
      auto parse_vector = [&](const std::vector<std::string>& text) {
        if (text.size() != model->commodities.size()) {
          throw std::invalid_argument("expected " + std::to_string(model->commodities.size()) + " entries");
        }
        RateVector v;
        for (const auto& t : text) v.push_back(parse_rational(t));
        return v;
      };
      if (!rates.empty()) {
        const RateVector r = parse_vector(rates);
        const Feasibility f = capacity_feasible(*model, r, options);
        std::cout << (f.feasible ? "feasible" : "infeasible") << '\n';
        if (f.witness && !witness_path.empty()) write_output(witness_path, assignment_to_json(*model, *f.witness).dump(2) + "\n");
      } else {
        RateVector dir;
        if (direction.empty()) {
          for (const auto& c : model->commodities) dir.push_back(c.rate);
        } else {
          dir = parse_vector(direction);
        }
        const ScalarRate r = max_scalar_rate(*model, dir, options);
        if (r.unbounded) {
          std::cout << "theta* unbounded\n";
        } else {
          std::printf("theta* = %s (%.9g)\n", to_string(r.theta).c_str(), to_double(r.theta));
        }
        std::printf("route columns: %zu (%s)\n", r.route_columns,
                    r.column_generation ? "column generation" : "enumeration");
        if (!witness_path.empty()) write_output(witness_path, assignment_to_json(*model, r.assignment).dump(2) + "\n");
      }
    } else if (*presets_cmd) {
      if (export_name.empty()) {
        for (const auto& name : preset_names()) std::cout << name << '\n';
      } else {
        std::cout << scenario_to_json(preset(export_name, export_seed)).dump(2) << '\n';
      }
    } else if (*plot_cmd) {
      write_output(output, gnuplot_columns(parse_csv(read_file(csv_path))));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
