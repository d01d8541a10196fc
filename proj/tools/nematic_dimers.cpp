// nematic-dimers: command-line driver for the interacting dimer toolkit.
//
//   nematic-dimers run config.json [-o out] [--threads N]
//   nematic-dimers mc --rect 4x4 --z 2 --J 1 --edge 1,1,v --pair "1,0,v;1,2,v" -o occ.csv

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "nematic/cli.hpp"

namespace {

using nematic::json;

// "x,y,o" -> [[x,y],[x',y']]
json edge_flag(const std::string& text) {
  std::stringstream ss(text);
  std::string xs, ys, os;
  if (!std::getline(ss, xs, ',') || !std::getline(ss, ys, ',') || !std::getline(ss, os)) {
    throw CLI::ValidationError("--edge", "expected x,y,orient but got \"" + text + "\"");
  }
  const int x = std::stoi(xs), y = std::stoi(ys);
  if (os == "h") return json::array({json::array({x, y}), json::array({x + 1, y})});
  if (os == "v") return json::array({json::array({x, y}), json::array({x, y + 1})});
  throw CLI::ValidationError("--edge", "orientation must be h or v");
}

int finish(const nematic::cli::Outcome& o, const std::string& output) {
  if (o.exit_code != nematic::cli::ok) {
    std::cerr << o.error << '\n';
    return o.exit_code;
  }
  if (!nematic::cli::write_outputs(o, output, std::cout)) {
    std::cerr << "cli: cannot write " << output << '\n';
    return nematic::cli::validation_failed;
  }
  (output.empty() ? std::cerr : std::cout) << o.summary << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact enumeration, transfer matrices, loop decompositions, cluster expansions and Monte Carlo for "
               "the two-dimensional monomer-dimer model with aligned-dimer attraction"};
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "worker threads (default: NEMATIC_THREADS or 1)");

  std::string config_path, output;
  auto* run = app.add_subcommand("run", "execute a JSON RunConfig");
  run->add_option("config", config_path, "config file, - for stdin")->required();
  run->add_option("-o,--output", output, "output path (overrides output_path)");

  json mc = {{"subcommand", "mc"}};
  std::string rect = "4x4", q = "v";
  double z = 1.0, J = 0.0;
  int ell0 = 0, bin = 1000, chains = 1;
  std::uint64_t seed = 1;
  std::int64_t sweeps = 100000, therm = 10000;
  std::vector<std::string> edge_flags, pair_flags;
  bool conditional = false;
  std::string mc_output;
  auto* mcc = app.add_subcommand("mc", "Monte Carlo estimates of edge occupations and pair correlations");
  mcc->add_option("--rect", rect, "box WxH")->capture_default_str();
  mcc->add_option("--z", z)->capture_default_str();
  mcc->add_option("--J", J)->capture_default_str();
  mcc->add_option("--ell0", ell0)->capture_default_str();
  mcc->add_option("--q", q)->check(CLI::IsMember({"h", "v"}))->capture_default_str();
  mcc->add_option("--seed", seed)->capture_default_str();
  mcc->add_option("--sweeps", sweeps)->capture_default_str();
  mcc->add_option("--therm", therm)->capture_default_str();
  mcc->add_option("--bin", bin)->capture_default_str();
  mcc->add_option("--chains", chains)->capture_default_str();
  mcc->add_option("--edge", edge_flags, "x,y,orient (repeatable)");
  mcc->add_option("--pair", pair_flags, "x,y,orient;x,y,orient (repeatable)");
  mcc->add_flag("--conditional", conditional, "line-conditional estimator");
  mcc->add_option("-o,--output", mc_output, "CSV path; metadata goes to PATH.json");

  CLI11_PARSE(app, argc, argv);
  const int nthreads = nematic::cli::resolve_threads(threads);

  try {
    if (*run) {
      std::string text;
      if (config_path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
      } else {
        std::ifstream f(config_path);
        if (!f) {
          std::cerr << "cli: cannot read " << config_path << '\n';
          return nematic::cli::validation_failed;
        }
        text.assign(std::istreambuf_iterator<char>(f), {});
      }
      const auto outcome = nematic::cli::run_text(text, nthreads);
      if (output.empty() && outcome.exit_code == 0) {
        const json& cfg = outcome.result["config"];
        if (cfg.contains("output_path")) output = cfg["output_path"].get<std::string>();
      }
      return finish(outcome, output);
    }

    const auto x = rect.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("--rect", "expected WxH");
    mc["rect"] = {std::stoi(rect.substr(0, x)), std::stoi(rect.substr(x + 1))};
    mc["z"] = z;
    mc["J"] = J;
    mc["ell0"] = ell0;
    mc["q"] = q;
    mc["seed"] = seed;
    mc["sweeps"] = sweeps;
    mc["therm"] = therm;
    mc["bin"] = bin;
    mc["chains"] = chains;
    mc["estimator"] = conditional ? "conditional" : "indicator";
    mc["edges"] = json::array();
    for (const auto& e : edge_flags) mc["edges"].push_back(edge_flag(e));
    mc["pairs"] = json::array();
    for (const auto& p : pair_flags) {
      const auto semi = p.find(';');
      if (semi == std::string::npos) throw CLI::ValidationError("--pair", "expected two edges separated by ';'");
      mc["pairs"].push_back({edge_flag(p.substr(0, semi)), edge_flag(p.substr(semi + 1))});
    }
    return finish(nematic::cli::run(mc, nthreads), mc_output);
  } catch (const std::exception& e) {
    std::cerr << "cli: " << e.what() << '\n';
    return nematic::cli::validation_failed;
  }
}
