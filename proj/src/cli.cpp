#include "nematic/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nematic/decomposition.hpp"
#include "nematic/error.hpp"
#include "nematic/montecarlo.hpp"
#include "nematic/polymer_bridge.hpp"
#include "nematic/polymer_cluster.hpp"
#include "nematic/transfer1d.hpp"

namespace nematic::cli {

namespace {

const std::vector<std::string> kCommon = {"subcommand", "output_path"};

std::vector<std::string> keys(std::initializer_list<const char*> extra) {
  std::vector<std::string> k = kCommon;
  for (const char* e : extra) k.emplace_back(e);
  return k;
}

ModelParams params_of(const json& j) {
  if (!j.contains("z")) throw ValidationError("cli", "missing \"z\"");
  ModelParams p{j["z"].get<double>(), j.value("J", 0.0)};
  p.validate();
  return p;
}

BoundaryCondition bc_of(const json& j) {
  BoundaryCondition bc;
  bc.q = parse_orientation(j.value("q", std::string("v")));
  bc.ell0 = j.value("ell0", 0);
  if (j.contains("magnetized")) bc.magnetized = edges_from_json(j["magnetized"]);
  return bc;
}

Region region_of(const json& j) {
  if (j.contains("rect") && j.contains("region")) throw ValidationError("cli", "give either \"rect\" or \"region\"");
  if (j.contains("rect")) return region_from_json(json{{"rect", j["rect"]}});
  if (j.contains("region")) return region_from_json(j["region"]);
  throw ValidationError("cli", "missing \"rect\" or \"region\"");
}

BoundaryVector boundary_vector(const std::string& name, const ModelParams& p) {
  if (name == "open") return BoundaryVector::open();
  if (name == "magnetized") return BoundaryVector::magnetized(p);
  throw ValidationError("cli", "boundary must be \"open\" or \"magnetized\"");
}

json loop_json(const Loop& l) {
  return {{"index", std::string(to_string(l.index()))},
          {"edges", edges_to_json(l.edges())},
          {"interior", region_to_json(l.interior())["sites"]}};
}

json family_json(const LoopFamily& f) {
  json loops = json::array();
  for (const Loop& l : f.loops) loops.push_back(loop_json(l));
  return {{"root", std::string(to_string(f.root))}, {"loops", loops}, {"parent", f.parent}};
}

Outcome transfer(const json& j) {
  require_keys(j, keys({"z", "J", "ell", "left", "right"}), "transfer config");
  const ModelParams p = params_of(j);
  const int ell = j.value("ell", 1);
  if (ell < 1) throw ValidationError("cli", "\"ell\" must be at least 1");
  const BoundaryVector left = boundary_vector(j.value("left", std::string("open")), p);
  const BoundaryVector right = boundary_vector(j.value("right", std::string("open")), p);
  const TransferSolution sol = solve(p);
  const double lp = log_psi(sol, ell, left, right);
  Outcome o;
  json lambda = json::object(), amp = json::object();
  for (auto [name, b] : {std::pair{"plus", Branch::plus}, {"minus", Branch::minus}, {"zero", Branch::zero}}) {
    lambda[name] = sol.lambda(b);
    amp[name] = sol.amplitude(b, ell);
  }
  o.result = {{"psi", psi(sol, ell, left, right)}, {"log_psi", lp}, {"lambda", lambda}, {"amplitude", amp}};
  o.summary = "transfer: psi = " + format_double(psi(sol, ell, left, right));
  return o;
}

Outcome enumerate(const json& j, int threads) {
  require_keys(j, keys({"rect", "region", "z", "J", "q", "ell0", "magnetized", "sources", "correlation", "max_edges"}),
               "enumerate config");
  const Region region = region_of(j);
  const ModelParams p = params_of(j);
  const BoundaryCondition bc = bc_of(j);
  bc.validate(region);
  const SourceSet sources = j.contains("sources") ? edges_from_json(j["sources"]) : SourceSet{};
  EnumerationOptions opt;
  opt.threads = threads;
  opt.max_edges = j.value("max_edges", opt.max_edges);
  const WeightHistogram hist = weight_histogram(region, bc, sources, opt);
  const double logz = hist.log_evaluate(p);
  Outcome o;
  o.result = {{"Z", hist.evaluate(p)},
              {"logZ", logz},
              {"configurations", hist.configurations()},
              {"region", region_to_json(region)},
              {"params", {{"z", p.z}, {"J", p.J}}},
              {"bc", {{"q", std::string(to_string(bc.q))}, {"ell0", bc.ell0}, {"magnetized", edges_to_json(bc.magnetized)}}}};
  for (const std::string& w : check_sources(sources, bc.ell0)) o.result["warnings"].push_back(w);
  if (j.contains("correlation")) {
    SourceSet ups = edges_from_json(j["correlation"]);
    ups.insert(sources.begin(), sources.end());
    o.result["correlation"] = std::exp(weight_histogram(region, bc, ups, opt).log_evaluate(p) - logz);
  }
  o.summary = "enumerate: Z = " + format_double(hist.evaluate(p));
  return o;
}

Outcome oriented(const json& j) {
  require_keys(j, keys({"rect", "region", "z", "J", "q", "magnetized"}), "oriented config");
  const Region region = region_of(j);
  const ModelParams p = params_of(j);
  const BoundaryCondition bc = bc_of(j);
  bc.validate(region);
  const double logz = log_oriented_Z(region, p, bc);
  Outcome o;
  o.result = {{"Z", std::exp(logz)}, {"logZ", logz}, {"segments", segments(region, bc.q).size()}};
  o.summary = "oriented: Z = " + format_double(std::exp(logz));
  return o;
}

Outcome decompose(const json& j) {
  require_keys(j, keys({"rect", "region", "q", "ell0", "configuration", "sources"}), "decompose config");
  const Region region = region_of(j);
  const BoundaryCondition bc = bc_of(j);
  const SourceSet sources = j.contains("sources") ? edges_from_json(j["sources"]) : SourceSet{};
  if (!j.contains("configuration")) throw ValidationError("cli", "missing \"configuration\"");
  const DimerConfiguration config(edges_from_json(j["configuration"]));
  for (const Edge& e : config)
    if (!region.contains(e)) throw ValidationError("cli", "configuration leaves the region");
  const LoopFamily fam = build_loop_family(config, bc.q, sources);
  const auto all = contours(fam, bc.ell0, region, sources);
  const auto ext = external_contours(fam, all);
  auto contours_json = [](const std::vector<Contour>& cs) {
    json out = json::array();
    for (const Contour& c : cs) {
      json segs = json::array();
      for (const Segment& s : c.short_segments) {
        json sites = json::array();
        for (Site x : s.sites) sites.push_back({x.x, x.y});
        segs.push_back({{"line", std::string(to_string(s.line))}, {"sites", sites}});
      }
      out.push_back({{"loops", c.loop_ids}, {"short_segments", segs}});
    }
    return out;
  };
  Outcome o;
  o.result = {{"family", family_json(fam)}, {"contours", contours_json(all)}, {"external_contours", contours_json(ext)}};
  o.summary = "decompose: " + std::to_string(fam.loops.size()) + " loops, " + std::to_string(all.size()) + " contours";
  return o;
}

Outcome factorization_check(const json& j, int threads) {
  require_keys(j, keys({"rect", "region", "z", "J", "q", "ell0", "max_edges"}), "factorization-check config");
  const Region region = region_of(j);
  const ModelParams p = params_of(j);
  const BoundaryCondition bc = bc_of(j);
  EnumerationOptions opt;
  opt.threads = threads;
  opt.max_edges = j.value("max_edges", opt.max_edges);
  const FactorizationReport rep = verify_loop_factorization(region, p, bc, opt);
  json fams = json::array();
  for (const FamilyCheck& c : rep.families) {
    fams.push_back({{"family", family_json(c.family)},
                    {"configurations", c.configurations},
                    {"log_grouped", c.log_grouped},
                    {"log_product", c.log_product},
                    {"rel_discrepancy", c.rel_discrepancy}});
  }
  Outcome o;
  o.result = {{"configurations", rep.configurations},
              {"max_rel_discrepancy", rep.max_rel_discrepancy},
              {"families", fams}};
  o.summary = "factorization-check: " + std::to_string(rep.families.size()) + " families, max rel discrepancy " +
              format_double(rep.max_rel_discrepancy);
  return o;
}

Outcome cluster(const json& j, int threads) {
  require_keys(j, keys({"system", "max_order", "pinned", "ursell", "bridge"}), "cluster config");
  Outcome o;
  if (j.contains("bridge")) {
    const json& b = j["bridge"];
    require_keys(b, {"rect", "region", "z", "J", "q", "ell0", "order"}, "bridge");
    EnumerationOptions opt;
    opt.threads = threads;
    const BridgeReport rep = dimer_polymer_bridge(region_of(b), params_of(b), bc_of(b), b.value("order", 0), opt);
    json polys = json::array();
    for (const Loop& l : rep.polymers) polys.push_back(loop_json(l));
    o.result["bridge"] = {{"polymers", polys},
                          {"system", polymer_system_to_json(rep.system)},
                          {"log_direct", rep.log_direct},
                          {"log_polymer", rep.log_polymer},
                          {"discrepancy", rep.discrepancy}};
    if (rep.log_truncated) o.result["bridge"]["log_truncated"] = *rep.log_truncated;
    o.summary = "cluster bridge: discrepancy " + format_double(rep.discrepancy);
  }
  if (j.contains("system")) {
    const PolymerSystem sys = polymer_system_from_json(j["system"]);
    const ConvergenceReport conv = check_convergence(sys);
    json witnesses = json::array();
    for (const auto& w : conv.violations) {
      witnesses.push_back({{"polymer", w.polymer}, {"condition", w.condition}, {"lhs", w.lhs}, {"rhs", w.rhs}});
    }
    o.result["convergence"] = {{"holds", conv.holds}, {"violations", witnesses}};
    if (sys.size() <= 25) o.result["exact_log_partition"] = exact_log_partition(sys);
    if (j.contains("max_order")) {
      o.result["truncated_log_partition"] = truncated_log_partition(sys, j["max_order"].get<int>());
    }
    if (j.contains("pinned")) {
      const RemainderReport r = remainder_bound_check(sys, j["pinned"].get<std::size_t>(), j.value("max_order", 8));
      o.result["remainder"] = {{"sum", r.sum}, {"bound", r.bound}, {"convergent", r.convergent},
                               {"within_bound", r.within_bound()}};
    }
    if (j.contains("ursell")) {
      json u = json::array();
      for (const json& c : j["ursell"]) {
        const Rational r = ursell_exact(c.get<Cluster>(), sys);
        u.push_back({{"cluster", c}, {"value", r.to_double()}, {"exact", to_string(r)}});
      }
      o.result["ursell"] = u;
    }
    o.summary = std::string("cluster: convergence ") + (conv.holds ? "holds" : "fails");
  }
  if (o.summary.empty()) throw ValidationError("cli", "cluster needs \"system\" or \"bridge\"");
  return o;
}

SamplerConfig sampler_config(const json& j) {
  SamplerConfig cfg;
  cfg.region = region_of(j);
  cfg.params = params_of(j);
  cfg.bc = bc_of(j);
  if (j.contains("sources")) cfg.sources = edges_from_json(j["sources"]);
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.sweeps = j.value("sweeps", cfg.sweeps);
  cfg.thermalization = j.value("therm", cfg.thermalization);
  cfg.bin_size = j.value("bin", cfg.bin_size);
  cfg.validate();
  return cfg;
}

std::string edge_label(const Edge& e) {
  return "(" + std::to_string(e.a().x) + "," + std::to_string(e.a().y) + ")-(" + std::to_string(e.b().x) + "," +
         std::to_string(e.b().y) + ")";
}

Outcome mc(const json& j, int threads) {
  require_keys(j, keys({"rect", "region", "z", "J", "q", "ell0", "magnetized", "sources", "seed", "sweeps", "therm",
                        "bin", "edges", "pairs", "estimator", "chains"}),
               "mc config");
  const SamplerConfig cfg = sampler_config(j);
  std::vector<Edge> edges;
  for (const json& e : j.value("edges", json::array())) edges.push_back(edge_from_json(e));
  std::vector<std::pair<Edge, Edge>> pairs;
  for (const json& p : j.value("pairs", json::array())) {
    if (!p.is_array() || p.size() != 2) throw ValidationError("cli", "a pair is [edge, edge]");
    pairs.emplace_back(edge_from_json(p[0]), edge_from_json(p[1]));
    for (const Edge& e : {pairs.back().first, pairs.back().second})
      if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
  }
  const std::string est = j.value("estimator", std::string("indicator"));
  if (est != "indicator" && est != "conditional") {
    throw ValidationError("cli", "\"estimator\" must be \"indicator\" or \"conditional\"");
  }
  const Estimator estimator = est == "indicator" ? Estimator::indicator : Estimator::conditional;
  const auto chains = run_chains(cfg, j.value("chains", 1), edges, pairs, threads, estimator);

  std::ostringstream csv;
  csv << "observable,mean,stderr,bins\n";
  auto row = [&](const std::string& name, const ObservableEstimate& e) {
    csv << name << ',' << format_double(e.mean) << ',' << format_double(e.error) << ',' << e.bins << '\n';
  };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::vector<ObservableEstimate> parts;
    for (const ChainData& d : chains) parts.push_back(occupation_estimate(d, i));
    row("occupation " + edge_label(edges[i]), merge(parts));
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    std::vector<ObservableEstimate> parts;
    for (const ChainData& d : chains) parts.push_back(connected_estimate(d, k));
    row("connected " + edge_label(pairs[k].first) + " " + edge_label(pairs[k].second), merge(parts));
  }
  json acc = json::array(), seeds = json::array();
  for (const ChainData& d : chains) {
    acc.push_back(d.acceptance);
    seeds.push_back(d.seed);
  }
  Outcome o;
  o.csv = csv.str();
  o.result = {{"rng", Rng::name()}, {"seeds", seeds}, {"acceptance", acc}, {"estimator", est}};
  o.summary = "mc: " + std::to_string(edges.size()) + " occupations, " + std::to_string(pairs.size()) +
              " pair correlations over " + std::to_string(chains.size()) + " chain(s)";
  return o;
}

Outcome nematic_scan_cmd(const json& j, int threads) {
  require_keys(j, keys({"sizes", "grid", "q", "ell0", "seed", "sweeps", "therm", "bin", "chains"}), "nematic-scan config");
  if (!j.contains("sizes") || !j.contains("grid")) throw ValidationError("cli", "nematic-scan needs \"sizes\" and \"grid\"");
  std::vector<ModelParams> grid;
  for (const json& g : j["grid"]) {
    require_keys(g, {"z", "J"}, "grid point");
    grid.push_back(params_of(g));
  }
  ScanOptions opt;
  opt.q = parse_orientation(j.value("q", std::string("v")));
  opt.ell0 = j.value("ell0", 0);
  opt.seed = j.value("seed", opt.seed);
  opt.sweeps = j.value("sweeps", opt.sweeps);
  opt.thermalization = j.value("therm", opt.thermalization);
  opt.bin_size = j.value("bin", opt.bin_size);
  opt.chains = j.value("chains", 1);
  opt.threads = threads;
  const auto rows = nematic_scan(j["sizes"].get<std::vector<int>>(), grid, opt);
  std::ostringstream csv;
  csv << "L,z,J,v_mean,v_stderr,h_mean,h_stderr,ratio,deviation,epsilon\n";
  for (const ScanRow& r : rows) {
    csv << r.L;
    for (double x : {r.z, r.J, r.v.mean, r.v.error, r.h.mean, r.h.error, r.ratio, r.deviation, r.epsilon})
      csv << ',' << format_double(x);
    csv << '\n';
  }
  Outcome o;
  o.csv = csv.str();
  o.result = {{"rng", Rng::name()}, {"rows", rows.size()}};
  o.summary = "nematic-scan: " + std::to_string(rows.size()) + " rows";
  return o;
}

}  // namespace

Outcome run(const json& config, int threads) {
  Outcome o;
  try {
    if (!config.is_object()) throw ValidationError("cli", "config must be a JSON object");
    if (!config.contains("subcommand")) throw ValidationError("cli", "missing \"subcommand\"");
    const std::string sub = config["subcommand"].get<std::string>();
    if (sub == "transfer") o = transfer(config);
    else if (sub == "enumerate") o = enumerate(config, threads);
    else if (sub == "oriented") o = oriented(config);
    else if (sub == "decompose") o = decompose(config);
    else if (sub == "factorization-check") o = factorization_check(config, threads);
    else if (sub == "cluster") o = cluster(config, threads);
    else if (sub == "mc") o = mc(config, threads);
    else if (sub == "nematic-scan") o = nematic_scan_cmd(config, threads);
    else throw ValidationError("cli", "unknown subcommand \"" + sub + "\"");
    o.result["subcommand"] = sub;
    o.result["config"] = config;
    o.exit_code = ok;
  } catch (const SizeCapError& e) {
    o = Outcome{size_cap, json::object(), std::nullopt, "", e.what()};
  } catch (const Error& e) {
    o = Outcome{validation_failed, json::object(), std::nullopt, "", e.what()};
  } catch (const json::exception& e) {
    o = Outcome{validation_failed, json::object(), std::nullopt, "", std::string("cli: ") + e.what()};
  }
  return o;
}

Outcome run_text(const std::string& text, int threads) {
  json config;
  try {
    config = json::parse(text);
  } catch (const json::parse_error& e) {
    return Outcome{validation_failed, json::object(), std::nullopt, "", std::string("cli: malformed JSON: ") + e.what()};
  }
  return run(config, threads);
}

bool write_outputs(const Outcome& outcome, const std::string& path, std::ostream& out) {
  const std::string doc = outcome.result.dump(2) + "\n";
  if (path.empty()) {
    out << (outcome.csv ? *outcome.csv : doc);
    return static_cast<bool>(out);
  }
  auto write = [](const std::string& file, const std::string& text) {
    std::ofstream f(file, std::ios::binary);
    f << text;
    return static_cast<bool>(f);
  };
  if (outcome.csv) return write(path, *outcome.csv) && write(path + ".json", doc);
  return write(path, doc);
}

int resolve_threads(std::optional<int> flag) {
  if (flag) return std::max(1, *flag);
  if (const char* env = std::getenv("NEMATIC_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace nematic::cli
