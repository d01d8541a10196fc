#include "nematic/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "nematic/error.hpp"

namespace nematic {

void BoundaryCondition::validate(const Region& region) const {
  if (ell0 < 0) throw ValidationError("gibbs", "ell0 must be non-negative");
  const auto bnd = boundary(region, q);
  for (const Edge& e : magnetized) {
    if (!std::binary_search(bnd.begin(), bnd.end(), e)) {
      throw ValidationError("gibbs", "magnetized edges must be " + std::string(to_string(q)) +
                                         "-edges of the region boundary");
    }
  }
}

DimerConfiguration::DimerConfiguration(EdgeSet dimers) : dimers_(std::move(dimers)) {
  std::set<Site> used;
  for (const Edge& e : dimers_) {
    if (!used.insert(e.a()).second || !used.insert(e.b()).second) {
      throw ValidationError("gibbs", "dimers of a configuration must be vertex-disjoint");
    }
  }
}

std::vector<std::string> check_sources(const SourceSet& sources, int ell0) {
  std::vector<std::string> warnings;
  std::vector<Edge> s(sources.begin(), sources.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (s[i].shares_vertex(s[j])) throw ValidationError("gibbs", "source edges must be vertex-disjoint");
      double best = std::numeric_limits<double>::infinity();
      for (Site p : {s[i].a(), s[i].b()})
        for (Site r : {s[j].a(), s[j].b()}) best = std::min(best, std::hypot(p.x - r.x, p.y - r.y));
      if (best < ell0) {
        warnings.push_back("sources " + std::to_string(i) + " and " + std::to_string(j) + " are closer than ell0");
      }
    }
  }
  return warnings;
}

bool interacts(const Edge& d1, const Edge& d2) {
  if (d1.orientation() != d2.orientation()) return false;
  const Site u = unit(d1.orientation());
  return d1.b() + u == d2.a() || d2.b() + u == d1.a();
}

int interacting_pairs(const DimerConfiguration& config) {
  int n = 0;
  for (const Edge& d : config) {
    const Site u = unit(d.orientation());
    // count each pair once, from its lower member
    if (config.contains(Edge(d.b() + u, d.b() + u + u))) ++n;
  }
  return n;
}

namespace {

int contacts_of(const Edge& d, const EdgeSet& magnetized) {
  if (magnetized.empty()) return 0;
  const Site u = unit(d.orientation());
  return static_cast<int>(magnetized.count(Edge(d.a() - u, d.a())) + magnetized.count(Edge(d.b(), d.b() + u)));
}

}  // namespace

int bound_contacts(const DimerConfiguration& config, const BoundaryCondition& bc) {
  int n = 0;
  for (const Edge& d : config) n += contacts_of(d, bc.magnetized);
  return n;
}

double log_weight(const DimerConfiguration& config, const ModelParams& p, const BoundaryCondition& bc) {
  return static_cast<double>(config.size()) * std::log(p.z) +
         p.J * (interacting_pairs(config) + bound_contacts(config, bc));
}

double weight(const DimerConfiguration& config, const ModelParams& p, const BoundaryCondition& bc) {
  return std::exp(log_weight(config, p, bc));
}

bool admissible(const Edge& e, const BoundaryCondition& bc, const Region& region) {
  if (e.orientation() == bc.q || bc.ell0 == 0) return true;
  // Walking from x along its q-line, the first boundary-edge endpoint met is
  // a border site of the region, so it suffices to look for border sites.
  const Site u = unit(bc.q);
  for (Site x : {e.a(), e.b()}) {
    for (int k = 0; k < bc.ell0; ++k) {
      for (int s : {1, -1}) {
        const Site y{x.x + s * k * u.x, x.y + s * k * u.y};
        if (!region.contains(y)) return false;
        for (Site step : {Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}}) {
          if (!region.contains(y + step)) return false;
        }
      }
    }
  }
  return true;
}

bool admissible(const DimerConfiguration& config, const BoundaryCondition& bc, const Region& region) {
  return std::all_of(config.begin(), config.end(), [&](const Edge& e) { return admissible(e, bc, region); });
}

// ---------------------------------------------------------------------------
// Enumeration

std::uint64_t WeightHistogram::configurations() const {
  std::uint64_t n = 0;
  for (const auto& row : counts)
    for (std::uint64_t c : row) n += c;
  return n;
}

namespace {

// log Z in extended precision, so that exp of it rounds like the plain sum.
long double log_sum(const WeightHistogram& wh, const ModelParams& p) {
  const long double log_z = std::log(static_cast<long double>(p.z));
  long double top = -std::numeric_limits<long double>::infinity();
  std::vector<long double> terms;
  for (std::size_t n = 0; n < wh.counts.size(); ++n) {
    for (std::size_t k = 0; k < wh.counts[n].size(); ++k) {
      if (wh.counts[n][k] == 0) continue;
      terms.push_back(std::log(static_cast<long double>(wh.counts[n][k])) + n * log_z + k * static_cast<long double>(p.J));
      top = std::max(top, terms.back());
    }
  }
  if (terms.empty()) return top;
  long double s = 0.0L;
  for (long double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

}  // namespace

double WeightHistogram::log_evaluate(const ModelParams& p) const { return static_cast<double>(log_sum(*this, p)); }

double WeightHistogram::evaluate(const ModelParams& p) const { return static_cast<double>(std::exp(log_sum(*this, p))); }

namespace {

struct EdgeData {
  Edge edge;
  int a, b;                     // site indices
  bool allowed;                 // admissible and of an allowed orientation
  int contacts;                 // collinear magnetized edges touched
  std::vector<int> interacting; // indices of collinear neighbours
};

class Enumerator {
 public:
  Enumerator(const Region& region, const BoundaryCondition& bc, const SourceSet& sources,
             const EnumerationOptions& opt)
      : sites_(region.begin(), region.end()) {
    bc.validate(region);
    const auto edges = region.edges();
    if (edges.size() > opt.max_edges) {
      throw SizeCapError("gibbs", "region has " + std::to_string(edges.size()) + " edges, enumeration cap is " +
                                      std::to_string(opt.max_edges));
    }
    check_sources(sources, bc.ell0);
    std::map<Edge, int> index;
    for (const Edge& e : edges) {
      EdgeData d{e, site_index(e.a()), site_index(e.b()), admissible(e, bc, region), contacts_of(e, bc.magnetized),
                 {}};
      if (opt.only && e.orientation() != *opt.only) d.allowed = false;
      index[e] = static_cast<int>(data_.size());
      data_.push_back(std::move(d));
    }
    for (EdgeData& d : data_) {
      const Site u = unit(d.edge.orientation());
      for (Edge n : {Edge(d.edge.a() - u - u, d.edge.a() - u), Edge(d.edge.b() + u, d.edge.b() + u + u)}) {
        auto it = index.find(n);
        if (it != index.end()) d.interacting.push_back(it->second);
      }
    }
    for (const Edge& s : sources) {
      auto it = index.find(s);
      if (it == index.end()) throw ValidationError("gibbs", "source edge lies outside the region");
      forced_.push_back(it->second);
      if (!data_[it->second].allowed) feasible_ = false;
    }
  }

  // `leaf` receives (in-flags, n, k) for each configuration. With several
  // threads, subtrees at split_depth are dealt round-robin.
  template <typename Leaf>
  void search(Leaf& leaf, int split_depth, int tid, int threads) const {
    if (!feasible_) return;
    State st(sites_.size(), data_.size());
    for (int f : forced_) place(st, f);
    long counter = 0;
    dfs(st, 0, leaf, split_depth, tid, threads, counter);
  }

  std::size_t edge_count() const { return data_.size(); }
  std::size_t site_count() const { return sites_.size(); }
  const EdgeData& edge(int i) const { return data_[i]; }

 private:
  struct State {
    State(std::size_t sites, std::size_t edges) : occupied(sites, 0), in(edges, 0) {}
    std::vector<char> occupied;
    std::vector<char> in;
    int n = 0;
    int k = 0;
  };

  int site_index(Site p) const {
    return static_cast<int>(std::lower_bound(sites_.begin(), sites_.end(), p) - sites_.begin());
  }

  void place(State& st, int i) const {
    const EdgeData& d = data_[i];
    st.occupied[d.a] = st.occupied[d.b] = 1;
    st.in[i] = 1;
    ++st.n;
    st.k += d.contacts;
    for (int j : d.interacting) st.k += st.in[j];
  }
  void remove(State& st, int i) const {
    const EdgeData& d = data_[i];
    st.occupied[d.a] = st.occupied[d.b] = 0;
    st.in[i] = 0;
    --st.n;
    st.k -= d.contacts;
    for (int j : d.interacting) st.k -= st.in[j];
  }

  template <typename Leaf>
  void dfs(State& st, std::size_t i, Leaf& leaf, int split_depth, int tid, int threads, long& counter) const {
    if (static_cast<int>(i) == split_depth && threads > 1) {
      if (counter++ % threads != tid) return;
    }
    if (i == data_.size()) {
      leaf(st.in, st.n, st.k);
      return;
    }
    const EdgeData& d = data_[i];
    if (!st.in[i] && d.allowed && !st.occupied[d.a] && !st.occupied[d.b]) {
      place(st, static_cast<int>(i));
      dfs(st, i + 1, leaf, split_depth, tid, threads, counter);
      remove(st, static_cast<int>(i));
    }
    dfs(st, i + 1, leaf, split_depth, tid, threads, counter);
  }

  std::vector<Site> sites_;
  std::vector<EdgeData> data_;
  std::vector<int> forced_;
  bool feasible_ = true;
};

int resolve_threads(int threads) { return std::max(1, threads); }

}  // namespace

WeightHistogram weight_histogram(const Region& region, const BoundaryCondition& bc, const SourceSet& sources,
                                 const EnumerationOptions& options) {
  Enumerator en(region, bc, sources, options);
  const std::size_t rows = en.site_count() / 2 + 1;
  const std::size_t cols = 3 * rows + 1;
  auto empty = [&] { return std::vector<std::vector<std::uint64_t>>(rows, std::vector<std::uint64_t>(cols, 0)); };

  const int threads = resolve_threads(options.threads);
  const int split_depth = static_cast<int>(std::min<std::size_t>(en.edge_count(), 8));
  std::vector<std::vector<std::vector<std::uint64_t>>> partial(threads, empty());
  auto work = [&](int tid) {
    auto& counts = partial[tid];
    auto leaf = [&](const std::vector<char>&, int n, int k) { ++counts[n][k]; };
    en.search(leaf, split_depth, tid, threads);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& t : pool) t.join();
  }
  WeightHistogram h{empty()};
  for (const auto& part : partial)
    for (std::size_t n = 0; n < rows; ++n)
      for (std::size_t k = 0; k < cols; ++k) h.counts[n][k] += part[n][k];
  return h;
}

void for_each_configuration(const Region& region, const BoundaryCondition& bc, const SourceSet& sources,
                            const std::function<void(const DimerConfiguration&)>& visit,
                            const EnumerationOptions& options) {
  Enumerator en(region, bc, sources, options);
  auto leaf = [&](const std::vector<char>& in, int, int) {
    EdgeSet dimers;
    for (std::size_t i = 0; i < in.size(); ++i)
      if (in[i]) dimers.insert(dimers.end(), en.edge(static_cast<int>(i)).edge);
    visit(DimerConfiguration(std::move(dimers)));
  };
  en.search(leaf, 0, 0, 1);
}

double log_enumerate_Z(const Region& region, const ModelParams& p, const BoundaryCondition& bc,
                       const SourceSet& sources, const EnumerationOptions& options) {
  p.validate();
  return weight_histogram(region, bc, sources, options).log_evaluate(p);
}

double enumerate_Z(const Region& region, const ModelParams& p, const BoundaryCondition& bc,
                   const SourceSet& sources, const EnumerationOptions& options) {
  p.validate();
  return weight_histogram(region, bc, sources, options).evaluate(p);
}

double correlation(const Region& region, const ModelParams& p, const BoundaryCondition& bc,
                   const SourceSet& upsilon, const EnumerationOptions& options) {
  const double den = log_enumerate_Z(region, p, bc, {}, options);
  if (upsilon.empty()) return 1.0;
  const double num = log_enumerate_Z(region, p, bc, upsilon, options);
  return std::exp(num - den);
}

BoundaryPair segment_boundary(const Segment& s, const ModelParams& p, const EdgeSet& magnetized) {
  auto end = [&](const Edge& outer) {
    return magnetized.count(outer) ? BoundaryVector::magnetized(p) : BoundaryVector::open();
  };
  return {end(s.lower_outer_edge()), end(s.upper_outer_edge())};
}

double log_oriented_Z(const Region& region, const ModelParams& p, const BoundaryCondition& bc) {
  const auto segs = segments(region, bc.q);
  if (segs.empty()) return 0.0;
  const TransferSolution sol = solve(p);
  double total = 0.0;
  for (const Segment& s : segs) {
    const BoundaryPair w = segment_boundary(s, p, bc.magnetized);
    total += log_psi(sol, static_cast<int>(s.size()), w.left, w.right);
  }
  return total;
}

double oriented_Z(const Region& region, const ModelParams& p, const BoundaryCondition& bc) {
  return std::exp(log_oriented_Z(region, p, bc));
}

}  // namespace nematic
