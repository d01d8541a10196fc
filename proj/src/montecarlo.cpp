#include "nematic/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <thread>

#include "nematic/error.hpp"

namespace nematic {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto& w : s_) w = splitmix64(seed);
}

std::uint64_t Rng::below(std::uint64_t n) {
  __extension__ using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>((*this)()) * n) >> 64);
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

void SamplerConfig::validate() const {
  params.validate();
  bc.validate(region);
  if (sweeps <= 0) throw ValidationError("montecarlo", "sweeps must be positive");
  if (thermalization < 0) throw ValidationError("montecarlo", "thermalization must be non-negative");
  if (bin_size <= 0 || sweeps % bin_size != 0) throw ValidationError("montecarlo", "bin_size must divide sweeps");
  if (bins() < 16) throw ValidationError("montecarlo", "at least 16 bins are required");
  if (region.edges().empty()) throw ValidationError("montecarlo", "region has no edges");
  check_sources(sources, 0);
  for (const Edge& e : sources) {
    if (!region.contains(e)) throw ValidationError("montecarlo", "sources must lie inside the region");
    if (!admissible(e, bc, region)) throw ValidationError("montecarlo", "sources must be admissible");
  }
}

// ---------------------------------------------------------------------------
// Sampler

Sampler::Sampler(const SamplerConfig& cfg) : rng_(cfg.seed) {
  cfg.validate();
  sites_.assign(cfg.region.begin(), cfg.region.end());
  edges_ = cfg.region.edges();
  auto site_index = [&](Site s) {
    return static_cast<int>(std::lower_bound(sites_.begin(), sites_.end(), s) - sites_.begin());
  };
  const std::size_t m = edges_.size();
  ends_.resize(m);
  partners_.assign(m, {-1, -1});
  contacts_.assign(m, 0);
  allowed_.assign(m, 1);
  source_.assign(m, 0);
  occupied_.assign(m, 0);
  owner_.assign(sites_.size(), -1);
  for (std::size_t i = 0; i < m; ++i) {
    const Edge& e = edges_[i];
    ends_[i] = {site_index(e.a()), site_index(e.b())};
    const Site u = unit(e.orientation());
    const Site below = e.a() - u, above = e.b() + u;
    if (cfg.region.contains(below - u) && cfg.region.contains(below)) {
      partners_[i][0] = static_cast<int>(index_of(Edge(below - u, below)));
    }
    if (cfg.region.contains(above) && cfg.region.contains(above + u)) {
      partners_[i][1] = static_cast<int>(index_of(Edge(above, above + u)));
    }
    contacts_[i] = bound_contacts(DimerConfiguration{e}, cfg.bc);
    allowed_[i] = admissible(e, cfg.bc, cfg.region) ? 1 : 0;
  }
  for (const Edge& e : cfg.sources) {
    const std::size_t i = index_of(e);
    source_[i] = 1;
    allowed_[i] = 0;
  }
  log_z_ = std::log(cfg.params.z);
  J_ = cfg.params.J;
  for (int k = 0; k < 5; ++k) {
    insert_ratio_[k] = std::exp(log_z_ + k * J_);
    delete_ratio_[k] = std::exp(-log_z_ - k * J_);
  }

  // Start from the sources plus a greedy packing of q-dimers, which is close
  // to the dominant configurations at large J.
  auto place = [&](std::size_t i) {
    occupied_[i] = 1;
    owner_[ends_[i][0]] = owner_[ends_[i][1]] = static_cast<int>(i);
  };
  for (std::size_t i = 0; i < m; ++i)
    if (source_[i]) place(i);
  for (std::size_t i = 0; i < m; ++i) {
    if (edges_[i].orientation() != cfg.bc.q || !allowed_[i]) continue;
    if (owner_[ends_[i][0]] >= 0 || owner_[ends_[i][1]] >= 0) continue;
    place(i);
  }
  for (std::int64_t s = 0; s < cfg.thermalization; ++s) sweep();
  proposals_ = accepted_ = 0;
}

std::size_t Sampler::index_of(const Edge& e) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) throw ValidationError("montecarlo", "edge is not in the region");
  return static_cast<std::size_t>(it - edges_.begin());
}

int Sampler::covering(Site s) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || *it != s) throw ValidationError("montecarlo", "site is not in the region");
  return owner_[it - sites_.begin()];
}

double Sampler::log_ratio(std::size_t i) const {
  if (!allowed_[i]) return std::numeric_limits<double>::quiet_NaN();
  if (!occupied_[i] && (owner_[ends_[i][0]] >= 0 || owner_[ends_[i][1]] >= 0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  int k = contacts_[i];
  for (int p : partners_[i]) k += (p >= 0 && occupied_[p]) ? 1 : 0;
  const double insert = log_z_ + k * J_;
  return occupied_[i] ? -insert : insert;
}

bool Sampler::propose(std::size_t i) {
  ++proposals_;
  if (!allowed_[i]) return false;
  const int a = ends_[i][0], b = ends_[i][1];
  int k = contacts_[i];
  for (int p : partners_[i]) k += (p >= 0 && occupied_[p]) ? 1 : 0;
  if (occupied_[i]) {
    const double r = delete_ratio_[k];
    if (r < 1.0 && rng_.uniform() >= r) return false;
    occupied_[i] = 0;
    owner_[a] = owner_[b] = -1;
  } else {
    if (owner_[a] >= 0 || owner_[b] >= 0) return false;
    const double r = insert_ratio_[k];
    if (r < 1.0 && rng_.uniform() >= r) return false;
    occupied_[i] = 1;
    owner_[a] = owner_[b] = static_cast<int>(i);
  }
  ++accepted_;
  return true;
}

bool Sampler::step() { return propose(rng_.below(edges_.size())); }

void Sampler::sweep() {
  for (std::size_t n = 0; n < edges_.size(); ++n) step();
}

DimerConfiguration Sampler::state() const {
  EdgeSet s;
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (occupied_[i]) s.insert(edges_[i]);
  return DimerConfiguration(std::move(s));
}

void Sampler::set_state(const DimerConfiguration& config) {
  std::vector<char> occ(edges_.size(), 0);
  for (const Edge& e : config) {
    const std::size_t i = index_of(e);
    if (!allowed_[i] && !source_[i]) throw ValidationError("montecarlo", "state is not admissible");
    occ[i] = 1;
  }
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (source_[i] && !occ[i]) throw ValidationError("montecarlo", "state must contain the sources");
  std::vector<int> owner(sites_.size(), -1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!occ[i]) continue;
    for (int v : ends_[i]) {
      if (owner[v] >= 0) throw ValidationError("montecarlo", "state dimers overlap");
      owner[v] = static_cast<int>(i);
    }
  }
  occupied_ = std::move(occ);
  owner_ = std::move(owner);
}

// ---------------------------------------------------------------------------
// Line-conditional expectations

LineConditional::LineConditional(const SamplerConfig& cfg, Orientation c)
    : region_(cfg.region), c_(c), p_(cfg.params), magnetized_(cfg.bc.magnetized) {
  if (c != cfg.bc.q && cfg.bc.ell0 > 0) {
    throw ValidationError("montecarlo", "conditional estimator needs q-edges when ell0 > 0");
  }
  int longest = 0;
  for (const Segment& seg : segments(region_, c)) longest = std::max(longest, static_cast<int>(seg.size()));
  const TransferSolution sol = solve(p_);
  const BoundaryVector open = BoundaryVector::open(), mag = BoundaryVector::magnetized(p_);
  log_psi_.assign(longest + 1, {0.0, 0.0, 0.0, p_.J});
  for (int len = 1; len <= longest; ++len) {
    for (int k = 0; k < 4; ++k) {
      log_psi_[len][k] = log_psi(sol, len, (k & 2) ? mag : open, (k & 1) ? mag : open);
    }
  }
}

double LineConditional::log_part(int len, bool left_mag, bool right_mag) const {
  return log_psi_.at(len)[2 * left_mag + right_mag];
}

LineConditional::Run LineConditional::run_through(const Sampler& s, const Edge& e) const {
  const Site u = unit(c_);
  const auto& edges = s.edges();
  // a site is free when it is a monomer or carries a non-source c-dimer of this line
  auto free_site = [&](Site x) {
    if (!region_.contains(x)) return false;
    const int k = s.covering(x);
    return k < 0 || (edges[k].orientation() == c_ && !s.is_source(k));
  };
  // end type beyond `last` when stepping by ±u
  auto end_mag = [&](Site last, Site step) {
    const Site out = last + step;
    if (!region_.contains(out)) return magnetized_.count(step == u ? Edge(last, out) : Edge(out, last)) != 0;
    const int k = s.covering(out);
    return s.is_source(k) && edges[k].orientation() == c_;
  };
  Run r;
  Site lo = e.a(), hi = e.b();
  while (free_site(lo - u)) lo = lo - u;
  while (free_site(hi + u)) hi = hi + u;
  for (Site x = lo;; x = x + u) {
    r.sites.push_back(x);
    if (x == hi) break;
  }
  r.left_mag = end_mag(lo, Site{-u.x, -u.y});
  r.right_mag = end_mag(hi, u);
  return r;
}

double LineConditional::occupation(const Sampler& s, const Edge& e) const {
  if (e.orientation() != c_) throw ValidationError("montecarlo", "edge orientation differs from the line");
  const std::size_t i = s.index_of(e);
  if (s.is_source(i)) return 1.0;
  for (Site x : {e.a(), e.b()}) {
    const int k = s.covering(x);
    if (k >= 0 && s.edges()[k].orientation() != c_) return 0.0;
    if (k >= 0 && s.is_source(k)) return 0.0;
  }
  const Run r = run_through(s, e);
  const int n = static_cast<int>(r.sites.size());
  const int pos = static_cast<int>(std::find(r.sites.begin(), r.sites.end(), e.a()) - r.sites.begin());
  const double lg = std::log(p_.z) + log_part(pos, r.left_mag, true) + log_part(n - pos - 2, true, r.right_mag) -
                    log_part(n, r.left_mag, r.right_mag);
  return std::exp(lg);
}

double LineConditional::joint(const Sampler& s, const Edge& e, const Edge& e2) const {
  if (e == e2) return occupation(s, e);
  if (e2 < e) return joint(s, e2, e);
  if (e.orientation() != c_ || e2.orientation() != c_) {
    throw ValidationError("montecarlo", "edge orientation differs from the line");
  }
  if (e.shares_vertex(e2)) return 0.0;
  const bool same_line = c_ == Orientation::v ? e.a().x == e2.a().x : e.a().y == e2.a().y;
  const double o1 = occupation(s, e), o2 = occupation(s, e2);
  if (!same_line || o1 == 0.0 || o2 == 0.0) return o1 * o2;
  const std::size_t i = s.index_of(e), j = s.index_of(e2);
  if (s.is_source(i) || s.is_source(j)) return o1 * o2;
  const Run r = run_through(s, e);
  const auto it2 = std::find(r.sites.begin(), r.sites.end(), e2.a());
  if (it2 == r.sites.end()) return o1 * o2;  // separated by a blocked site
  const int n = static_cast<int>(r.sites.size());
  const int p1 = static_cast<int>(std::find(r.sites.begin(), r.sites.end(), e.a()) - r.sites.begin());
  const int p2 = static_cast<int>(it2 - r.sites.begin());
  const double lg = 2.0 * std::log(p_.z) + log_part(p1, r.left_mag, true) + log_part(p2 - p1 - 2, true, true) +
                    log_part(n - p2 - 2, true, r.right_mag) - log_part(n, r.left_mag, r.right_mag);
  return std::exp(lg);
}

// ---------------------------------------------------------------------------
// Chains and estimators

ChainData run_chain(const SamplerConfig& cfg, const std::vector<Edge>& edges,
                    const std::vector<std::pair<Edge, Edge>>& pairs, Estimator estimator) {
  Sampler s(cfg);
  ChainData d;
  d.estimator = estimator;
  std::optional<LineConditional> cond;
  if (estimator == Estimator::conditional) {
    std::set<Orientation> used;
    for (const Edge& e : edges) used.insert(e.orientation());
    for (const auto& [e1, e2] : pairs) {
      if (e1.orientation() != e2.orientation()) {
        throw ValidationError("montecarlo", "conditional pairs must have a common orientation");
      }
      used.insert(e1.orientation());
    }
    if (used.size() > 1) throw ValidationError("montecarlo", "conditional estimator tracks one orientation");
    cond.emplace(cfg, used.empty() ? cfg.bc.q : *used.begin());
  }
  d.edges = edges;
  d.pairs = pairs;
  d.seed = cfg.seed;
  std::vector<std::size_t> ei, pa, pb;
  for (const Edge& e : edges) ei.push_back(s.index_of(e));
  for (const auto& [e1, e2] : pairs) {
    pa.push_back(s.index_of(e1));
    pb.push_back(s.index_of(e2));
  }
  const std::int64_t nbins = cfg.bins();
  d.edge_bins.assign(edges.size(), std::vector<double>(nbins, 0.0));
  d.pair_bins.assign(pairs.size(), std::vector<double>(nbins, 0.0));
  std::vector<double> ecount(edges.size()), pcount(pairs.size());
  for (std::int64_t b = 0; b < nbins; ++b) {
    std::fill(ecount.begin(), ecount.end(), 0.0);
    std::fill(pcount.begin(), pcount.end(), 0.0);
    for (std::int64_t t = 0; t < cfg.bin_size; ++t) {
      s.sweep();
      if (cond) {
        for (std::size_t i = 0; i < ei.size(); ++i) ecount[i] += cond->occupation(s, edges[i]);
        for (std::size_t i = 0; i < pa.size(); ++i) pcount[i] += cond->joint(s, pairs[i].first, pairs[i].second);
      } else {
        for (std::size_t i = 0; i < ei.size(); ++i) ecount[i] += s.occupied(ei[i]);
        for (std::size_t i = 0; i < pa.size(); ++i) pcount[i] += s.occupied(pa[i]) && s.occupied(pb[i]);
      }
    }
    const double inv = 1.0 / static_cast<double>(cfg.bin_size);
    for (std::size_t i = 0; i < ei.size(); ++i) d.edge_bins[i][b] = ecount[i] * inv;
    for (std::size_t i = 0; i < pa.size(); ++i) d.pair_bins[i][b] = pcount[i] * inv;
  }
  d.acceptance = s.proposals() ? static_cast<double>(s.accepted()) / static_cast<double>(s.proposals()) : 0.0;
  return d;
}

std::vector<ChainData> run_chains(const SamplerConfig& cfg, int chains, const std::vector<Edge>& edges,
                                  const std::vector<std::pair<Edge, Edge>>& pairs, int threads, Estimator estimator) {
  if (chains < 1) throw ValidationError("montecarlo", "at least one chain is required");
  cfg.validate();
  std::vector<ChainData> out(chains);
  const int workers = std::clamp(threads, 1, chains);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](int w) {
    try {
      for (int c = w; c < chains; c += workers) {
        SamplerConfig local = cfg;
        local.seed = cfg.seed + static_cast<std::uint64_t>(c);
        out[c] = run_chain(local, edges, pairs, estimator);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

ObservableEstimate linear_estimate(const ChainData& d, const std::vector<double>& coeffs) {
  if (coeffs.size() != d.edges.size()) throw ValidationError("montecarlo", "one coefficient per tracked edge");
  const std::size_t nb = d.edge_bins.empty() ? 0 : d.edge_bins.front().size();
  std::vector<double> v(nb, 0.0);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    for (std::size_t b = 0; b < nb; ++b) v[b] += coeffs[i] * d.edge_bins[i][b];
  ObservableEstimate est;
  est.bins = static_cast<std::int64_t>(nb);
  est.mean = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - est.mean) * (x - est.mean);
  est.error = std::sqrt(ss / static_cast<double>(nb - 1) / static_cast<double>(nb));
  return est;
}

ObservableEstimate occupation_estimate(const ChainData& d, std::size_t edge) {
  std::vector<double> c(d.edges.size(), 0.0);
  c.at(edge) = 1.0;
  return linear_estimate(d, c);
}

ObservableEstimate jackknife_estimate(const ChainData& d, const std::function<double(const std::vector<double>&)>& f) {
  std::vector<const std::vector<double>*> series;
  for (const auto& v : d.edge_bins) series.push_back(&v);
  for (const auto& v : d.pair_bins) series.push_back(&v);
  const std::size_t nb = series.empty() ? 0 : series.front()->size();
  std::vector<double> total(series.size(), 0.0);
  for (std::size_t i = 0; i < series.size(); ++i)
    for (double x : *series[i]) total[i] += x;
  std::vector<double> means(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) means[i] = total[i] / static_cast<double>(nb);
  const double full = f(means);
  std::vector<double> leave(nb);
  std::vector<double> m(series.size());
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t i = 0; i < series.size(); ++i) m[i] = (total[i] - (*series[i])[b]) / static_cast<double>(nb - 1);
    leave[b] = f(m);
  }
  const double lm = mean_of(leave);
  double ss = 0.0;
  for (double x : leave) ss += (x - lm) * (x - lm);
  ObservableEstimate est;
  est.bins = static_cast<std::int64_t>(nb);
  est.mean = static_cast<double>(nb) * full - static_cast<double>(nb - 1) * lm;  // bias-corrected
  est.error = std::sqrt(static_cast<double>(nb - 1) / static_cast<double>(nb) * ss);
  return est;
}

ObservableEstimate connected_estimate(const ChainData& d, std::size_t pair) {
  const auto& [e1, e2] = d.pairs.at(pair);
  auto find = [&](const Edge& e) {
    auto it = std::find(d.edges.begin(), d.edges.end(), e);
    if (it == d.edges.end()) throw ValidationError("montecarlo", "pair edges must also be tracked");
    return static_cast<std::size_t>(it - d.edges.begin());
  };
  const std::size_t i = find(e1), j = find(e2), k = d.edges.size() + pair;
  return jackknife_estimate(d, [=](const std::vector<double>& m) { return m[k] - m[i] * m[j]; });
}

ObservableEstimate merge(const std::vector<ObservableEstimate>& parts) {
  if (parts.empty()) throw ValidationError("montecarlo", "nothing to merge");
  ObservableEstimate out;
  bool plain = false;
  for (const auto& p : parts) {
    out.bins += p.bins;
    if (!(p.error > 0.0)) plain = true;
  }
  if (plain) {
    double s = 0.0, e2 = 0.0;
    for (const auto& p : parts) {
      s += p.mean;
      e2 += p.error * p.error;
    }
    const double n = static_cast<double>(parts.size());
    out.mean = s / n;
    out.error = std::sqrt(e2) / n;
    return out;
  }
  double wsum = 0.0, s = 0.0;
  for (const auto& p : parts) {
    const double w = 1.0 / (p.error * p.error);
    wsum += w;
    s += w * p.mean;
  }
  out.mean = s / wsum;
  out.error = std::sqrt(1.0 / wsum);
  return out;
}

ObservableEstimate estimate_occupation(const SamplerConfig& cfg, const Edge& e) {
  return occupation_estimate(run_chain(cfg, {e}), 0);
}

ObservableEstimate estimate_pair(const SamplerConfig& cfg, const Edge& e, const Edge& e2) {
  if (e == e2) {
    const ChainData d = run_chain(cfg, {e}, {{e, e}});
    return jackknife_estimate(d, [](const std::vector<double>& m) { return m[1] - m[0] * m[0]; });
  }
  return connected_estimate(run_chain(cfg, {e, e2}, {{e, e2}}), 0);
}

std::vector<Edge> site_edges(Site s, Orientation c) {
  const Site u = unit(c);
  return {Edge(s - u, s), Edge(s, s + u)};
}

std::vector<ScanRow> nematic_scan(const std::vector<int>& sizes, const std::vector<ModelParams>& grid,
                                  const ScanOptions& options) {
  std::vector<ScanRow> rows;
  for (int L : sizes) {
    if (L < 3) throw ValidationError("montecarlo", "scan boxes need L >= 3");
    const Site centre{L / 2, L / 2};
    std::vector<Edge> edges = site_edges(centre, Orientation::v);
    for (const Edge& e : site_edges(centre, Orientation::h)) edges.push_back(e);
    for (const ModelParams& p : grid) {
      SamplerConfig cfg;
      cfg.region = Region::rectangle(L, L);
      cfg.params = p;
      cfg.bc.q = options.q;
      cfg.bc.ell0 = options.ell0;
      cfg.seed = options.seed;
      cfg.sweeps = options.sweeps;
      cfg.thermalization = options.thermalization;
      cfg.bin_size = options.bin_size;
      std::vector<ObservableEstimate> v, h;
      for (const ChainData& d : run_chains(cfg, options.chains, edges, {}, options.threads)) {
        v.push_back(linear_estimate(d, {0.5, 0.5, 0.0, 0.0}));
        h.push_back(linear_estimate(d, {0.0, 0.0, 0.5, 0.5}));
      }
      ScanRow r{L, p.z, p.J, merge(v), merge(h), 0.0, 0.0, p.epsilon()};
      r.ratio = r.h.mean / r.v.mean;
      r.deviation = std::abs(r.v.mean - 0.5);
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace nematic
