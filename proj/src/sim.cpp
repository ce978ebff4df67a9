#include "dsehs/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dsehs {

namespace {

// splitmix64; used to decorrelate the per-purpose substreams of one seed.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// xorshift-multiply PRNG stream; one canonical uniform per call.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : state_(mix(seed)) {
    if (state_ == 0) state_ = 0x853c49e6748fea9bull;
  }
  double next() {
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

int sample_pmf(const Pmf& pmf, double u) {
  double acc = 0.0;
  for (int v = pmf.min_value(); v <= pmf.max_value(); ++v) {
    acc += pmf.prob_of(v);
    if (u < acc) return v;
  }
  return pmf.max_value();
}

int sample_row(const std::vector<double>& row, double u) {
  double acc = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    acc += row[j];
    if (u < acc) return static_cast<int>(j);
  }
  return static_cast<int>(row.size()) - 1;
}

}  // namespace

int greedy_action(const Model& model, int b, int e) {
  return (b > 0 && e >= model.config().tx_energy) ? 1 : 0;
}

PolicyRule greedy_rule(const Model& model) {
  return [&model](StateIndex s) { return greedy_action(model, s.b, s.e); };
}

PolicyRule table_rule(const Model& model, Policy policy) {
  if (static_cast<int>(policy.size()) != model.num_states())
    throw std::invalid_argument("table_rule: policy size mismatch");
  return [&model, policy = std::move(policy)](StateIndex s) {
    return policy[static_cast<std::size_t>(model.flatten(s))];
  };
}

SimTrace simulate(const Model& model, const PolicyRule& rule, int horizon, std::uint64_t seed,
                  std::optional<StateIndex> initial) {
  if (horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
  const auto& cfg = model.config();

  UniformStream arrivals(seed ^ mix(1));
  UniformStream harvest(seed ^ mix(2));
  UniformStream channel(seed ^ mix(3));
  UniformStream loss(seed ^ mix(4));

  StateIndex s;
  if (initial) {
    s = *initial;
    model.flatten(s);  // bounds check
  } else {
    const auto pi = model.stationary_channel();
    s = {0, cfg.battery_capacity, sample_row(pi, channel.next())};
  }

  SimTrace trace;
  trace.seed = seed;
  trace.tx_energy = cfg.tx_energy;
  trace.slots.reserve(static_cast<std::size_t>(horizon));
  for (int n = 0; n < horizon; ++n) {
    const int a = rule(s);
    if (!model.is_feasible(s.b, s.e, a))
      throw std::runtime_error("simulate: infeasible action " + std::to_string(a) + " at (b=" +
                               std::to_string(s.b) + ", e=" + std::to_string(s.e) + ", h=" +
                               std::to_string(s.h) + ")");
    // One variate per substream per slot; the loss draw is consumed
    // unconditionally so idle policies stay synchronized with active ones.
    const double u_loss = loss.next();
    const int l = sample_pmf(cfg.arrival_pmf, arrivals.next());
    const int e_h = sample_pmf(cfg.harvest_pmf, harvest.next());
    const int h_next = sample_row(cfg.channel_kernel[static_cast<std::size_t>(s.h)], channel.next());
    const int f = (a == 1 && u_loss < 1.0 - cfg.plr[static_cast<std::size_t>(s.h)]) ? 1 : 0;
    const int dropped = std::max(s.b - f + l - cfg.buffer_capacity, 0);

    trace.slots.push_back({n, s.b, s.e, s.h, a, f, l, e_h, dropped});
    s.b = std::min(s.b - f + l, cfg.buffer_capacity);
    s.e = std::min(s.e - a * cfg.tx_energy + e_h, cfg.battery_capacity);
    s.h = h_next;
  }
  return trace;
}

Metrics compute_metrics(const SimTrace& trace) {
  if (trace.slots.empty()) throw std::invalid_argument("compute_metrics: empty trace");
  Metrics m;
  double sum_b = 0.0, sum_e = 0.0;
  long long outage_slots = 0;
  for (const auto& r : trace.slots) {
    sum_b += r.b;
    sum_e += r.e;
    m.total_arrived += r.l;
    m.total_dropped += r.dropped;
    m.total_transmissions += r.a;
    m.total_delivered += r.f;
    if (r.b > 0 && r.e < trace.tx_energy) ++outage_slots;
  }
  const auto horizon = static_cast<double>(trace.slots.size());
  m.avg_backlog = sum_b / horizon;
  m.avg_battery = sum_e / horizon;
  m.outage_prob = static_cast<double>(outage_slots) / horizon;
  m.overflow_per_slot = static_cast<double>(m.total_dropped) / horizon;
  m.overflow_prob =
      m.total_arrived > 0 ? static_cast<double>(m.total_dropped) / static_cast<double>(m.total_arrived) : 0.0;
  m.throughput = static_cast<double>(m.total_delivered) / horizon;
  m.delay = m.throughput > 0.0 ? m.avg_backlog / m.throughput : 0.0;
  return m;
}

bool replay_matches(const Model& model, const SimTrace& trace) {
  const auto& cfg = model.config();
  if (trace.slots.empty()) return false;
  int b = trace.slots.front().b;
  int e = trace.slots.front().e;
  for (std::size_t i = 0; i < trace.slots.size(); ++i) {
    const auto& r = trace.slots[i];
    if (r.b != b || r.e != e) return false;
    if (!model.is_feasible(r.b, r.e, r.a)) return false;
    if (r.f > r.a) return false;
    if (r.dropped != std::max(r.b - r.f + r.l - cfg.buffer_capacity, 0)) return false;
    b = std::min(r.b - r.f + r.l, cfg.buffer_capacity);
    e = std::min(r.e - r.a * cfg.tx_energy + r.e_harvest, cfg.battery_capacity);
  }
  return true;
}

std::vector<SweepRow> compare_policies(const ModelConfig& base, const std::vector<double>& p_grid,
                                       int horizon, const std::vector<std::uint64_t>& seeds,
                                       bool common_random, double theta, int tau_max,
                                       const Policy* fixed_policy) {
  if (seeds.empty()) throw std::invalid_argument("compare_policies: at least one seed required");
  std::vector<SweepRow> rows;
  for (double p : p_grid) {
    ModelConfig cfg = base;
    cfg.arrival_pmf = Pmf::bernoulli(p);
    const Model model(cfg);
    Policy policy;
    if (fixed_policy) {
      policy = *fixed_policy;
    } else {
      Solution sol = pds_value_iteration(model, theta, tau_max);
      if (!sol.report.converged)
        throw std::runtime_error("compare_policies: solver did not converge at p=" +
                                 std::to_string(p));
      policy = std::move(sol.policy);
    }
    const PolicyRule optimal = table_rule(model, policy);
    const PolicyRule greedy = greedy_rule(model);
    for (std::uint64_t seed : seeds) {
      const std::uint64_t greedy_seed = common_random ? seed : mix(seed ^ 0x67726565ull);
      rows.push_back({p, "greedy", seed, compute_metrics(simulate(model, greedy, horizon, greedy_seed))});
      rows.push_back({p, "optimal", seed, compute_metrics(simulate(model, optimal, horizon, seed))});
    }
  }
  return rows;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << "n,b,e,h,a,f,l,eH,dropped\n";
  for (const auto& r : trace.slots)
    out << r.n << ',' << r.b << ',' << r.e << ',' << r.h << ',' << r.a << ',' << r.f << ',' << r.l
        << ',' << r.e_harvest << ',' << r.dropped << '\n';
}

}  // namespace dsehs
