#include "dsehs/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsehs {

Model::Model(ModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  num_states_ =
      (cfg_.buffer_capacity + 1) * (cfg_.battery_capacity + 1) * cfg_.num_channel_states();
}

void Model::check_state(int b, int e, int h) const {
  if (b < 0 || b > cfg_.buffer_capacity) throw std::out_of_range("buffer coordinate out of range");
  if (e < 0 || e > cfg_.battery_capacity) throw std::out_of_range("battery coordinate out of range");
  if (h < 0 || h >= cfg_.num_channel_states())
    throw std::out_of_range("channel coordinate out of range");
}

int Model::flatten(StateIndex s) const {
  check_state(s.b, s.e, s.h);
  const int nh = cfg_.num_channel_states();
  return (s.b * (cfg_.battery_capacity + 1) + s.e) * nh + s.h;
}

StateIndex Model::unflatten(int idx) const {
  if (idx < 0 || idx >= num_states_) throw std::out_of_range("state index out of range");
  const int nh = cfg_.num_channel_states();
  const int ne1 = cfg_.battery_capacity + 1;
  StateIndex s;
  s.h = idx % nh;
  idx /= nh;
  s.e = idx % ne1;
  s.b = idx / ne1;
  return s;
}

std::vector<int> Model::feasible_actions(int b, int e) const {
  check_state(b, e, 0);
  if (b > 0 && e >= cfg_.tx_energy) return {0, 1};
  return {0};
}

bool Model::is_feasible(int b, int e, int a) const {
  if (a == 0) return true;
  return b > 0 && e >= cfg_.tx_energy;
}

Pmf Model::goodput_pmf(int a, int h) const {
  check_state(0, 0, h);
  if (a == 0) return Pmf{0, {1.0}};
  const double q = cfg_.plr[static_cast<std::size_t>(h)];
  return Pmf{0, {q, 1.0 - q}};
}

double Model::buffer_cost(int b, int h, int a) const {
  check_state(b, 0, h);
  const Pmf f = goodput_pmf(a, h);
  const Pmf& l = cfg_.arrival_pmf;
  double overflow = 0.0;
  for (int fv = f.min_value(); fv <= f.max_value(); ++fv) {
    const double pf = f.prob_of(fv);
    if (pf == 0.0) continue;
    for (int lv = l.min_value(); lv <= l.max_value(); ++lv) {
      const double pl = l.prob_of(lv);
      if (pl == 0.0) continue;
      overflow += pf * pl * std::max(b - fv + lv - cfg_.buffer_capacity, 0);
    }
  }
  return b + cfg_.overflow_penalty * overflow;
}

double Model::auxiliary_cost(int b, int e, int h, int a) const {
  check_state(b, e, h);
  const int eff = is_feasible(b, e, a) ? a : 0;
  return buffer_cost(b, h, eff);
}

Pmf Model::battery_kernel(int e, int a) const {
  check_state(0, e, 0);
  if (a * cfg_.tx_energy > e)
    throw std::invalid_argument("battery_kernel: action would overdraw the battery");
  const int base = e - a * cfg_.tx_energy;
  Pmf out{0, std::vector<double>(static_cast<std::size_t>(cfg_.battery_capacity) + 1, 0.0)};
  const Pmf& eh = cfg_.harvest_pmf;
  for (int v = eh.min_value(); v <= eh.max_value(); ++v) {
    const double p = eh.prob_of(v);
    if (p == 0.0) continue;
    out.probs[static_cast<std::size_t>(std::min(base + v, cfg_.battery_capacity))] += p;
  }
  return out;
}

Pmf Model::buffer_kernel(int b, int h, int a) const {
  check_state(b, 0, h);
  if (a > std::min(b, 1)) throw std::invalid_argument("buffer_kernel: cannot transmit from an empty buffer");
  Pmf out{0, std::vector<double>(static_cast<std::size_t>(cfg_.buffer_capacity) + 1, 0.0)};
  const Pmf f = goodput_pmf(a, h);
  const Pmf& l = cfg_.arrival_pmf;
  for (int fv = f.min_value(); fv <= f.max_value(); ++fv) {
    const double pf = f.prob_of(fv);
    if (pf == 0.0) continue;
    for (int lv = l.min_value(); lv <= l.max_value(); ++lv) {
      const double pl = l.prob_of(lv);
      if (pl == 0.0) continue;
      const int next = std::clamp(b - fv + lv, 0, cfg_.buffer_capacity);
      out.probs[static_cast<std::size_t>(next)] += pf * pl;
    }
  }
  return out;
}

std::vector<std::pair<int, double>> Model::joint_kernel(StateIndex s, int a) const {
  check_state(s.b, s.e, s.h);
  if (!is_feasible(s.b, s.e, a)) throw std::invalid_argument("joint_kernel: infeasible action");
  const Pmf pb = buffer_kernel(s.b, s.h, a);
  const Pmf pe = battery_kernel(s.e, a);
  const auto& ph = cfg_.channel_kernel[static_cast<std::size_t>(s.h)];
  std::vector<std::pair<int, double>> out;
  for (int bn = pb.min_value(); bn <= pb.max_value(); ++bn) {
    const double prob_b = pb.prob_of(bn);
    if (prob_b == 0.0) continue;
    for (int en = pe.min_value(); en <= pe.max_value(); ++en) {
      const double prob_be = prob_b * pe.prob_of(en);
      if (prob_be == 0.0) continue;
      for (int hn = 0; hn < cfg_.num_channel_states(); ++hn) {
        const double p = prob_be * ph[static_cast<std::size_t>(hn)];
        if (p == 0.0) continue;
        out.emplace_back(flatten({bn, en, hn}), p);
      }
    }
  }
  return out;
}

StateIndex Model::post_decision(StateIndex s, int a, int f) const {
  check_state(s.b, s.e, s.h);
  if (f > a || a > std::min(s.b, 1) || a * cfg_.tx_energy > s.e)
    throw std::invalid_argument("post_decision: inconsistent (a, f) for this state");
  return {s.b - f, s.e - a * cfg_.tx_energy, s.h};
}

double Model::overflow_expectation(int b_pds) const {
  const Pmf& l = cfg_.arrival_pmf;
  double e = 0.0;
  for (int lv = l.min_value(); lv <= l.max_value(); ++lv)
    e += l.prob_of(lv) * std::max(b_pds + lv - cfg_.buffer_capacity, 0);
  return cfg_.overflow_penalty * e;
}

std::vector<double> Model::stationary_channel(double tol, int max_iter) const {
  const int nh = cfg_.num_channel_states();
  std::vector<double> pi(static_cast<std::size_t>(nh), 1.0 / nh);
  std::vector<double> next(static_cast<std::size_t>(nh));
  for (int it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < nh; ++i)
      for (int j = 0; j < nh; ++j)
        next[static_cast<std::size_t>(j)] +=
            pi[static_cast<std::size_t>(i)] * cfg_.channel_kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    double diff = 0.0;
    for (int j = 0; j < nh; ++j) diff = std::max(diff, std::abs(next[static_cast<std::size_t>(j)] - pi[static_cast<std::size_t>(j)]));
    pi.swap(next);
    if (diff < tol) break;
  }
  return pi;
}

}  // namespace dsehs
