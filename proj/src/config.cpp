#include "dsehs/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace dsehs {

namespace {

constexpr double kMassTol = 1e-12;

void check_pmf(const Pmf& pmf, const char* name) {
  try {
    pmf.validate(kMassTol);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(name) + ": " + e.what());
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (buffer_capacity < 0) throw std::invalid_argument("buffer_capacity must be >= 0");
  if (battery_capacity < 0) throw std::invalid_argument("battery_capacity must be >= 0");
  const int nh = num_channel_states();
  if (nh < 1) throw std::invalid_argument("at least one channel state required");
  for (double q : plr)
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("plr entries must be in [0,1]");
  for (int h = 0; h + 1 < nh; ++h) {
    if (allow_flat_plr ? (plr[h] < plr[h + 1]) : (plr[h] <= plr[h + 1]))
      throw std::invalid_argument("plr must be strictly decreasing in the channel index");
  }
  if (static_cast<int>(channel_kernel.size()) != nh)
    throw std::invalid_argument("channel_kernel must have one row per channel state");
  for (int h = 0; h < nh; ++h) {
    const auto& row = channel_kernel[h];
    if (static_cast<int>(row.size()) != nh)
      throw std::invalid_argument("channel_kernel rows must have N_h entries");
    double s = 0.0;
    for (double p : row) {
      if (p < 0.0) throw std::invalid_argument("channel_kernel entries must be >= 0");
      s += p;
    }
    if (std::abs(s - 1.0) > kMassTol)
      throw std::invalid_argument("channel_kernel row " + std::to_string(h) + " does not sum to 1");
  }
  check_pmf(arrival_pmf, "arrival_pmf");
  check_pmf(harvest_pmf, "harvest_pmf");
  if (arrival_pmf.offset != 0 || harvest_pmf.offset != 0)
    throw std::invalid_argument("arrival/harvest pmfs must have support starting at 0");
  if (tx_energy < 1) throw std::invalid_argument("tx_energy must be >= 1");
  // tx_energy > battery_capacity is allowed: transmission is then never
  // feasible and the only policy is to idle.
  if (overflow_penalty < 0.0) throw std::invalid_argument("overflow_penalty must be >= 0");
  if (discount < 0.0 || discount >= 1.0) throw std::invalid_argument("discount must be in [0,1)");
}

std::vector<std::vector<double>> ModelConfig::birth_death_kernel(int n) {
  if (n < 1) throw std::invalid_argument("birth_death_kernel: n must be >= 1");
  std::vector<std::vector<double>> k(n, std::vector<double>(n, 0.0));
  if (n == 1) {
    k[0][0] = 1.0;
    return k;
  }
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      k[0][0] = 0.5;
      k[0][1] = 0.5;
    } else if (i == n - 1) {
      k[i][i] = 0.5;
      k[i][i - 1] = 0.5;
    } else {
      k[i][i - 1] = 0.25;
      k[i][i] = 0.5;
      k[i][i + 1] = 0.25;
    }
  }
  return k;
}

ModelConfig ModelConfig::reference(double arrival_p) {
  ModelConfig c;
  c.buffer_capacity = 25;
  c.battery_capacity = 25;
  c.plr = {0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  c.channel_kernel = birth_death_kernel(8);
  c.arrival_pmf = Pmf::bernoulli(arrival_p);
  c.harvest_pmf = Pmf::bernoulli(0.7);
  c.tx_energy = 1;
  c.overflow_penalty = 50.0;
  c.discount = 0.98;
  return c;
}

ModelConfig ModelConfig::tiny(double arrival_p, double gamma) {
  ModelConfig c;
  c.buffer_capacity = 2;
  c.battery_capacity = 2;
  c.plr = {0.8, 0.2};
  c.channel_kernel = birth_death_kernel(2);
  c.arrival_pmf = Pmf::bernoulli(arrival_p);
  c.harvest_pmf = Pmf::bernoulli(0.7);
  c.tx_energy = 1;
  c.overflow_penalty = 50.0;
  c.discount = gamma;
  return c;
}

namespace {

struct Entry {
  int line;
  std::string value;
};

std::vector<double> parse_reals(const Entry& e, const std::string& key) {
  std::istringstream in(e.value);
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  if (out.empty() || !in.eof())
    throw ConfigError(e.line, key + ": expected a whitespace-separated list of numbers");
  return out;
}

double parse_real(const Entry& e, const std::string& key) {
  auto v = parse_reals(e, key);
  if (v.size() != 1) throw ConfigError(e.line, key + ": expected a single number");
  return v[0];
}

int parse_int(const Entry& e, const std::string& key) {
  const double x = parse_real(e, key);
  const int i = static_cast<int>(std::llround(x));
  if (std::abs(x - i) > 0) throw ConfigError(e.line, key + ": expected an integer");
  return i;
}

Pmf parse_pmf(const Entry& e, const std::string& key) {
  Pmf p{0, parse_reals(e, key)};
  try {
    p.validate(1e-12);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(e.line, key + ": " + err.what());
  }
  return p;
}

}  // namespace

ModelConfig parse_config_text(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (value.empty()) throw ConfigError(lineno, key + ": empty value");
    if (entries.count(key)) throw ConfigError(lineno, key + ": duplicate key");
    entries[key] = Entry{lineno, value};
  }

  ModelConfig cfg;
  auto take = [&](const std::string& key) -> Entry {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError(0, "missing required key '" + key + "'");
    Entry e = it->second;
    entries.erase(it);
    return e;
  };
  auto take_optional = [&](const std::string& key) -> std::optional<Entry> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    Entry e = it->second;
    entries.erase(it);
    return e;
  };

  cfg.buffer_capacity = parse_int(take("buffer.capacity"), "buffer.capacity");
  cfg.battery_capacity = parse_int(take("battery.capacity"), "battery.capacity");
  {
    const Entry e = take("channel.plr");
    cfg.plr = parse_reals(e, "channel.plr");
  }
  const int nh = cfg.num_channel_states();
  {
    const Entry e = take("channel.kernel");
    if (e.value == "birth_death") {
      cfg.channel_kernel = ModelConfig::birth_death_kernel(nh);
    } else {
      const auto flat = parse_reals(e, "channel.kernel");
      if (static_cast<int>(flat.size()) != nh * nh)
        throw ConfigError(e.line, "channel.kernel: expected 'birth_death' or " +
                                      std::to_string(nh * nh) + " row-major entries");
      cfg.channel_kernel.assign(nh, std::vector<double>(nh));
      for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nh; ++j) cfg.channel_kernel[i][j] = flat[i * nh + j];
    }
  }
  cfg.arrival_pmf = parse_pmf(take("arrival.pmf"), "arrival.pmf");
  cfg.harvest_pmf = parse_pmf(take("harvest.pmf"), "harvest.pmf");
  cfg.tx_energy = parse_int(take("tx.energy"), "tx.energy");
  cfg.overflow_penalty = parse_real(take("overflow.penalty"), "overflow.penalty");
  cfg.discount = parse_real(take("discount"), "discount");
  if (auto e = take_optional("channel.allow_flat_plr"))
    cfg.allow_flat_plr = parse_int(*e, "channel.allow_flat_plr") != 0;

  if (!entries.empty()) {
    const auto& [key, e] = *entries.begin();
    throw ConfigError(e.line, "unknown key '" + key + "'");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(0, err.what());
  }
  return cfg;
}

ModelConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace dsehs
