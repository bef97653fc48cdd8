// SPDX-License-Identifier: Apache-2.0
#include "abps/config.hpp"

#include <string_view>
#include <vector>

#include "abps/csv.hpp"
#include "abps/error.hpp"

namespace abps::config {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::kAbps: return "abps";
    case Mode::kAbpsPbt: return "abps-pbt";
    case Mode::kIndependentBaseline: return "independent-baseline";
  }
  fail("mode_name: bad mode");
}

Mode mode_from_name(const std::string& name) {
  if (name == "abps") return Mode::kAbps;
  if (name == "abps-pbt") return Mode::kAbpsPbt;
  if (name == "independent-baseline") return Mode::kIndependentBaseline;
  fail("unknown mode '", name, "'");
}

void ExperimentConfig::validate() const {
  require(run.pool.empty() != !prior.has_value(),
          "config: provide exactly one of [[agent]] blocks or a [prior]");
  if (prior) {
    prior->validate();
    for (const auto& h : run.pool) h.validate();
    run.abps.validate();
    run.pbt.validate();
  } else {
    run.validate();
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Cuts an inline comment; a '#' inside a quoted string does not count.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    else if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool parse_bool(std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail("config: expected true/false, got '", std::string(v), "'");
}

std::string parse_string(std::string_view v) {
  require(v.size() >= 2 && v.front() == '"' && v.back() == '"',
          "config: expected a quoted string, got '", std::string(v), "'");
  return std::string(v.substr(1, v.size() - 2));
}

std::vector<int> parse_int_array(std::string_view v) {
  require(v.size() >= 2 && v.front() == '[' && v.back() == ']',
          "config: expected an array, got '", std::string(v), "'");
  std::vector<int> out;
  std::string_view body = trim(v.substr(1, v.size() - 2));
  if (body.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = body.find(',', start);
    const auto item = trim(pos == std::string_view::npos ? body.substr(start)
                                                         : body.substr(start, pos - start));
    out.push_back(csv::parse_int(item));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

struct ParseState {
  ExperimentConfig cfg;
  std::string section = "";      // "", env, abps, pbt, prior, agent
  bool in_agent = false;
  learner::HyperParams agent;    // block under construction
  bool any_agent = false;

  void flush_agent() {
    if (!in_agent) return;
    cfg.run.pool.push_back(agent);
    agent = learner::HyperParams{};
    in_agent = false;
  }

  void handle_root(std::string_view key, std::string_view v) {
    if (key == "mode") {
      cfg.mode = mode_from_name(parse_string(v));
    } else if (key == "run_seed") {
      cfg.run.run_seed = csv::parse_u64(v);
    } else {
      fail("config: unknown top-level key '", std::string(key), "'");
    }
  }

  void handle_env(std::string_view key, std::string_view v) {
    auto& e = cfg.run.env;
    if (key == "kind") e.kind = env::kind_from_name(parse_string(v));
    else if (key == "chain_length") e.chain_length = csv::parse_int(v);
    else if (key == "width") e.width = csv::parse_int(v);
    else if (key == "height") e.height = csv::parse_int(v);
    else if (key == "slip_probability") e.slip_probability = csv::parse_double(v);
    else if (key == "max_episode_steps") e.max_episode_steps = csv::parse_int(v);
    else if (key == "seed") e.seed = csv::parse_u64(v);
    else fail("config: unknown [env] key '", std::string(key), "'");
  }

  void handle_abps(std::string_view key, std::string_view v) {
    auto& a = cfg.run.abps;
    if (key == "m") a.m = csv::parse_int(v);
    else if (key == "n_init_eval_episodes") a.n_init_eval_episodes = csv::parse_int(v);
    else if (key == "eval_episodes") a.eval_episodes = csv::parse_int(v);
    else if (key == "eval_period") a.eval_period = csv::parse_u64(v);
    else if (key == "total_env_steps") a.total_env_steps = csv::parse_u64(v);
    else if (key == "strategy") a.strategy.kind = bandit::strategy_from_name(parse_string(v));
    else if (key == "xi") a.strategy.xi = csv::parse_double(v);
    else if (key == "epsilon_b") a.strategy.epsilon_b = csv::parse_double(v);
    else if (key == "temperature") a.strategy.temperature = csv::parse_double(v);
    else if (key == "ucb_window_counts") a.strategy.ucb_window_counts = parse_bool(v);
    else if (key == "bandit_mode") {
      const auto name = parse_string(v);
      if (name == "cumulative") a.bandit_mode = bandit::Mode::kCumulative;
      else if (name == "sliding") a.bandit_mode = bandit::Mode::kSliding;
      else fail("config: unknown bandit_mode '", name, "'");
    } else if (key == "window_length") a.window_length = csv::parse_u64(v);
    else if (key == "batch_size") a.batch_size = csv::parse_u64(v);
    else if (key == "learn_start") a.learn_start = csv::parse_u64(v);
    else if (key == "buffer_capacity") a.buffer_capacity = csv::parse_u64(v);
    else fail("config: unknown [abps] key '", std::string(key), "'");
  }

  void handle_pbt(std::string_view key, std::string_view v) {
    auto& p = cfg.run.pbt;
    if (key == "enabled") p.enabled = parse_bool(v);
    else if (key == "pbt_period_multiplier") p.pbt_period_multiplier = csv::parse_u64(v);
    else if (key == "truncation_fraction") p.truncation_fraction = csv::parse_double(v);
    else if (key == "staleness_threshold") p.staleness_threshold = csv::parse_u64(v);
    else if (key == "perturb_down") p.perturb_down = csv::parse_double(v);
    else if (key == "perturb_up") p.perturb_up = csv::parse_double(v);
    else if (key == "mutate_learning_rate") p.mutate_learning_rate = parse_bool(v);
    else if (key == "mutate_epsilon_decay") p.mutate_epsilon_decay = parse_bool(v);
    else if (key == "learning_rate_min") p.learning_rate_min = csv::parse_double(v);
    else if (key == "learning_rate_max") p.learning_rate_max = csv::parse_double(v);
    else if (key == "epsilon_decay_min") p.epsilon_decay_min = csv::parse_u64(v);
    else if (key == "epsilon_decay_max") p.epsilon_decay_max = csv::parse_u64(v);
    else fail("config: unknown [pbt] key '", std::string(key), "'");
  }

  void handle_prior(std::string_view key, std::string_view v) {
    if (!cfg.prior) cfg.prior = pool::default_prior();
    auto& p = *cfg.prior;
    if (key == "k") p.k = csv::parse_u64(v);
    else if (key == "size_perturbation_min") p.size_perturbation_min = csv::parse_double(v);
    else if (key == "size_perturbation_max") p.size_perturbation_max = csv::parse_double(v);
    else if (key == "learning_rate_min") p.learning_rate_min = csv::parse_double(v);
    else if (key == "learning_rate_max") p.learning_rate_max = csv::parse_double(v);
    else if (key == "epsilon_decay_min") p.epsilon_decay_min = csv::parse_u64(v);
    else if (key == "epsilon_decay_max") p.epsilon_decay_max = csv::parse_u64(v);
    else fail("config: unknown [prior] key '", std::string(key), "'");
  }

  void handle_agent(std::string_view key, std::string_view v) {
    require(in_agent, "config: agent keys outside an [[agent]] block");
    if (key == "hidden_sizes") agent.hidden_sizes = parse_int_array(v);
    else if (key == "learning_rate") agent.learning_rate = csv::parse_double(v);
    else if (key == "epsilon_decay_steps") agent.epsilon_decay_steps = csv::parse_u64(v);
    else if (key == "epsilon_start") agent.epsilon_start = csv::parse_double(v);
    else if (key == "epsilon_final") agent.epsilon_final = csv::parse_double(v);
    else if (key == "discount") agent.discount = csv::parse_double(v);
    else if (key == "target_sync_period") agent.target_sync_period = csv::parse_u64(v);
    else fail("config: unknown [[agent]] key '", std::string(key), "'");
  }
};

}  // namespace

ExperimentConfig parse_experiment(const std::string& text) {
  ParseState st;
  std::size_t start = 0;
  int line_no = 0;
  const std::string_view body = text;
  while (start <= body.size()) {
    auto pos = body.find('\n', start);
    if (pos == std::string_view::npos) pos = body.size();
    const auto line = trim(strip_comment(body.substr(start, pos - start)));
    start = pos + 1;
    ++line_no;
    if (line.empty()) {
      if (pos == body.size()) break;
      continue;
    }
    if (line == "[[agent]]") {
      st.flush_agent();
      st.in_agent = true;
      st.any_agent = true;
      st.section = "agent";
    } else if (line.front() == '[') {
      require(line.back() == ']', "config line ", line_no, ": malformed section header");
      st.flush_agent();
      const auto name = std::string(line.substr(1, line.size() - 2));
      require(name == "env" || name == "abps" || name == "pbt" || name == "prior",
              "config line ", line_no, ": unknown section [", name, "]");
      st.section = name;
    } else {
      const auto eq = line.find('=');
      require(eq != std::string_view::npos, "config line ", line_no, ": expected key = value");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      require(!key.empty() && !value.empty(), "config line ", line_no,
              ": expected key = value");
      if (st.section.empty()) st.handle_root(key, value);
      else if (st.section == "env") st.handle_env(key, value);
      else if (st.section == "abps") st.handle_abps(key, value);
      else if (st.section == "pbt") st.handle_pbt(key, value);
      else if (st.section == "prior") st.handle_prior(key, value);
      else st.handle_agent(key, value);
    }
    if (pos == body.size()) break;
  }
  st.flush_agent();
  st.cfg.validate();
  return st.cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return parse_experiment(csv::read_file(path));
}

ExperimentConfig resolve(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.prior) return cfg;
  ExperimentConfig out = cfg;
  RngStream rng(derive_seed(cfg.run.run_seed, training::seed_ns::kPool));
  out.run.pool = pool::sample_pool(*cfg.prior, rng);
  out.prior.reset();
  out.validate();
  return out;
}

namespace {

void append_kv(std::string& out, const char* key, const std::string& value) {
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string to_toml(const ExperimentConfig& cfg_in) {
  const auto cfg = resolve(cfg_in);
  std::string out;
  append_kv(out, "mode", quoted(mode_name(cfg.mode)));
  append_kv(out, "run_seed", std::to_string(cfg.run.run_seed));

  out += "\n[env]\n";
  const auto& e = cfg.run.env;
  append_kv(out, "kind", quoted(env::kind_name(e.kind)));
  append_kv(out, "chain_length", std::to_string(e.chain_length));
  append_kv(out, "width", std::to_string(e.width));
  append_kv(out, "height", std::to_string(e.height));
  append_kv(out, "slip_probability", csv::format_double(e.slip_probability));
  append_kv(out, "max_episode_steps", std::to_string(e.max_episode_steps));
  append_kv(out, "seed", std::to_string(e.seed));

  out += "\n[abps]\n";
  const auto& a = cfg.run.abps;
  append_kv(out, "m", std::to_string(a.m));
  append_kv(out, "n_init_eval_episodes", std::to_string(a.n_init_eval_episodes));
  append_kv(out, "eval_episodes", std::to_string(a.eval_episodes));
  append_kv(out, "eval_period", std::to_string(a.eval_period));
  append_kv(out, "total_env_steps", std::to_string(a.total_env_steps));
  append_kv(out, "strategy", quoted(bandit::strategy_name(a.strategy.kind)));
  append_kv(out, "xi", csv::format_double(a.strategy.xi));
  append_kv(out, "epsilon_b", csv::format_double(a.strategy.epsilon_b));
  append_kv(out, "temperature", csv::format_double(a.strategy.temperature));
  append_kv(out, "ucb_window_counts", fmt_bool(a.strategy.ucb_window_counts));
  append_kv(out, "bandit_mode",
            quoted(a.bandit_mode == bandit::Mode::kSliding ? "sliding" : "cumulative"));
  append_kv(out, "window_length", std::to_string(a.window_length));
  append_kv(out, "batch_size", std::to_string(a.batch_size));
  append_kv(out, "learn_start", std::to_string(a.learn_start));
  append_kv(out, "buffer_capacity", std::to_string(a.buffer_capacity));

  out += "\n[pbt]\n";
  const auto& p = cfg.run.pbt;
  append_kv(out, "enabled", fmt_bool(p.enabled));
  append_kv(out, "pbt_period_multiplier", std::to_string(p.pbt_period_multiplier));
  append_kv(out, "truncation_fraction", csv::format_double(p.truncation_fraction));
  append_kv(out, "staleness_threshold", std::to_string(p.staleness_threshold));
  append_kv(out, "perturb_down", csv::format_double(p.perturb_down));
  append_kv(out, "perturb_up", csv::format_double(p.perturb_up));
  append_kv(out, "mutate_learning_rate", fmt_bool(p.mutate_learning_rate));
  append_kv(out, "mutate_epsilon_decay", fmt_bool(p.mutate_epsilon_decay));
  append_kv(out, "learning_rate_min", csv::format_double(p.learning_rate_min));
  append_kv(out, "learning_rate_max", csv::format_double(p.learning_rate_max));
  append_kv(out, "epsilon_decay_min", std::to_string(p.epsilon_decay_min));
  append_kv(out, "epsilon_decay_max", std::to_string(p.epsilon_decay_max));

  for (const auto& h : cfg.run.pool) {
    out += "\n[[agent]]\n";
    std::string sizes = "[";
    for (std::size_t i = 0; i < h.hidden_sizes.size(); ++i) {
      if (i) sizes += ", ";
      sizes += std::to_string(h.hidden_sizes[i]);
    }
    sizes += "]";
    append_kv(out, "hidden_sizes", sizes);
    append_kv(out, "learning_rate", csv::format_double(h.learning_rate));
    append_kv(out, "epsilon_decay_steps", std::to_string(h.epsilon_decay_steps));
    append_kv(out, "epsilon_start", csv::format_double(h.epsilon_start));
    append_kv(out, "epsilon_final", csv::format_double(h.epsilon_final));
    append_kv(out, "discount", csv::format_double(h.discount));
    append_kv(out, "target_sync_period", std::to_string(h.target_sync_period));
  }
  return out;
}

}  // namespace abps::config
