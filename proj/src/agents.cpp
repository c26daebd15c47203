#include "respg/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "respg/error.hpp"
#include "respg/kernels.hpp"

namespace respg::agents {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigInvalid, what); }

std::array<double, kObsDim + 1> critic_input(const Obs& s, double a) {
  return {s[0], s[1], s[2], a};
}

// Cached per-call scratch so batch loops do not allocate per sample.
struct Scratch {
  nn::Tape actor_tape, q1_tape, q2_tape;
  std::vector<double> q1_grad, q2_grad;
  std::array<double, kObsDim + 1> q_input_grad{};
};

struct SacDraw {
  double action;
  double log_prob;
  double da_dmean;
  double da_dlogstd;
  double dlogp_dmean;
  double dlogp_dlogstd;
};

SacDraw sac_draw(std::span<const double> actor_out, double noise, nn::Squash squash) {
  const double mean = actor_out[0];
  const double log_std = actor_out[1];
  const auto s = nn::sample_squashed_gaussian({&mean, 1}, {&log_std, 1}, {&noise, 1}, squash);
  SacDraw d{s.action[0],        s.log_prob,           s.daction_dmean[0], s.daction_dlogstd[0],
            s.dlogp_dmean[0], s.dlogp_dlogstd[0]};
  if (squash == nn::Squash::Tanh) {
    // Affine map (-1, 1) -> (0, 1); density scales by 2.
    d.action = std::clamp(0.5 * (d.action + 1.0), std::numeric_limits<double>::min(),
                          1.0 - 0x1.0p-53);
    d.log_prob += std::numbers::ln2;
    d.da_dmean *= 0.5;
    d.da_dlogstd *= 0.5;
  }
  return d;
}

double critic_loss_step(nn::Mlp& q, nn::AdamState& opt, std::span<const Transition> batch,
                        std::span<const double> y, Scratch& sc) {
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  std::vector<double> grad(q.num_params(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto in = critic_input(batch[i].s, batch[i].a);
    q.forward(in, sc.q1_tape);
    const double diff = sc.q1_tape.output()[0] - y[i];
    loss += diff * diff;
    const double up = 2.0 * diff * inv_b;
    q.backward(sc.q1_tape, {&up, 1}, grad, {});
  }
  nn::adam_update(q.params(), grad, opt);
  return loss * inv_b;
}

void check_batch(std::span<const Transition> batch) {
  if (batch.empty()) throw Error(Errc::InsufficientSamples, "empty batch");
}

void check_noise(std::span<const Transition> batch, std::span<const double> noise) {
  if (noise.size() != batch.size())
    throw Error(Errc::ShapeMismatch, "noise length differs from batch size");
}

double sac_policy_pass(const nn::Mlp& actor, const nn::Mlp& q1, const nn::Mlp& q2,
                       std::span<const Transition> batch, std::span<const double> noise,
                       double alpha, nn::Squash squash, std::vector<double>* param_grad,
                       double* mean_log_prob) {
  check_batch(batch);
  check_noise(batch, noise);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  Scratch sc;
  sc.q1_grad.assign(q1.num_params(), 0.0);
  sc.q2_grad.assign(q2.num_params(), 0.0);
  if (param_grad) param_grad->assign(actor.num_params(), 0.0);
  double objective = 0.0;
  double logp_sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    actor.forward(batch[i].s, sc.actor_tape);
    const auto d = sac_draw(sc.actor_tape.output(), noise[i], squash);
    const auto in = critic_input(batch[i].s, d.action);
    q1.forward(in, sc.q1_tape);
    q2.forward(in, sc.q2_tape);
    const double v1 = sc.q1_tape.output()[0];
    const double v2 = sc.q2_tape.output()[0];
    const bool use_first = v1 <= v2;
    objective += alpha * d.log_prob - (use_first ? v1 : v2);
    logp_sum += d.log_prob;
    if (!param_grad) continue;
    const double one = 1.0;
    if (use_first)
      q1.backward(sc.q1_tape, {&one, 1}, sc.q1_grad, sc.q_input_grad);
    else
      q2.backward(sc.q2_tape, {&one, 1}, sc.q2_grad, sc.q_input_grad);
    const double dq_da = sc.q_input_grad[kObsDim];
    const std::array<double, 2> up = {
        (alpha * d.dlogp_dmean - dq_da * d.da_dmean) * inv_b,
        (alpha * d.dlogp_dlogstd - dq_da * d.da_dlogstd) * inv_b,
    };
    actor.backward(sc.actor_tape, up, *param_grad, {});
  }
  if (mean_log_prob) *mean_log_prob = logp_sum * inv_b;
  return objective * inv_b;
}

}  // namespace

std::string_view agent_kind_name(AgentKind k) noexcept {
  switch (k) {
    case AgentKind::Ddpg: return "ddpg";
    case AgentKind::Td3: return "td3";
    case AgentKind::Sac18: return "sac18";
    case AgentKind::Sac19: return "sac19";
  }
  return "ddpg";
}

std::optional<AgentKind> parse_agent_kind(std::string_view s) noexcept {
  for (auto k : {AgentKind::Ddpg, AgentKind::Td3, AgentKind::Sac18, AgentKind::Sac19})
    if (agent_kind_name(k) == s) return k;
  return std::nullopt;
}

// ---------------------------------------------------------------- buffer

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) config_error("replay buffer capacity must be positive");
  ring_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(const Transition& t) {
  if (size_ < capacity_) {
    ring_.push_back(t);
    ++size_;
  } else {
    ring_[head_] = t;
    head_ = (head_ + 1) % capacity_;
  }
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (batch == 0 || size_ < batch)
    throw Error(Errc::InsufficientSamples, "buffer holds " + std::to_string(size_) +
                                               " transitions, batch needs " +
                                               std::to_string(batch));
  std::vector<Transition> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) out.push_back(at(rng.index(size_)));
  return out;
}

// ---------------------------------------------------------------- config

AgentConfig AgentConfig::defaults(AgentKind kind) {
  AgentConfig c;
  if (is_sac(kind)) {
    c.critic_lr = 1e-3;
    c.actor_lr = 3e-3;
    c.q_lr = 3e-3;
    c.alpha = 0.2;
  }
  return c;
}

void AgentConfig::validate() const {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!(gamma > 0.0 && gamma <= 1.0)) config_error("gamma must lie in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) config_error("tau must lie in (0, 1]");
  if (buffer_size == 0) config_error("buffer_size must be positive");
  if (batch_size == 0) config_error("batch_size must be positive");
  if (!positive(critic_lr) || !positive(actor_lr) || !positive(q_lr))
    config_error("learning rates must be positive");
  if (!(std::isfinite(alpha) && alpha > 0.0)) config_error("alpha must be positive");
  if (!(explore_std >= 0.0) || !(target_noise_std >= 0.0) || !(noise_clip >= 0.0))
    config_error("noise scales must be non-negative");
  if (policy_delay < 1) config_error("policy_delay must be >= 1");
  if (!std::isfinite(target_entropy)) config_error("target_entropy must be finite");
  if (hidden.empty()) config_error("at least one hidden layer is required");
  for (auto h : hidden)
    if (h == 0) config_error("hidden layer width must be positive");
  if (!(lrelu_slope >= 0.0 && lrelu_slope < 1.0)) config_error("lrelu_slope must lie in [0, 1)");
  if (!(std::isfinite(log_std_min) && std::isfinite(log_std_max) && log_std_min < log_std_max))
    config_error("log-std clamp must be finite with min < max");
  if (!positive(reward_scale)) config_error("reward_scale must be positive");
  if (!std::isfinite(action_init_bias)) config_error("action_init_bias must be finite");
}

// ---------------------------------------------------------------- agent

Agent Agent::create(AgentKind kind, const AgentConfig& cfg, Rng& rng) {
  cfg.validate();
  Agent a;
  a.kind = kind;
  a.cfg = cfg;

  nn::MlpSpec actor_spec;
  actor_spec.layer_sizes.push_back(kObsDim);
  actor_spec.layer_sizes.insert(actor_spec.layer_sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  actor_spec.layer_sizes.push_back(is_sac(kind) ? 2 : 1);
  actor_spec.head = is_sac(kind) ? nn::Head::Gaussian : nn::Head::Sigmoid;
  actor_spec.slope = cfg.lrelu_slope;
  actor_spec.log_std_min = cfg.log_std_min;
  actor_spec.log_std_max = cfg.log_std_max;

  nn::MlpSpec critic_spec = actor_spec;
  critic_spec.layer_sizes.front() = kObsDim + 1;
  critic_spec.layer_sizes.back() = 1;
  critic_spec.head = nn::Head::Linear;

  a.actor = nn::Mlp::init(actor_spec, rng);
  a.actor.biases(a.actor.num_layers() - 1)[0] += cfg.action_init_bias;
  a.q1 = nn::Mlp::init(critic_spec, rng);
  if (has_twin_critics(kind)) a.q2 = nn::Mlp::init(critic_spec, rng);
  if (!is_sac(kind)) a.actor_target = a.actor;
  a.q1_target = a.q1;
  a.q2_target = a.q2;

  const double critic_lr = is_sac(kind) ? cfg.q_lr : cfg.critic_lr;
  a.actor_opt = nn::AdamState(a.actor.num_params(), cfg.actor_lr);
  a.q1_opt = nn::AdamState(a.q1.num_params(), critic_lr);
  a.q2_opt = nn::AdamState(a.q2.num_params(), critic_lr);
  a.log_alpha = std::log(cfg.alpha);
  a.alpha_opt = nn::AdamState(1, cfg.actor_lr);
  return a;
}

double Agent::alpha() const noexcept { return std::exp(log_alpha); }

double Agent::evaluate_action(const Obs& s) const {
  if (!is_sac(kind)) return actor_value(actor, s);
  const auto out = actor.forward(s);
  const double u = nn::squash_value(out[0], cfg.squash);
  return cfg.squash == nn::Squash::Tanh ? 0.5 * (u + 1.0) : u;
}

// ---------------------------------------------------------------- pieces

double actor_value(const nn::Mlp& actor, const Obs& s) { return actor.forward(s)[0]; }

double critic_value(const nn::Mlp& q, const Obs& s, double a) {
  return q.forward(critic_input(s, a))[0];
}

double exploration_action(const nn::Mlp& actor, const Obs& s, double std, double noise) {
  return std::clamp(actor_value(actor, s) + std * noise, 0.0, 1.0);
}

void polyak_update(std::span<double> target, std::span<const double> main, double rho) {
  if (target.size() != main.size()) throw Error(Errc::ShapeMismatch, "polyak: size mismatch");
  kernels::active().polyak(rho, main.data(), target.data(), target.size());
}

void polyak_update(nn::Mlp& target, const nn::Mlp& main, double rho) {
  polyak_update(target.params(), main.params(), rho);
}

std::vector<double> ddpg_targets(std::span<const Transition> batch, const nn::Mlp& target_actor,
                                 const nn::Mlp& target_critic, double gamma) {
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = batch[i];
    const double q = critic_value(target_critic, t.s2, actor_value(target_actor, t.s2));
    y[i] = t.r + (t.d ? 0.0 : gamma * q);
  }
  return y;
}

double td3_target_action(const nn::Mlp& target_actor, const Obs& s2, double std, double clip,
                         double noise) {
  const double eps = std::clamp(std * noise, -clip, clip);
  return std::clamp(actor_value(target_actor, s2) + eps, 0.0, 1.0);
}

std::vector<double> td3_targets(std::span<const Transition> batch, const nn::Mlp& q1_target,
                                const nn::Mlp& q2_target, std::span<const double> next_actions,
                                double gamma) {
  check_noise(batch, next_actions);
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = batch[i];
    const double q = std::min(critic_value(q1_target, t.s2, next_actions[i]),
                              critic_value(q2_target, t.s2, next_actions[i]));
    y[i] = t.r + (t.d ? 0.0 : gamma * q);
  }
  return y;
}

double entropy_bonus(double log_prob) noexcept { return -log_prob; }

PolicySample sac_sample(const nn::Mlp& actor, const Obs& s, double noise, nn::Squash squash) {
  const auto d = sac_draw(actor.forward(s), noise, squash);
  return {d.action, d.log_prob};
}

std::vector<double> sac_targets(std::span<const Transition> batch, const nn::Mlp& q1_target,
                                const nn::Mlp& q2_target, const nn::Mlp& actor, double alpha,
                                double gamma, std::span<const double> noise, nn::Squash squash) {
  check_noise(batch, noise);
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = batch[i];
    if (t.d) {
      y[i] = t.r;
      continue;
    }
    const auto p = sac_sample(actor, t.s2, noise[i], squash);
    const double q = std::min(critic_value(q1_target, t.s2, p.action),
                              critic_value(q2_target, t.s2, p.action));
    y[i] = t.r + gamma * (q - alpha * p.log_prob);
  }
  return y;
}

double sac_policy_objective(const nn::Mlp& actor, const nn::Mlp& q1, const nn::Mlp& q2,
                            std::span<const Transition> batch, std::span<const double> noise,
                            double alpha, nn::Squash squash, std::vector<double>* param_grad) {
  return sac_policy_pass(actor, q1, q2, batch, noise, alpha, squash, param_grad, nullptr);
}

double ddpg_policy_objective(const nn::Mlp& actor, const nn::Mlp& critic,
                             std::span<const Transition> batch, std::vector<double>* param_grad) {
  check_batch(batch);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  Scratch sc;
  sc.q1_grad.assign(critic.num_params(), 0.0);
  if (param_grad) param_grad->assign(actor.num_params(), 0.0);
  double objective = 0.0;
  for (const auto& t : batch) {
    actor.forward(t.s, sc.actor_tape);
    const auto in = critic_input(t.s, sc.actor_tape.output()[0]);
    critic.forward(in, sc.q1_tape);
    objective -= sc.q1_tape.output()[0];
    if (!param_grad) continue;
    const double up_q = -inv_b;
    critic.backward(sc.q1_tape, {&up_q, 1}, sc.q1_grad, sc.q_input_grad);
    const double up_a = sc.q_input_grad[kObsDim];
    actor.backward(sc.actor_tape, {&up_a, 1}, *param_grad, {});
  }
  return objective * inv_b;
}

// ---------------------------------------------------------------- updates

UpdateStats ddpg_update(Agent& agent, std::span<const Transition> batch) {
  check_batch(batch);
  const auto& cfg = agent.cfg;
  Scratch sc;
  UpdateStats st;
  const auto y = ddpg_targets(batch, agent.actor_target, agent.q1_target, cfg.gamma);
  st.critic_loss = critic_loss_step(agent.q1, agent.q1_opt, batch, y, sc);

  std::vector<double> grad;
  st.actor_loss = ddpg_policy_objective(agent.actor, agent.q1, batch, &grad);
  nn::adam_update(agent.actor.params(), grad, agent.actor_opt);
  st.actor_updated = true;

  const double rho = 1.0 - cfg.tau;
  polyak_update(agent.actor_target, agent.actor, rho);
  polyak_update(agent.q1_target, agent.q1, rho);
  return st;
}

UpdateStats td3_update(Agent& agent, std::span<const Transition> batch, long long step_index,
                       std::span<const double> target_noise) {
  check_batch(batch);
  check_noise(batch, target_noise);
  const auto& cfg = agent.cfg;
  Scratch sc;
  UpdateStats st;

  std::vector<double> next_actions(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    next_actions[i] = td3_target_action(agent.actor_target, batch[i].s2, cfg.target_noise_std,
                                        cfg.noise_clip, target_noise[i]);
  const auto y = td3_targets(batch, agent.q1_target, agent.q2_target, next_actions, cfg.gamma);
  st.critic_loss = critic_loss_step(agent.q1, agent.q1_opt, batch, y, sc);
  st.critic2_loss = critic_loss_step(agent.q2, agent.q2_opt, batch, y, sc);

  if (step_index % cfg.policy_delay == 0) {
    std::vector<double> grad;
    st.actor_loss = ddpg_policy_objective(agent.actor, agent.q1, batch, &grad);
    nn::adam_update(agent.actor.params(), grad, agent.actor_opt);
    st.actor_updated = true;
    const double rho = 1.0 - cfg.tau;
    polyak_update(agent.actor_target, agent.actor, rho);
    polyak_update(agent.q1_target, agent.q1, rho);
    polyak_update(agent.q2_target, agent.q2, rho);
  }
  return st;
}

UpdateStats td3_update(Agent& agent, std::span<const Transition> batch, long long step_index,
                       Rng& rng) {
  std::vector<double> noise(batch.size());
  for (auto& n : noise) n = rng.normal();
  return td3_update(agent, batch, step_index, noise);
}

UpdateStats sac_update(Agent& agent, std::span<const Transition> batch,
                       std::span<const double> next_noise, std::span<const double> policy_noise) {
  check_batch(batch);
  check_noise(batch, next_noise);
  check_noise(batch, policy_noise);
  const auto& cfg = agent.cfg;
  Scratch sc;
  UpdateStats st;
  const double alpha = agent.alpha();

  const auto y = sac_targets(batch, agent.q1_target, agent.q2_target, agent.actor, alpha,
                             cfg.gamma, next_noise, cfg.squash);
  st.critic_loss = critic_loss_step(agent.q1, agent.q1_opt, batch, y, sc);
  st.critic2_loss = critic_loss_step(agent.q2, agent.q2_opt, batch, y, sc);

  std::vector<double> grad;
  double mean_logp = 0.0;
  st.actor_loss = sac_policy_pass(agent.actor, agent.q1, agent.q2, batch, policy_noise, alpha,
                                  cfg.squash, &grad, &mean_logp);
  nn::adam_update(agent.actor.params(), grad, agent.actor_opt);
  st.actor_updated = true;

  if (agent.kind == AgentKind::Sac19) {
    // J(log alpha) = -alpha * (E[log pi] + target_entropy)
    const double gap = mean_logp + cfg.target_entropy;
    st.alpha_loss = -alpha * gap;
    const double g = -alpha * gap;
    nn::adam_update({&agent.log_alpha, 1}, {&g, 1}, agent.alpha_opt);
  }

  const double rho = 1.0 - cfg.tau;
  polyak_update(agent.q1_target, agent.q1, rho);
  polyak_update(agent.q2_target, agent.q2, rho);
  return st;
}

UpdateStats sac_update(Agent& agent, std::span<const Transition> batch, Rng& rng) {
  std::vector<double> next_noise(batch.size());
  std::vector<double> policy_noise(batch.size());
  for (auto& n : next_noise) n = rng.normal();
  for (auto& n : policy_noise) n = rng.normal();
  return sac_update(agent, batch, next_noise, policy_noise);
}

UpdateStats update(Agent& agent, std::span<const Transition> batch, Rng& rng) {
  ++agent.updates;
  switch (agent.kind) {
    case AgentKind::Ddpg: return ddpg_update(agent, batch);
    case AgentKind::Td3: return td3_update(agent, batch, agent.updates, rng);
    case AgentKind::Sac18:
    case AgentKind::Sac19: return sac_update(agent, batch, rng);
  }
  return {};
}

// ---------------------------------------------------------------- training

namespace {

struct EpisodeSchedule {
  std::vector<hydrology::YearRow> years;

  EpisodeSchedule(const env::ReservoirSpec& spec, const hydrology::FlowSeries& flows, int episodes) {
    if (episodes < 1) config_error("episodes must be >= 1");
    spec.validate();
    years = hydrology::whole_water_years(flows);
    if (years.empty()) config_error("inflow series contains no whole water year");
  }
  const hydrology::YearRow& year(int episode) const {
    return years[static_cast<std::size_t>(episode) % years.size()];
  }
};

Obs observe(const env::EnvState& s, const env::ReservoirSpec& spec) {
  return env::encode_observation(s, spec).as_array();
}

}  // namespace

TrainResult train(AgentKind kind, const AgentConfig& cfg, const env::ReservoirSpec& spec,
                  const hydrology::FlowSeries& flows, const TrainOptions& opts) {
  const EpisodeSchedule schedule(spec, flows, opts.episodes);
  Rng init_rng(opts.seed, streams::kInit);
  Rng explore_rng(opts.seed, streams::kExplore);
  Rng replay_rng(opts.seed, streams::kReplay);
  Rng learner_rng(opts.seed, streams::kLearner);
  Rng episode_rng(opts.seed, streams::kEpisode);

  TrainResult result{Agent::create(kind, cfg, init_rng), {}, 0};
  Agent& agent = result.agent;
  ReplayBuffer buffer(cfg.buffer_size);
  result.episode_rewards.reserve(static_cast<std::size_t>(opts.episodes));

  for (int e = 0; e < opts.episodes; ++e) {
    const auto& inflow = schedule.year(e);
    auto state = env::reset(spec, episode_rng.uniform(spec.min_storage, spec.capacity), 0);
    double total = 0.0;
    for (int m = 0; m < env::kMonths; ++m) {
      const Obs s = observe(state, spec);
      double a;
      if (buffer.size() < cfg.batch_size)
        a = explore_rng.uniform();
      else if (is_sac(kind))
        a = sac_sample(agent.actor, s, explore_rng.normal(), cfg.squash).action;
      else
        a = exploration_action(agent.actor, s, cfg.explore_std, explore_rng.normal());

      const auto out = env::step(state, a, inflow[static_cast<std::size_t>(m)], spec);
      buffer.push({s, a, out.reward * cfg.reward_scale, observe(out.next, spec), out.done});
      ++result.transitions;
      total += out.reward;
      if (buffer.size() >= cfg.batch_size) {
        const auto batch = buffer.sample(cfg.batch_size, replay_rng);
        update(agent, batch, learner_rng);
      }
      state = out.next;
    }
    result.episode_rewards.push_back(total);
    if (opts.on_episode) opts.on_episode(e, total);
  }
  return result;
}

std::vector<double> random_policy_rewards(const env::ReservoirSpec& spec,
                                          const hydrology::FlowSeries& flows, int episodes,
                                          std::uint64_t seed) {
  const EpisodeSchedule schedule(spec, flows, episodes);
  Rng explore_rng(seed, streams::kExplore);
  Rng episode_rng(seed, streams::kEpisode);
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    const auto& inflow = schedule.year(e);
    auto state = env::reset(spec, episode_rng.uniform(spec.min_storage, spec.capacity), 0);
    double total = 0.0;
    for (int m = 0; m < env::kMonths; ++m) {
      const auto out = env::step(state, explore_rng.uniform(), inflow[static_cast<std::size_t>(m)], spec);
      total += out.reward;
      state = out.next;
    }
    rewards.push_back(total);
  }
  return rewards;
}

// ---------------------------------------------------------------- checkpoints

namespace {

constexpr const char* kFormat = "respg-agent 1";

json config_json(const AgentConfig& c) {
  return json{
      {"gamma", c.gamma},
      {"tau", c.tau},
      {"buffer_size", c.buffer_size},
      {"critic_lr", c.critic_lr},
      {"actor_lr", c.actor_lr},
      {"batch_size", c.batch_size},
      {"q_lr", c.q_lr},
      {"alpha", c.alpha},
      {"explore_std", c.explore_std},
      {"target_noise_std", c.target_noise_std},
      {"noise_clip", c.noise_clip},
      {"policy_delay", c.policy_delay},
      {"target_entropy", c.target_entropy},
      {"hidden", c.hidden},
      {"lrelu_slope", c.lrelu_slope},
      {"log_std_min", c.log_std_min},
      {"log_std_max", c.log_std_max},
      {"squash", c.squash == nn::Squash::Tanh ? "tanh" : "sigmoid"},
      {"reward_scale", c.reward_scale},
      {"action_init_bias", c.action_init_bias},
  };
}

AgentConfig config_from_json(const json& j) {
  AgentConfig c;
  c.gamma = j.at("gamma").get<double>();
  c.tau = j.at("tau").get<double>();
  c.buffer_size = j.at("buffer_size").get<std::size_t>();
  c.critic_lr = j.at("critic_lr").get<double>();
  c.actor_lr = j.at("actor_lr").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.q_lr = j.at("q_lr").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.explore_std = j.at("explore_std").get<double>();
  c.target_noise_std = j.at("target_noise_std").get<double>();
  c.noise_clip = j.at("noise_clip").get<double>();
  c.policy_delay = j.at("policy_delay").get<int>();
  c.target_entropy = j.at("target_entropy").get<double>();
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.lrelu_slope = j.at("lrelu_slope").get<double>();
  c.log_std_min = j.at("log_std_min").get<double>();
  c.log_std_max = j.at("log_std_max").get<double>();
  const auto squash = j.at("squash").get<std::string>();
  if (squash != "sigmoid" && squash != "tanh") throw std::runtime_error("unknown squash " + squash);
  c.squash = squash == "tanh" ? nn::Squash::Tanh : nn::Squash::Sigmoid;
  c.reward_scale = j.value("reward_scale", 1.0);
  c.action_init_bias = j.value("action_init_bias", 0.0);
  return c;
}

struct NetFile {
  const char* name;
  nn::Mlp Agent::*member;
};

std::vector<NetFile> net_files(AgentKind kind) {
  std::vector<NetFile> files{{"actor", &Agent::actor}};
  if (!is_sac(kind)) files.push_back({"actor_target", &Agent::actor_target});
  files.push_back({"q1", &Agent::q1});
  files.push_back({"q1_target", &Agent::q1_target});
  if (has_twin_critics(kind)) {
    files.push_back({"q2", &Agent::q2});
    files.push_back({"q2_target", &Agent::q2_target});
  }
  return files;
}

}  // namespace

std::string config_to_json(const AgentConfig& cfg) { return config_json(cfg).dump(); }

void save_agent(const std::filesystem::path& dir, const Agent& agent, const std::string& run_json) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());

  json networks = json::object();
  for (const auto& f : net_files(agent.kind)) {
    const auto file = std::string(f.name) + ".mlp";
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + (dir / file).string());
    nn::save_mlp(out, agent.*(f.member));
    if (!out) throw Error(Errc::Io, "write failed for " + (dir / file).string());
    networks[f.name] = file;
  }

  json run;
  try {
    run = json::parse(run_json);
  } catch (const json::exception& e) {
    throw Error(Errc::Io, std::string("run metadata is not valid JSON: ") + e.what());
  }

  json manifest{
      {"format", kFormat},
      {"kind", std::string(agent_kind_name(agent.kind))},
      {"config", config_json(agent.cfg)},
      {"alpha", agent.alpha()},
      {"log_alpha", agent.log_alpha},
      {"updates", agent.updates},
      {"rng", Rng::kName},
      {"isa", std::string(kernels::isa_name(kernels::active_isa()))},
      {"networks", networks},
      {"run", run},
  };
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

Agent load_agent(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw Error(Errc::CheckpointUnreadable, "cannot open " + manifest_path.string());
  Agent agent;
  try {
    const json m = json::parse(in);
    if (m.at("format").get<std::string>() != kFormat)
      throw Error(Errc::CheckpointUnreadable, "unsupported checkpoint format");
    const auto kind = parse_agent_kind(m.at("kind").get<std::string>());
    if (!kind) throw Error(Errc::CheckpointUnreadable, "unknown agent kind");
    agent.kind = *kind;
    agent.cfg = config_from_json(m.at("config"));
    agent.log_alpha = m.at("log_alpha").get<double>();
    agent.updates = m.at("updates").get<long long>();
    const auto& networks = m.at("networks");
    for (const auto& f : net_files(agent.kind)) {
      const auto path = dir / networks.at(f.name).get<std::string>();
      std::ifstream net_in(path, std::ios::binary);
      if (!net_in) throw Error(Errc::CheckpointUnreadable, "cannot open " + path.string());
      agent.*(f.member) = nn::load_mlp(net_in);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::CheckpointUnreadable, std::string("bad manifest: ") + e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const Error*>(&e)) throw;
    throw Error(Errc::CheckpointUnreadable, e.what());
  }
  const auto obs_ok = agent.actor.input_size() == kObsDim &&
                      agent.actor.output_size() == (is_sac(agent.kind) ? 2u : 1u) &&
                      agent.q1.input_size() == kObsDim + 1 && agent.q1.output_size() == 1;
  if (!obs_ok) throw Error(Errc::CheckpointUnreadable, "network shapes do not match agent kind");
  return agent;
}

}  // namespace respg::agents
