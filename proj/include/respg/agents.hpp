#pragma once

// Replay buffer, the DDPG / TD3 / SAC learners and the episode training loop.
//
// Actions are normalized releases in [0, 1]. Observations are the 3-vector
// [d1, d2, c] produced by env::encode_observation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "respg/hydrology.hpp"
#include "respg/neural.hpp"
#include "respg/reservoir_env.hpp"
#include "respg/rng.hpp"

namespace respg::agents {

inline constexpr std::size_t kObsDim = 3;
using Obs = std::array<double, kObsDim>;

enum class AgentKind { Ddpg, Td3, Sac18, Sac19 };

std::string_view agent_kind_name(AgentKind k) noexcept;  // "ddpg", "td3", "sac18", "sac19"
std::optional<AgentKind> parse_agent_kind(std::string_view s) noexcept;
constexpr bool is_sac(AgentKind k) noexcept { return k == AgentKind::Sac18 || k == AgentKind::Sac19; }
constexpr bool has_twin_critics(AgentKind k) noexcept { return k != AgentKind::Ddpg; }

struct Transition {
  Obs s{};
  double a = 0.0;
  double r = 0.0;
  Obs s2{};
  bool d = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Bounded FIFO ring.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  // Uniform with replacement. Throws InsufficientSamples when size < batch.
  std::vector<Transition> sample(std::size_t batch, Rng& rng) const;

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  // Logical index, 0 = oldest.
  const Transition& at(std::size_t i) const noexcept { return ring_[(head_ + i) % capacity_]; }

 private:
  std::size_t capacity_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

struct AgentConfig {
  double gamma = 0.99;
  double tau = 0.01;
  std::size_t buffer_size = 1000000;
  double critic_lr = 1e-4;
  double actor_lr = 1e-3;
  std::size_t batch_size = 64;
  double q_lr = 3e-3;
  double alpha = 0.2;
  double explore_std = 0.1;
  double target_noise_std = 0.2;
  double noise_clip = 0.5;
  int policy_delay = 2;
  double target_entropy = -1.0;
  std::vector<std::size_t> hidden = {50, 50};
  double lrelu_slope = 0.01;
  double log_std_min = -20.0;
  double log_std_max = 2.0;
  nn::Squash squash = nn::Squash::Sigmoid;
  // Multiplies environment rewards before they enter the learner. Reported
  // episode rewards are always unscaled.
  double reward_scale = 1.0;
  // Added to the actor's output-layer bias after initialization (the mean
  // units for SAC), in pre-squash units.
  double action_init_bias = 0.0;

  static AgentConfig defaults(AgentKind kind);
  // Throws ConfigInvalid.
  void validate() const;
};

struct Agent {
  AgentKind kind = AgentKind::Ddpg;
  AgentConfig cfg;

  nn::Mlp actor;
  nn::Mlp actor_target;  // DDPG / TD3 only
  nn::Mlp q1, q2;        // q2 unused for DDPG
  nn::Mlp q1_target, q2_target;
  nn::AdamState actor_opt, q1_opt, q2_opt;

  double log_alpha = 0.0;
  nn::AdamState alpha_opt;  // SAC19

  long long updates = 0;

  static Agent create(AgentKind kind, const AgentConfig& cfg, Rng& rng);

  double alpha() const noexcept;
  // Deterministic evaluation action in [0, 1].
  double evaluate_action(const Obs& s) const;
};

struct UpdateStats {
  double critic_loss = 0.0;
  double critic2_loss = 0.0;
  double actor_loss = 0.0;
  double alpha_loss = 0.0;
  bool actor_updated = false;
};

// clip(mu(s) + std * noise, 0, 1)
double exploration_action(const nn::Mlp& actor, const Obs& s, double std, double noise);

// target <- rho * target + (1 - rho) * main. Throws ShapeMismatch.
void polyak_update(std::span<double> target, std::span<const double> main, double rho);
void polyak_update(nn::Mlp& target, const nn::Mlp& main, double rho);

double critic_value(const nn::Mlp& q, const Obs& s, double a);
double actor_value(const nn::Mlp& actor, const Obs& s);

std::vector<double> ddpg_targets(std::span<const Transition> batch, const nn::Mlp& target_actor,
                                 const nn::Mlp& target_critic, double gamma);

// clip(mu_targ(s') + clip(std * noise, -c, c), 0, 1)
double td3_target_action(const nn::Mlp& target_actor, const Obs& s2, double std, double clip,
                         double noise);

std::vector<double> td3_targets(std::span<const Transition> batch, const nn::Mlp& q1_target,
                                const nn::Mlp& q2_target, std::span<const double> next_actions,
                                double gamma);

double entropy_bonus(double log_prob) noexcept;

struct PolicySample {
  double action;
  double log_prob;
};

// Squashed-Gaussian draw from a SAC actor; action mapped onto [0, 1].
PolicySample sac_sample(const nn::Mlp& actor, const Obs& s, double noise, nn::Squash squash);

std::vector<double> sac_targets(std::span<const Transition> batch, const nn::Mlp& q1_target,
                                const nn::Mlp& q2_target, const nn::Mlp& actor, double alpha,
                                double gamma, std::span<const double> noise, nn::Squash squash);

// Mean over the batch of alpha * log pi(a~|s) - min_j Q_j(s, a~), with
// a~ = a(s, noise). Its gradient w.r.t. the actor parameters is what
// sac_update descends; exposed for finite-difference checks.
double sac_policy_objective(const nn::Mlp& actor, const nn::Mlp& q1, const nn::Mlp& q2,
                            std::span<const Transition> batch, std::span<const double> noise,
                            double alpha, nn::Squash squash, std::vector<double>* param_grad);

// Mean over the batch of -Q(s, mu(s)); gradient as above.
double ddpg_policy_objective(const nn::Mlp& actor, const nn::Mlp& critic,
                             std::span<const Transition> batch, std::vector<double>* param_grad);

UpdateStats ddpg_update(Agent& agent, std::span<const Transition> batch);

// `target_noise` holds one standard-normal draw per batch element.
UpdateStats td3_update(Agent& agent, std::span<const Transition> batch, long long step_index,
                       std::span<const double> target_noise);
UpdateStats td3_update(Agent& agent, std::span<const Transition> batch, long long step_index,
                       Rng& rng);

// `next_noise` drives the target-action samples, `policy_noise` the
// reparameterized policy step.
UpdateStats sac_update(Agent& agent, std::span<const Transition> batch,
                       std::span<const double> next_noise, std::span<const double> policy_noise);
UpdateStats sac_update(Agent& agent, std::span<const Transition> batch, Rng& rng);

// Dispatches on agent.kind and increments agent.updates (TD3 receives the
// post-increment counter as its step index).
UpdateStats update(Agent& agent, std::span<const Transition> batch, Rng& rng);

struct TrainResult {
  Agent agent;
  std::vector<double> episode_rewards;
  std::size_t transitions = 0;
};

struct TrainOptions {
  int episodes = 1;
  std::uint64_t seed = 1;
  // Called after every episode with (episode index, cumulative reward).
  std::function<void(int, double)> on_episode;
};

// Episode e runs the 12 months of water year (e mod years) from a storage
// drawn uniformly in [min_storage, capacity]. Throws ConfigInvalid.
TrainResult train(AgentKind kind, const AgentConfig& cfg, const env::ReservoirSpec& spec,
                  const hydrology::FlowSeries& flows, const TrainOptions& opts);

// Per-episode rewards of the uniform-random policy under the same episode
// schedule as train().
std::vector<double> random_policy_rewards(const env::ReservoirSpec& spec,
                                          const hydrology::FlowSeries& flows, int episodes,
                                          std::uint64_t seed);

// RNG stream identifiers used by train().
namespace streams {
inline constexpr std::uint64_t kInit = 0x696e6974;
inline constexpr std::uint64_t kExplore = 0x6578706c;
inline constexpr std::uint64_t kReplay = 0x7265706c;
inline constexpr std::uint64_t kLearner = 0x6c726e72;
inline constexpr std::uint64_t kEpisode = 0x65706973;
}  // namespace streams

// Checkpoint directory: one network file per net plus manifest.json.
// `run_json` (a JSON object) is stored in the manifest under "run".
void save_agent(const std::filesystem::path& dir, const Agent& agent,
                const std::string& run_json = "{}");
Agent load_agent(const std::filesystem::path& dir);  // throws CheckpointUnreadable

std::string config_to_json(const AgentConfig& cfg);  // compact JSON object

}  // namespace respg::agents
