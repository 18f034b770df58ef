#include "riskavi/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "riskavi/errors.hpp"

namespace riskavi {

namespace {

constexpr int kMaxPlacementDraws = 1000;

enum Stream : std::uint64_t { kLayout = 1, kCost = 2, kNoise = 3 };

// Entity placement with rejection; `ok` decides whether a candidate is kept.
template <typename Pred>
Vec2 place(CounterRng& rng, const EnvConfig& cfg, const char* what, Pred ok) {
  for (int i = 0; i < kMaxPlacementDraws; ++i) {
    Vec2 p{rng.uniform(-cfg.spawn_half_width, cfg.spawn_half_width),
           rng.uniform(-cfg.spawn_half_width, cfg.spawn_half_width)};
    if (ok(p)) return p;
  }
  throw InfeasibleConfiguration(std::string("could not place ") + what + " within 1000 draws");
}

double square_distance(Vec2 p, Vec2 center, double half_width) {
  const double dx = std::max(std::abs(p.x - center.x) - half_width, 0.0);
  const double dy = std::max(std::abs(p.y - center.y) - half_width, 0.0);
  return std::hypot(dx, dy);
}

bool goal_ok(Vec2 g, const RobotState& robot, const std::vector<Vec2>& obstacles, const EnvConfig& cfg) {
  if (distance(g, robot.position()) <= cfg.goal_radius + cfg.robot_radius) return false;
  for (const auto& o : obstacles) {
    if (square_distance(g, o, cfg.obstacle_half_width) <= cfg.robot_radius) return false;
  }
  return true;
}

}  // namespace

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

void EnvConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("env.horizon must be >= 1");
  const double positives[] = {wheel_radius, half_axle, robot_radius, hazard_radius,
                              obstacle_half_width, goal_radius, lidar_range,
                              arena_half_width, spawn_half_width};
  for (double v : positives) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("env geometry values must be positive");
  }
  if (lidar_bins == 0) throw std::invalid_argument("env.lidar_bins must be >= 1");
  if (!(wheel_speed > 0.0)) throw std::invalid_argument("env.wheel_speed must be positive");
  if (!(pose_noise >= 0.0)) throw std::invalid_argument("env.pose_noise must be >= 0");
  if (!(step_penalty >= 0.0) || !(goal_bonus >= 0.0)) {
    throw std::invalid_argument("env.step_penalty and env.goal_bonus must be >= 0");
  }
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  // fmod maps pi to -pi; the range is (-pi, pi].
  return w == -std::numbers::pi ? std::numbers::pi : w;
}

RobotState kinematics(const RobotState& pose, double v_left, double v_right, const EnvConfig& cfg) {
  const double linear = 0.5 * cfg.wheel_radius * (v_right + v_left);
  RobotState next;
  next.x = pose.x + linear * std::cos(pose.theta);
  next.y = pose.y + linear * std::sin(pose.theta);
  next.theta = wrap_angle(pose.theta + cfg.wheel_radius / (2.0 * cfg.half_axle) * (v_right - v_left));
  return next;
}

bool disc_hits_square(Vec2 p, double radius, Vec2 center, double half_width) {
  return square_distance(p, center, half_width) < radius;
}

bool inside_any_hazard(const WorldState& world, const EnvConfig& cfg) {
  const Vec2 p = world.robot.position();
  return std::any_of(world.hazards.begin(), world.hazards.end(),
                     [&](Vec2 h) { return distance(p, h) < cfg.hazard_radius; });
}

bool touches_any_obstacle(Vec2 p, const WorldState& world, const EnvConfig& cfg) {
  return std::any_of(world.obstacles.begin(), world.obstacles.end(), [&](Vec2 o) {
    return disc_hits_square(p, cfg.robot_radius, o, cfg.obstacle_half_width);
  });
}

ResetResult reset(const EnvConfig& cfg, std::uint64_t episode_seed) {
  cfg.validate();
  WorldState w;
  w.episode_seed = episode_seed;
  w.layout_rng = CounterRng(derive_seed(episode_seed, kLayout));
  w.cost_rng = CounterRng(derive_seed(episode_seed, kCost));
  w.noise_rng = CounterRng(derive_seed(episode_seed, kNoise));

  const Vec2 origin{0.0, 0.0};
  w.hazards.reserve(cfg.n_hazards);
  for (std::size_t i = 0; i < cfg.n_hazards; ++i) {
    w.hazards.push_back(place(w.layout_rng, cfg, "hazard", [&](Vec2 p) {
      return distance(p, origin) > cfg.hazard_radius + cfg.robot_radius;
    }));
  }
  w.obstacles.reserve(cfg.n_obstacles);
  for (std::size_t i = 0; i < cfg.n_obstacles; ++i) {
    w.obstacles.push_back(place(w.layout_rng, cfg, "obstacle", [&](Vec2 p) {
      return square_distance(origin, p, cfg.obstacle_half_width) > cfg.robot_radius;
    }));
  }
  w.goal = place(w.layout_rng, cfg, "goal", [&](Vec2 p) { return goal_ok(p, w.robot, w.obstacles, cfg); });

  auto obs = observe(w, cfg);
  return {std::move(w), std::move(obs)};
}

double stage_cost(const RobotState& before, const RobotState& after, Vec2 goal, bool goal_reached,
                  const EnvConfig& cfg) {
  const double progress = distance(after.position(), goal) - distance(before.position(), goal);
  return progress + cfg.step_penalty - (goal_reached ? cfg.goal_bonus : 0.0);
}

StepOutcome step(WorldState& world, std::size_t action, const EnvConfig& cfg) {
  if (action >= kNumActions) {
    throw std::invalid_argument("step: action index must be in 0..4, got " + std::to_string(action));
  }
  const RobotState before = world.robot;
  const auto& cmd = kWheelCommands[action];
  RobotState next = kinematics(before, cfg.wheel_speed * cmd[0], cfg.wheel_speed * cmd[1], cfg);
  if (cfg.pose_noise > 0.0) {
    // Box-Muller on the counter stream keeps noise reproducible per episode.
    auto gauss = [&] {
      double u1 = world.noise_rng.uniform();
      while (u1 <= 0.0) u1 = world.noise_rng.uniform();
      const double u2 = world.noise_rng.uniform();
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };
    next.x += cfg.pose_noise * gauss();
    next.y += cfg.pose_noise * gauss();
  }
  next.x = std::clamp(next.x, -cfg.arena_half_width, cfg.arena_half_width);
  next.y = std::clamp(next.y, -cfg.arena_half_width, cfg.arena_half_width);

  StepOutcome out;
  if (touches_any_obstacle(next.position(), world, cfg)) {
    next.x = before.x;
    next.y = before.y;
    out.collision = true;
    out.c_h = world.cost_rng.uniform();
  }
  world.robot = next;
  if (inside_any_hazard(world, cfg)) out.c_s = world.cost_rng.uniform();

  out.goal_reached = distance(next.position(), world.goal) <= cfg.goal_radius;
  out.g = stage_cost(before, next, world.goal, out.goal_reached, cfg);
  if (out.goal_reached) {
    ++world.goals_reached;
    world.goal = place(world.layout_rng, cfg, "goal",
                       [&](Vec2 p) { return goal_ok(p, world.robot, world.obstacles, cfg); });
  }

  ++world.step_count;
  out.done = world.step_count >= cfg.horizon;
  out.obs = observe(world, cfg);
  return out;
}

std::vector<double> lidar(const WorldState& world, const EnvConfig& cfg) {
  const std::size_t bins = cfg.lidar_bins;
  std::vector<double> out(3 * bins, 0.0);
  const double width = 2.0 * std::numbers::pi / static_cast<double>(bins);
  const Vec2 p = world.robot.position();

  auto accumulate = [&](std::size_t channel, Vec2 e) {
    const double d = distance(p, e);
    if (d >= cfg.lidar_range) return;
    double rel = std::atan2(e.y - p.y, e.x - p.x) - world.robot.theta;
    rel = std::fmod(rel + 0.5 * width, 2.0 * std::numbers::pi);
    if (rel < 0.0) rel += 2.0 * std::numbers::pi;
    const std::size_t bin = std::min(static_cast<std::size_t>(rel / width), bins - 1);
    double& slot = out[channel * bins + bin];
    slot = std::max(slot, 1.0 - d / cfg.lidar_range);
  };

  accumulate(0, world.goal);
  for (const auto& h : world.hazards) accumulate(1, h);
  for (const auto& o : world.obstacles) accumulate(2, o);
  return out;
}

std::vector<double> observe(const WorldState& world, const EnvConfig& cfg) {
  std::vector<double> obs;
  obs.reserve(cfg.observation_dim());
  obs.push_back(std::cos(world.robot.theta));
  obs.push_back(std::sin(world.robot.theta));
  obs.push_back(world.robot.x);
  obs.push_back(world.robot.y);
  const auto rays = lidar(world, cfg);
  obs.insert(obs.end(), rays.begin(), rays.end());
  return obs;
}

}  // namespace riskavi
