#pragma once

// Kinematic reach-avoid arena: a differential-drive robot, traversable hazard
// discs (soft constraints), solid square obstacles (hard constraints) and a
// goal that respawns whenever it is reached.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "riskavi/random.hpp"

namespace riskavi {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

struct EnvConfig {
  long horizon = 1000;
  double wheel_radius = 0.02;
  double half_axle = 0.05;
  double wheel_speed = 1.0;
  double robot_radius = 0.05;
  double hazard_radius = 0.1;
  double obstacle_half_width = 0.075;
  double goal_radius = 0.15;
  double lidar_range = 3.0;
  std::size_t lidar_bins = 16;
  std::size_t n_hazards = 10;
  std::size_t n_obstacles = 10;
  double step_penalty = 0.001;  ///< c_g
  double goal_bonus = 1.0;
  double arena_half_width = 1.25;
  double spawn_half_width = 1.0;
  /// Standard deviation of additive Gaussian pose noise; 0 disables it.
  double pose_noise = 0.0;
  /// Mixed into training episode seeds. Evaluation rolls out its explicit
  /// seed list and ignores this.
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t observation_dim() const { return 4 + 3 * lidar_bins; }
};

inline constexpr std::size_t kNumActions = 5;

/// (v_L, v_R) for each discrete action before scaling by wheel_speed.
inline constexpr std::array<std::array<double, 2>, kNumActions> kWheelCommands = {{
    {1.0, 1.0},   // forward
    {1.0, -1.0},  // spin clockwise
    {-1.0, 1.0},  // spin counter-clockwise
    {1.0, 0.0},   // arc right
    {0.0, 1.0},   // arc left
}};

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  ///< radians, wrapped to (-pi, pi]

  Vec2 position() const { return {x, y}; }
  bool operator==(const RobotState&) const = default;
};

struct WorldState {
  RobotState robot;
  std::vector<Vec2> hazards;
  std::vector<Vec2> obstacles;
  Vec2 goal;
  long step_count = 0;
  long goals_reached = 0;
  std::uint64_t episode_seed = 0;
  CounterRng layout_rng;  ///< entity placement, including goal respawns
  CounterRng cost_rng;    ///< violation-cost draws
  CounterRng noise_rng;   ///< pose noise

  bool operator==(const WorldState& o) const {
    return robot == o.robot && hazards == o.hazards && obstacles == o.obstacles && goal == o.goal &&
           step_count == o.step_count && goals_reached == o.goals_reached &&
           episode_seed == o.episode_seed && layout_rng.counter() == o.layout_rng.counter() &&
           cost_rng.counter() == o.cost_rng.counter();
  }
};

struct StepOutcome {
  std::vector<double> obs;
  double g = 0.0;    ///< stage cost
  double c_s = 0.0;  ///< hazard violation cost
  double c_h = 0.0;  ///< obstacle violation cost
  bool done = false;
  bool goal_reached = false;
  bool collision = false;

  double violation_cost() const { return c_s + c_h; }
};

double wrap_angle(double theta);

/// One step of the differential-drive kinematics, without collision handling.
RobotState kinematics(const RobotState& pose, double v_left, double v_right, const EnvConfig& cfg);

/// Robot disc of radius `radius` centered at `p` overlaps the axis-aligned
/// square obstacle centered at `center`.
bool disc_hits_square(Vec2 p, double radius, Vec2 center, double half_width);
bool inside_any_hazard(const WorldState& world, const EnvConfig& cfg);
bool touches_any_obstacle(Vec2 p, const WorldState& world, const EnvConfig& cfg);

struct ResetResult {
  WorldState world;
  std::vector<double> obs;
};

/// Robot at the origin facing +x; entities i.i.d. uniform on the spawn square,
/// rejection-resampled away from the robot's start disc. Throws
/// InfeasibleConfiguration if an entity needs more than 1000 draws.
ResetResult reset(const EnvConfig& cfg, std::uint64_t episode_seed);

/// Advance the world by one action. Throws std::invalid_argument for an
/// action outside 0..4.
StepOutcome step(WorldState& world, std::size_t action, const EnvConfig& cfg);

/// Distance-progress stage cost: (d_after - d_before) + c_g, minus the goal
/// bonus when `goal_reached`. Both distances use `goal`.
double stage_cost(const RobotState& before, const RobotState& after, Vec2 goal, bool goal_reached,
                  const EnvConfig& cfg);

/// 3 x lidar_bins intensities (goal, hazards, obstacles), each
/// max(0, 1 - d_nearest / range) per robot-frame angular bin. Bin 0 is
/// centered on the robot heading; bins advance counter-clockwise.
std::vector<double> lidar(const WorldState& world, const EnvConfig& cfg);

/// [cos theta, sin theta, x, y] followed by the lidar channels.
std::vector<double> observe(const WorldState& world, const EnvConfig& cfg);

/// Per-step record for trace dumps.
struct TraceRow {
  long t = 0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  std::size_t action = 0;
  double g = 0.0;
  double c_s = 0.0;
  double c_h = 0.0;
  bool goal_reached = false;
};

}  // namespace riskavi
