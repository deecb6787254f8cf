#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "artnav/planner.hpp"
#include "artnav/reachability.hpp"

namespace artnav {

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double vx = 0.0;  // body frame [m/s]
  double vy = 0.0;
  double omega = 0.0;  // [rad/s]

  Vec2 xy() const { return {x, y}; }
};

struct FollowerParams {
  double lookahead = 0.6;     // L [m]
  double angular_weight = 0.5;  // w_ang [m/rad]
  double kp_lin = 1.5;        // [1/s]
  double kp_ang = 2.0;        // [1/s]
  double goal_tolerance = 0.1;      // [m]
  double goal_yaw_tolerance = 0.15;  // [rad]
  double v_max = 0.9;         // [m/s]
  double omega_max = 1.0;     // [rad/s]
  double latency = 0.0;       // [s]

  void validate() const;
  /// Whole control steps of command delay for a given step length.
  int latency_steps(double dt) const;
};

/// Path parameterized by combined arc length, where a step of planar length d
/// and heading change a counts sqrt(d^2 + (w_ang * a)^2).
class PathTrack {
 public:
  PathTrack(std::vector<Pose> poses, double angular_weight);

  double total_length() const { return s_.back(); }
  /// Interpolated pose; yaw follows the shortest turn between vertices.
  Pose at(double s) const;
  /// Arc length of the point minimizing combined distance to the state,
  /// searched over [s_min, end].
  double project(const RobotState& state, double s_min) const;
  /// Planar distance from a point to the polyline.
  double distance_xy(Vec2 p) const;
  const std::vector<Pose>& poses() const { return poses_; }

 private:
  std::vector<Pose> poses_;
  std::vector<double> s_;
  double w_;
};

struct Carrot {
  Pose pose;
  double s = 0.0;           // carrot arc length
  double s_projection = 0.0;
};

/// Carrot a combined arc length L ahead of the projection (at or after s_min),
/// or the final pose when less than L remains.
Carrot carrot(const PathTrack& track, const RobotState& state, const FollowerParams& p, double s_min = 0.0);

/// Body-frame P-control toward the carrot with exact clamping. Zero command
/// once the carrot is the final pose and the robot is within tolerance of it.
RobotState compute_command(const PathTrack& track, const RobotState& state, const FollowerParams& p,
                           double s_min = 0.0, double* s_projection = nullptr);

/// Holonomic integration of the state's commands over dt.
RobotState integrate(const RobotState& state, double dt);

/// Single stateless control step: command then integrate.
RobotState follow_step(const NavPath& path, const RobotState& state, const FollowerParams& p, double dt);

/// Stateful follower: keeps the published path history so commands can lag
/// publications by the configured latency, and keeps projection progress
/// monotone on the active path.
class PathFollower {
 public:
  PathFollower(FollowerParams params, double dt);

  /// Publishes a new path at the current step.
  void publish(const std::vector<Pose>& poses);
  /// Computes the command for the current step and advances one step.
  RobotState step(const RobotState& state);

  /// Path commands are currently computed from, if any.
  const PathTrack* active() const;
  /// Most recently published path, if any.
  const PathTrack* latest() const;
  /// Planar distance from the robot to the latest published path.
  std::optional<double> deviation(const RobotState& state) const;
  bool goal_reached(const RobotState& state) const;
  long step_index() const { return step_; }
  double progress() const { return progress_; }

 private:
  struct Published {
    long step;
    PathTrack track;
  };

  FollowerParams params_;
  double dt_;
  int delay_;
  long step_ = 0;
  std::deque<Published> history_;
  long active_step_ = -1;
  double progress_ = 0.0;
};

}  // namespace artnav
