#include "artnav/follower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace artnav {

void FollowerParams::validate() const {
  if (!(lookahead > 0.0) || !(angular_weight >= 0.0) || !(kp_lin > 0.0) || !(kp_ang > 0.0) ||
      !(goal_tolerance > 0.0) || !(goal_yaw_tolerance > 0.0) || !(v_max > 0.0) || !(omega_max > 0.0) ||
      !(latency >= 0.0)) {
    throw std::invalid_argument("follower: lookahead, gains, limits and tolerances must be positive");
  }
}

int FollowerParams::latency_steps(double dt) const {
  if (latency <= 0.0) return 0;
  return static_cast<int>(std::ceil(latency / dt - 1e-9));
}

// ---------------------------------------------------------------------------

PathTrack::PathTrack(std::vector<Pose> poses, double angular_weight) : poses_(std::move(poses)), w_(angular_weight) {
  if (poses_.empty()) throw std::invalid_argument("path track: empty path");
  s_.push_back(0.0);
  for (std::size_t i = 1; i < poses_.size(); ++i) {
    const double d = planar_distance(poses_[i - 1].xy(), poses_[i].xy());
    const double a = wrap_angle(poses_[i].yaw - poses_[i - 1].yaw);
    s_.push_back(s_.back() + std::hypot(d, w_ * a));
  }
}

Pose PathTrack::at(double s) const {
  if (s <= 0.0 || poses_.size() == 1) return poses_.front();
  if (s >= s_.back()) return poses_.back();
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - s_.begin()) - 1;
  const double len = s_[i + 1] - s_[i];
  const double t = len > 0.0 ? (s - s_[i]) / len : 0.0;
  const Pose& a = poses_[i];
  const Pose& b = poses_[i + 1];
  Pose p;
  p.x = a.x + t * (b.x - a.x);
  p.y = a.y + t * (b.y - a.y);
  p.z = a.z + t * (b.z - a.z);
  p.yaw = wrap_angle(a.yaw + t * wrap_angle(b.yaw - a.yaw));
  p.roll = a.roll + t * (b.roll - a.roll);
  p.pitch = a.pitch + t * (b.pitch - a.pitch);
  return p;
}

double PathTrack::project(const RobotState& state, double s_min) const {
  s_min = std::clamp(s_min, 0.0, s_.back());
  const auto combined_sq = [&](const Pose& p) {
    const double e = wrap_angle(p.yaw - state.yaw);
    return (p.x - state.x) * (p.x - state.x) + (p.y - state.y) * (p.y - state.y) + w_ * w_ * e * e;
  };

  double best_s = s_min;
  double best = combined_sq(at(s_min));
  for (std::size_t i = 0; i + 1 < poses_.size(); ++i) {
    if (s_[i + 1] <= s_min) continue;
    const double len = s_[i + 1] - s_[i];
    if (len <= 0.0) continue;
    const Pose& a = poses_[i];
    const Pose& b = poses_[i + 1];
    const double ax = a.x - state.x, ay = a.y - state.y;
    const double bx = b.x - a.x, by = b.y - a.y;
    const double e0 = wrap_angle(a.yaw - state.yaw);
    const double da = wrap_angle(b.yaw - a.yaw);
    const double denom = bx * bx + by * by + w_ * w_ * da * da;
    const double t_lo = std::max(0.0, (s_min - s_[i]) / len);
    // The heading error wraps at most once per segment; each unwrapped branch is quadratic in t.
    for (const double e : {e0 - 2.0 * std::numbers::pi, e0, e0 + 2.0 * std::numbers::pi}) {
      double t = denom > 0.0 ? -(ax * bx + ay * by + w_ * w_ * e * da) / denom : t_lo;
      t = std::clamp(t, t_lo, 1.0);
      const double s = s_[i] + t * len;
      const double f = combined_sq(at(s));
      if (f < best) {
        best = f;
        best_s = s;
      }
    }
    const double s_end = s_[i + 1];
    if (const double f = combined_sq(at(s_end)); f < best) {
      best = f;
      best_s = s_end;
    }
  }
  return best_s;
}

double PathTrack::distance_xy(Vec2 p) const {
  double best = planar_distance(p, poses_.front().xy());
  for (std::size_t i = 0; i + 1 < poses_.size(); ++i) {
    const Vec2 a = poses_[i].xy();
    const Vec2 b = poses_[i + 1].xy();
    const double bx = b.x - a.x, by = b.y - a.y;
    const double len2 = bx * bx + by * by;
    double t = len2 > 0.0 ? ((p.x - a.x) * bx + (p.y - a.y) * by) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::hypot(a.x + t * bx - p.x, a.y + t * by - p.y));
  }
  return best;
}

// ---------------------------------------------------------------------------

Carrot carrot(const PathTrack& track, const RobotState& state, const FollowerParams& p, double s_min) {
  Carrot c;
  c.s_projection = track.project(state, s_min);
  c.s = std::min(track.total_length(), c.s_projection + p.lookahead);
  c.pose = track.at(c.s);
  return c;
}

RobotState compute_command(const PathTrack& track, const RobotState& state, const FollowerParams& p, double s_min,
                           double* s_projection) {
  const Carrot target = carrot(track, state, p, s_min);
  if (s_projection) *s_projection = target.s_projection;
  RobotState out = state;
  const double c = std::cos(state.yaw), s = std::sin(state.yaw);
  const double wx = target.pose.x - state.x;
  const double wy = target.pose.y - state.y;
  const double ex = c * wx + s * wy;
  const double ey = -s * wx + c * wy;
  const double eyaw = wrap_angle(target.pose.yaw - state.yaw);

  const bool at_end = target.s >= track.total_length();
  if (at_end && std::hypot(ex, ey) <= p.goal_tolerance && std::abs(eyaw) <= p.goal_yaw_tolerance) {
    out.vx = out.vy = out.omega = 0.0;
    return out;
  }
  double vx = std::clamp(p.kp_lin * ex, -p.v_max, p.v_max);
  double vy = std::clamp(p.kp_lin * ey, -p.v_max, p.v_max);
  const double norm = std::hypot(vx, vy);
  if (norm > p.v_max) {
    vx *= p.v_max / norm;
    vy *= p.v_max / norm;
  }
  out.vx = vx;
  out.vy = vy;
  out.omega = std::clamp(p.kp_ang * eyaw, -p.omega_max, p.omega_max);
  return out;
}

RobotState integrate(const RobotState& state, double dt) {
  RobotState out = state;
  const double c = std::cos(state.yaw), s = std::sin(state.yaw);
  out.x += (c * state.vx - s * state.vy) * dt;
  out.y += (s * state.vx + c * state.vy) * dt;
  out.yaw = wrap_angle(state.yaw + state.omega * dt);
  return out;
}

RobotState follow_step(const NavPath& path, const RobotState& state, const FollowerParams& p, double dt) {
  const PathTrack track(path.poses, p.angular_weight);
  return integrate(compute_command(track, state, p), dt);
}

// ---------------------------------------------------------------------------

PathFollower::PathFollower(FollowerParams params, double dt)
    : params_(params), dt_(dt), delay_(params.latency_steps(dt)) {
  params_.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("follower: dt must be positive");
}

void PathFollower::publish(const std::vector<Pose>& poses) {
  if (poses.empty()) return;
  if (!history_.empty() && history_.back().step == step_) history_.pop_back();
  history_.push_back({step_, PathTrack(poses, params_.angular_weight)});
}

const PathTrack* PathFollower::active() const {
  const PathTrack* found = nullptr;
  for (const auto& h : history_) {
    if (h.step <= step_ - delay_) found = &h.track;
  }
  return found;
}

const PathTrack* PathFollower::latest() const { return history_.empty() ? nullptr : &history_.back().track; }

RobotState PathFollower::step(const RobotState& state) {
  while (history_.size() > 1 && history_[1].step <= step_ - delay_) history_.pop_front();
  RobotState out = state;
  out.vx = out.vy = out.omega = 0.0;
  if (!history_.empty() && history_.front().step <= step_ - delay_) {
    if (history_.front().step != active_step_) {
      active_step_ = history_.front().step;
      progress_ = 0.0;
    }
    out = compute_command(history_.front().track, state, params_, progress_, &progress_);
  }
  ++step_;
  return out;
}

std::optional<double> PathFollower::deviation(const RobotState& state) const {
  if (history_.empty()) return std::nullopt;
  return history_.back().track.distance_xy(state.xy());
}

bool PathFollower::goal_reached(const RobotState& state) const {
  const PathTrack* t = latest();
  if (!t) return false;
  const Pose& g = t->poses().back();
  return planar_distance(state.xy(), g.xy()) <= params_.goal_tolerance &&
         std::abs(wrap_angle(g.yaw - state.yaw)) <= params_.goal_yaw_tolerance;
}

}  // namespace artnav
