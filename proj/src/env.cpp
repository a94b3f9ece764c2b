#include "smx/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace smx {

namespace {

using nlohmann::json;

int uniform_int(RngStream& rng, int lo, int hi) {
  // inclusive bounds
  const int span = hi - lo + 1;
  int v = lo + static_cast<int>(rng.uniform() * span);
  return std::min(v, hi);
}

StepResult absorb(const EnvState& state) {
  StepResult r;
  r.next = state;
  r.reward = 0.0;
  r.done = true;
  return r;
}

void check_discrete_action(const Action& a, int count, const char* env_id) {
  if (!a.is_discrete() || a.index < 0 || a.index >= count) {
    throw std::invalid_argument(std::string(env_id) + ": action out of range");
  }
}

}  // namespace

StepResult Env::step_dynamics(const EnvState& state, const Action& action) const {
  if (state.done) return absorb(state);
  StepResult r = transition(state, action);
  r.next.done = r.done;
  return r;
}

StepResult Env::step(const EnvState& state, const Action& action) const {
  if (state.done) return absorb(state);
  StepResult r = transition(state, action);
  r.next.t = state.t + 1;
  r.next.done = r.done;
  r.next.truncated = false;
  if (!r.done && horizon_limit() > 0 && r.next.t >= horizon_limit()) {
    r.done = true;
    r.next.done = true;
    r.next.truncated = true;
  }
  return r;
}

EnvState Env::parse_state(const std::string&) const {
  throw std::invalid_argument(id() + ": no state literal parser");
}

std::string Env::describe(const EnvState& state) const {
  std::ostringstream os;
  os << id() << " state t=" << state.t << (state.done ? " done" : "");
  return os.str();
}

// ---------------------------------------------------------------------------
// chain: L states in a line, actions left/right, +1 at the right end,
// -0.01 per step, terminal at either end.
// ---------------------------------------------------------------------------

class ChainEnv : public Env {
 public:
  explicit ChainEnv(const EnvSpec& spec)
      : length_(spec.length),
        horizon_(spec.horizon_limit > 0 ? spec.horizon_limit : 4 * spec.length) {
    if (length_ < 3) throw std::invalid_argument("chain: length must be >= 3");
  }

  std::string id() const override { return "chain"; }
  ActionSpace action_space() const override { return {ActionSpace::Kind::Discrete, 2, 0}; }
  int observation_dim() const override { return length_; }
  int horizon_limit() const override { return horizon_; }

  EnvState reset(RngStream& rng) const override {
    EnvState s;
    s.idata = {uniform_int(rng, 1, length_ - 2)};
    return s;
  }

  std::vector<double> observe(const EnvState& s) const override {
    std::vector<double> obs(length_, 0.0);
    obs[static_cast<std::size_t>(s.idata[0])] = 1.0;
    return obs;
  }

  bool solved(const EnvState& s) const override { return s.idata[0] == length_ - 1; }
  bool enumerable() const override { return true; }

  std::vector<EnvState> enumeration_roots() const override {
    std::vector<EnvState> roots;
    for (int pos = 1; pos < length_ - 1; ++pos) {
      EnvState s;
      s.idata = {pos};
      roots.push_back(s);
    }
    return roots;
  }

  EnvState parse_state(const std::string& literal) const override {
    const json j = json::parse(literal);
    const int pos = j.at("pos").get<int>();
    if (pos < 0 || pos >= length_) throw std::invalid_argument("chain: pos out of range");
    EnvState s;
    s.idata = {pos};
    s.done = (pos == 0 || pos == length_ - 1);
    return s;
  }

  std::string describe(const EnvState& s) const override {
    std::ostringstream os;
    os << "chain pos=" << s.idata[0] << "/" << (length_ - 1);
    return os.str();
  }

 protected:
  StepResult transition(const EnvState& state, const Action& action) const override {
    check_discrete_action(action, 2, "chain");
    StepResult r;
    r.next = state;
    int& pos = r.next.idata[0];
    pos += (action.index == 0) ? -1 : 1;
    r.reward = -0.01 + (pos == length_ - 1 ? 1.0 : 0.0);
    r.done = (pos == 0 || pos == length_ - 1);
    return r;
  }

 private:
  int length_;
  int horizon_;
};

// ---------------------------------------------------------------------------
// gridpush: G x G grid, the agent pushes boxes onto targets. Instances are
// generated backwards from a solved position (agent pulls), so every emitted
// instance is solvable.
// ---------------------------------------------------------------------------

class GridPushEnv : public Env {
 public:
  explicit GridPushEnv(const EnvSpec& spec)
      : size_(spec.size),
        boxes_(spec.boxes),
        shuffle_min_(spec.shuffle_min),
        shuffle_max_(spec.shuffle_max),
        bonus_(spec.completion_bonus),
        horizon_(spec.horizon_limit > 0 ? spec.horizon_limit : 12 * spec.size) {
    if (size_ < 3) throw std::invalid_argument("gridpush: size must be >= 3");
    if (boxes_ < 1 || boxes_ > 2) throw std::invalid_argument("gridpush: boxes must be 1 or 2");
    if (shuffle_min_ < 1 || shuffle_max_ < shuffle_min_)
      throw std::invalid_argument("gridpush: bad shuffle range");
  }

  std::string id() const override { return "gridpush"; }
  ActionSpace action_space() const override { return {ActionSpace::Kind::Discrete, 4, 0}; }
  int observation_dim() const override { return 3 * size_ * size_; }
  int horizon_limit() const override { return horizon_; }

  EnvState reset(RngStream& rng) const override {
    for (int attempt = 0; attempt < 256; ++attempt) {
      EnvState s = generate(rng);
      if (!all_on_target(s)) return s;
    }
    throw std::runtime_error("gridpush: failed to generate an unsolved instance");
  }

  std::vector<double> observe(const EnvState& s) const override {
    const int cells = size_ * size_;
    std::vector<double> obs(3 * cells, 0.0);
    obs[static_cast<std::size_t>(s.idata[0])] = 1.0;  // agent plane
    for (int b = 0; b < boxes_; ++b) obs[static_cast<std::size_t>(cells + box(s, b))] = 1.0;
    for (int b = 0; b < boxes_; ++b) obs[static_cast<std::size_t>(2 * cells + target(s, b))] = 1.0;
    return obs;
  }

  bool solved(const EnvState& s) const override { return all_on_target(s); }
  bool enumerable() const override { return true; }

  EnvState parse_state(const std::string& literal) const override {
    const json j = json::parse(literal);
    EnvState s;
    s.idata.assign(static_cast<std::size_t>(1 + 2 * boxes_), 0);
    s.idata[0] = cell_from_json(j.at("agent"));
    const auto& jb = j.at("boxes");
    const auto& jt = j.at("targets");
    if (static_cast<int>(jb.size()) != boxes_ || static_cast<int>(jt.size()) != boxes_)
      throw std::invalid_argument("gridpush: wrong box/target count");
    for (int b = 0; b < boxes_; ++b) {
      s.idata[static_cast<std::size_t>(1 + b)] = cell_from_json(jb.at(static_cast<std::size_t>(b)));
      s.idata[static_cast<std::size_t>(1 + boxes_ + b)] =
          cell_from_json(jt.at(static_cast<std::size_t>(b)));
    }
    for (int b = 0; b < boxes_; ++b) {
      if (box(s, b) == s.idata[0]) throw std::invalid_argument("gridpush: agent on box");
      for (int c = b + 1; c < boxes_; ++c) {
        if (box(s, b) == box(s, c)) throw std::invalid_argument("gridpush: overlapping boxes");
        if (target(s, b) == target(s, c))
          throw std::invalid_argument("gridpush: overlapping targets");
      }
    }
    s.done = all_on_target(s);
    return s;
  }

  std::string describe(const EnvState& s) const override {
    std::ostringstream os;
    for (int r = 0; r < size_; ++r) {
      for (int c = 0; c < size_; ++c) {
        const int cell = r * size_ + c;
        char ch = '.';
        for (int b = 0; b < boxes_; ++b) {
          if (target(s, b) == cell) ch = 'x';
        }
        for (int b = 0; b < boxes_; ++b) {
          if (box(s, b) == cell) ch = (ch == 'x') ? 'B' : 'b';
        }
        if (s.idata[0] == cell) ch = '@';
        os << ch;
      }
      os << '\n';
    }
    return os.str();
  }

 protected:
  StepResult transition(const EnvState& state, const Action& action) const override {
    check_discrete_action(action, 4, "gridpush");
    StepResult r;
    r.next = state;
    r.reward = -0.01;  // step cost

    const int agent = state.idata[0];
    const int dest = neighbour(agent, action.index);
    if (dest < 0) {
      r.done = false;
      return r;
    }
    const int pushed = box_at(state, dest);
    if (pushed >= 0) {
      const int dest2 = neighbour(dest, action.index);
      if (dest2 < 0 || box_at(state, dest2) >= 0) {
        r.done = false;  // blocked push
        return r;
      }
      const bool was_on = is_target(state, dest);
      const bool now_on = is_target(state, dest2);
      r.next.idata[static_cast<std::size_t>(1 + pushed)] = dest2;
      if (was_on && !now_on) r.reward += -0.1;
      if (!was_on && now_on) r.reward += 1.0;
    }
    r.next.idata[0] = dest;
    if (all_on_target(r.next)) {
      r.reward += bonus_;
      r.done = true;
    }
    return r;
  }

 private:
  int box(const EnvState& s, int b) const { return s.idata[static_cast<std::size_t>(1 + b)]; }
  int target(const EnvState& s, int b) const {
    return s.idata[static_cast<std::size_t>(1 + boxes_ + b)];
  }

  int box_at(const EnvState& s, int cell) const {
    for (int b = 0; b < boxes_; ++b) {
      if (box(s, b) == cell) return b;
    }
    return -1;
  }

  bool is_target(const EnvState& s, int cell) const {
    for (int b = 0; b < boxes_; ++b) {
      if (target(s, b) == cell) return true;
    }
    return false;
  }

  bool all_on_target(const EnvState& s) const {
    for (int b = 0; b < boxes_; ++b) {
      if (!is_target(s, box(s, b))) return false;
    }
    return true;
  }

  // Neighbour cell in direction d (0 up, 1 down, 2 left, 3 right), -1 when
  // off the grid.
  int neighbour(int cell, int d) const {
    const int r = cell / size_;
    const int c = cell % size_;
    static constexpr int dr[4] = {-1, 1, 0, 0};
    static constexpr int dc[4] = {0, 0, -1, 1};
    const int nr = r + dr[d];
    const int nc = c + dc[d];
    if (nr < 0 || nr >= size_ || nc < 0 || nc >= size_) return -1;
    return nr * size_ + nc;
  }

  int cell_from_json(const json& j) const {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("gridpush: bad cell literal");
    const int r = j.at(0).get<int>();
    const int c = j.at(1).get<int>();
    if (r < 0 || r >= size_ || c < 0 || c >= size_)
      throw std::invalid_argument("gridpush: cell out of range");
    return r * size_ + c;
  }

  // Backwards generation: boxes start on targets, the agent walks and pulls.
  EnvState generate(RngStream& rng) const {
    const int cells = size_ * size_;
    EnvState s;
    s.idata.assign(static_cast<std::size_t>(1 + 2 * boxes_), 0);

    std::vector<int> picks;
    while (static_cast<int>(picks.size()) < boxes_) {
      const int cell = uniform_int(rng, 0, cells - 1);
      if (std::find(picks.begin(), picks.end(), cell) == picks.end()) picks.push_back(cell);
    }
    for (int b = 0; b < boxes_; ++b) {
      s.idata[static_cast<std::size_t>(1 + b)] = picks[static_cast<std::size_t>(b)];
      s.idata[static_cast<std::size_t>(1 + boxes_ + b)] = picks[static_cast<std::size_t>(b)];
    }
    int agent = -1;
    while (agent < 0 || box_at(s, agent) >= 0) agent = uniform_int(rng, 0, cells - 1);
    s.idata[0] = agent;

    const int pulls = uniform_int(rng, shuffle_min_, shuffle_max_);
    for (int k = 0; k < pulls; ++k) {
      struct Move {
        int dir;
        bool pull;
      };
      std::vector<Move> moves;
      for (int d = 0; d < 4; ++d) {
        const int dest = neighbour(s.idata[0], d);
        if (dest < 0 || box_at(s, dest) >= 0) continue;
        const int behind = neighbour(s.idata[0], d ^ 1);  // opposite direction
        const int b = behind >= 0 ? box_at(s, behind) : -1;
        moves.push_back({d, b >= 0});
      }
      if (moves.empty()) break;
      const Move m = moves[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(moves.size()) - 1))];
      const int dest = neighbour(s.idata[0], m.dir);
      if (m.pull) {
        const int behind = neighbour(s.idata[0], m.dir ^ 1);
        const int b = box_at(s, behind);
        s.idata[static_cast<std::size_t>(1 + b)] = s.idata[0];
      }
      s.idata[0] = dest;
    }
    return s;
  }

  int size_;
  int boxes_;
  int shuffle_min_;
  int shuffle_max_;
  double bonus_;
  int horizon_;
};

// ---------------------------------------------------------------------------
// permpuzzle: a permutation of n elements scrambled a few adjacent
// transpositions away from identity; actions are the transpositions, reward
// 1 on reaching identity.
// ---------------------------------------------------------------------------

class PermPuzzleEnv : public Env {
 public:
  explicit PermPuzzleEnv(const EnvSpec& spec)
      : n_(spec.elements),
        scramble_min_(spec.scramble_min),
        scramble_max_(spec.scramble_max),
        horizon_(spec.horizon_limit > 0 ? spec.horizon_limit
                                        : std::max(8, 4 * spec.scramble_max)) {
    if (n_ < 2) throw std::invalid_argument("permpuzzle: elements must be >= 2");
    if (scramble_min_ < 1 || scramble_max_ < scramble_min_)
      throw std::invalid_argument("permpuzzle: bad scramble range");
  }

  std::string id() const override { return "permpuzzle"; }
  ActionSpace action_space() const override { return {ActionSpace::Kind::Discrete, n_ - 1, 0}; }
  int observation_dim() const override { return n_ * n_; }
  int horizon_limit() const override { return horizon_; }

  EnvState reset(RngStream& rng) const override {
    for (;;) {
      EnvState s = scramble(rng, uniform_int(rng, scramble_min_, scramble_max_));
      if (!is_identity(s)) return s;
    }
  }

  std::vector<double> observe(const EnvState& s) const override {
    std::vector<double> obs(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      obs[static_cast<std::size_t>(i * n_ + s.idata[static_cast<std::size_t>(i)])] = 1.0;
    }
    return obs;
  }

  bool solved(const EnvState& s) const override { return is_identity(s); }
  bool enumerable() const override { return true; }

  std::vector<EnvState> enumeration_roots() const override {
    std::vector<EnvState> roots;
    for (int k = 0; k < n_ - 1; ++k) {
      EnvState s = identity();
      std::swap(s.idata[static_cast<std::size_t>(k)], s.idata[static_cast<std::size_t>(k + 1)]);
      roots.push_back(s);
    }
    return roots;
  }

  EnvState parse_state(const std::string& literal) const override {
    const json j = json::parse(literal);
    const auto perm = j.at("perm").get<std::vector<int>>();
    if (static_cast<int>(perm.size()) != n_)
      throw std::invalid_argument("permpuzzle: wrong permutation size");
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    for (int v : perm) {
      if (v < 0 || v >= n_ || seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("permpuzzle: not a permutation");
      seen[static_cast<std::size_t>(v)] = true;
    }
    EnvState s;
    s.idata = perm;
    s.done = is_identity(s);
    return s;
  }

  std::string describe(const EnvState& s) const override {
    std::ostringstream os;
    os << "perm [";
    for (int i = 0; i < n_; ++i) os << (i ? " " : "") << s.idata[static_cast<std::size_t>(i)];
    os << "]";
    return os.str();
  }

 protected:
  StepResult transition(const EnvState& state, const Action& action) const override {
    check_discrete_action(action, n_ - 1, "permpuzzle");
    StepResult r;
    r.next = state;
    std::swap(r.next.idata[static_cast<std::size_t>(action.index)],
              r.next.idata[static_cast<std::size_t>(action.index + 1)]);
    r.done = is_identity(r.next);
    r.reward = r.done ? 1.0 : 0.0;
    return r;
  }

 private:
  EnvState identity() const {
    EnvState s;
    s.idata.resize(static_cast<std::size_t>(n_));
    std::iota(s.idata.begin(), s.idata.end(), 0);
    return s;
  }

  bool is_identity(const EnvState& s) const {
    for (int i = 0; i < n_; ++i) {
      if (s.idata[static_cast<std::size_t>(i)] != i) return false;
    }
    return true;
  }

  EnvState scramble(RngStream& rng, int moves) const {
    EnvState s = identity();
    int prev = -1;
    for (int k = 0; k < moves; ++k) {
      int g = uniform_int(rng, 0, n_ - 2);
      // Avoid immediately undoing the previous move (generators are
      // involutions) so the scramble distance stays meaningful.
      while (n_ > 2 && g == prev) g = uniform_int(rng, 0, n_ - 2);
      std::swap(s.idata[static_cast<std::size_t>(g)], s.idata[static_cast<std::size_t>(g + 1)]);
      prev = g;
    }
    return s;
  }

  int n_;
  int scramble_min_;
  int scramble_max_;
  int horizon_;
};

// ---------------------------------------------------------------------------
// pointmass: 2-D double integrator with continuous acceleration in [-1,1]^2,
// reward is the negative distance to a goal, fixed episode length.
// ---------------------------------------------------------------------------

class PointMassEnv : public Env {
 public:
  explicit PointMassEnv(const EnvSpec& spec)
      : dt_(spec.dt), horizon_(spec.horizon_limit > 0 ? spec.horizon_limit : 32) {
    if (!(dt_ > 0.0)) throw std::invalid_argument("pointmass: dt must be > 0");
  }

  std::string id() const override { return "pointmass"; }
  ActionSpace action_space() const override { return {ActionSpace::Kind::Continuous, 0, 2}; }
  int observation_dim() const override { return 6; }
  int horizon_limit() const override { return horizon_; }

  EnvState reset(RngStream& rng) const override {
    EnvState s;
    s.rdata = {rng.uniform() * 2.0 - 1.0, rng.uniform() * 2.0 - 1.0, 0.0, 0.0,
               rng.uniform() * 2.0 - 1.0, rng.uniform() * 2.0 - 1.0};
    return s;
  }

  std::vector<double> observe(const EnvState& s) const override { return s.rdata; }

  bool solved(const EnvState& s) const override { return distance(s) < 0.25; }

  EnvState parse_state(const std::string& literal) const override {
    const json j = json::parse(literal);
    const auto pos = j.at("pos").get<std::vector<double>>();
    const auto vel = j.at("vel").get<std::vector<double>>();
    const auto goal = j.at("goal").get<std::vector<double>>();
    if (pos.size() != 2 || vel.size() != 2 || goal.size() != 2)
      throw std::invalid_argument("pointmass: bad state literal");
    EnvState s;
    s.rdata = {pos[0], pos[1], vel[0], vel[1], goal[0], goal[1]};
    return s;
  }

  std::string describe(const EnvState& s) const override {
    std::ostringstream os;
    os << "pointmass pos=(" << s.rdata[0] << "," << s.rdata[1] << ") vel=(" << s.rdata[2] << ","
       << s.rdata[3] << ") goal=(" << s.rdata[4] << "," << s.rdata[5] << ")";
    return os.str();
  }

 protected:
  StepResult transition(const EnvState& state, const Action& action) const override {
    if (action.box.size() != 2) throw std::invalid_argument("pointmass: action must be 2-d");
    StepResult r;
    r.next = state;
    auto& d = r.next.rdata;
    for (int k = 0; k < 2; ++k) {
      const double a = std::clamp(action.box[static_cast<std::size_t>(k)], -1.0, 1.0);
      // Velocity-Verlet update; time-reversible when no clipping engages.
      d[static_cast<std::size_t>(k)] +=
          d[static_cast<std::size_t>(2 + k)] * dt_ + 0.5 * a * dt_ * dt_;
      d[static_cast<std::size_t>(2 + k)] += a * dt_;
    }
    r.reward = -distance(r.next);
    r.done = false;  // fixed-length episodes end by truncation only
    return r;
  }

 private:
  static double distance(const EnvState& s) {
    const double dx = s.rdata[0] - s.rdata[4];
    const double dy = s.rdata[1] - s.rdata[5];
    return std::sqrt(dx * dx + dy * dy);
  }

  double dt_;
  int horizon_;
};

std::unique_ptr<Env> make_env(const EnvSpec& spec) {
  if (spec.id == "chain") return std::make_unique<ChainEnv>(spec);
  if (spec.id == "gridpush") return std::make_unique<GridPushEnv>(spec);
  if (spec.id == "permpuzzle") return std::make_unique<PermPuzzleEnv>(spec);
  if (spec.id == "pointmass") return std::make_unique<PointMassEnv>(spec);
  throw std::invalid_argument("make_env: unknown environment id '" + spec.id + "'");
}

}  // namespace smx
