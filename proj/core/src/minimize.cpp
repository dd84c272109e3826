#include "growthlab/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "growthlab/parallel.hpp"

namespace growthlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double acceptance_threshold(double best, double tolerance) {
  return best + tolerance * (1.0 + std::abs(best));
}

struct GridHit {
  double value;
  std::size_t index;
};

bool hit_less(const GridHit& a, const GridHit& b) {
  return a.value < b.value || (a.value == b.value && a.index < b.index);
}

// Per-block scan state. Near-optimal hits are filtered against the block's own best;
// the acceptance threshold is monotone in the best value, so the global filter applied
// after merging never needs a hit the block dropped.
struct ScanBlock {
  double best = kInf;
  std::vector<GridHit> near;
  std::vector<GridHit> top;  // max-heap under hit_less, size <= multistart_count
  std::size_t evaluations = 0;
  std::size_t last_prune_size = 0;

  void prune(double tolerance) {
    const double limit = acceptance_threshold(best, tolerance);
    std::erase_if(near, [limit](const GridHit& h) { return h.value > limit; });
    last_prune_size = near.size();
  }
};

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value < b.value;
  return lexicographically_less(a.point, b.point);
}

struct PolishOutcome {
  Candidate best;
  std::size_t evaluations;
};

PolishOutcome polish(const FunctionOracle& f, const BallRegion& region, const SolverConfig& cfg,
                     Candidate start, double initial_step) {
  Eigen::VectorXd x = start.point.coords();
  double fx = start.value;
  double step = initial_step;
  std::size_t evaluations = 0;
  const Eigen::Index dim = x.size();

  for (int iter = 0; iter < cfg.polish_max_iters && step >= cfg.polish_step_tolerance; ++iter) {
    bool improved = false;
    for (Eigen::Index i = 0; i < dim && !improved; ++i) {
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd trial = x;
        trial[i] += sign * step;
        Point projected = region.project(trial);
        if (projected.coords() == x) continue;
        const ExtendedReal value = f(projected);
        ++evaluations;
        if (value.value() < fx) {
          x = projected.coords();
          fx = value.value();
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {Candidate{Point(x), fx}, evaluations};
}

}  // namespace

void SolverConfig::validate() const {
  if (grid_points_per_axis < 3) usage_error("grid_points_per_axis must be >= 3");
  if (multistart_count < 0) usage_error("multistart_count must be >= 0");
  if (polish_max_iters < 0) usage_error("polish_max_iters must be >= 0");
  if (!(polish_step_tolerance > 0.0) || !std::isfinite(polish_step_tolerance)) {
    usage_error("polish_step_tolerance must be positive and finite");
  }
  if (!(minimizer_value_tolerance > 0.0) || !std::isfinite(minimizer_value_tolerance)) {
    usage_error("minimizer_value_tolerance must be positive and finite");
  }
}

SolverConfig SolverConfig::defaults_for_dimension(Eigen::Index dim) {
  SolverConfig cfg;
  switch (dim) {
    case 1: cfg.grid_points_per_axis = 2001; break;
    case 2: cfg.grid_points_per_axis = 201; break;
    case 3: cfg.grid_points_per_axis = 41; break;
    default: cfg.grid_points_per_axis = 21; break;
  }
  return cfg;
}

bool operator==(const TiltedSolveResult& a, const TiltedSolveResult& b) {
  if (a.min_value != b.min_value || a.evaluations != b.evaluations) return false;
  if (a.minimizers.size() != b.minimizers.size()) return false;
  for (std::size_t i = 0; i < a.minimizers.size(); ++i) {
    if (a.minimizers[i].value != b.minimizers[i].value) return false;
    if (!(a.minimizers[i].point == b.minimizers[i].point)) return false;
  }
  return true;
}

BallGrid::BallGrid(const BallRegion& region, int points_per_axis)
    : region_(region), per_axis_(points_per_axis) {
  if (points_per_axis < 3) usage_error("grid needs at least 3 points per axis");
  const Eigen::Index dim = region.dim();
  if (dim > kMaxGridDimension) {
    usage_error("grid scan supports dimension <= 4, got " + std::to_string(dim));
  }
  const double total = std::pow(static_cast<double>(points_per_axis), static_cast<double>(dim));
  if (total > 2e9) usage_error("grid too large: reduce grid_points_per_axis");
  total_ = static_cast<std::size_t>(total);
  spacing_ = 2.0 * region.radius() / (points_per_axis - 1);
}

bool BallGrid::point(std::size_t index, Eigen::VectorXd& out) const {
  const Eigen::Index dim = region_.dim();
  out.resize(dim);
  const Eigen::VectorXd& c = region_.center().coords();
  const double r = region_.radius();
  const int last = per_axis_ - 1;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int k = static_cast<int>(index % static_cast<std::size_t>(per_axis_));
    index /= static_cast<std::size_t>(per_axis_);
    // Symmetric placement so the center and both faces are lattice points exactly.
    out[i] = c[i] + r * (2.0 * k - last) / last;
  }
  return (out - c).norm() <= r + BallRegion::kMembershipSlack;
}

TiltedSolveResult argmin_ball(const FunctionOracle& f, const BallRegion& region, const SolverConfig& cfg) {
  cfg.validate();
  if (f.dim() != region.dim()) usage_error("oracle and region dimensions differ");
  const BallGrid grid(region, cfg.grid_points_per_axis);
  const std::size_t keep_top = static_cast<std::size_t>(cfg.multistart_count);

  const std::size_t blocks = std::min<std::size_t>(grid.size(), std::max<std::size_t>(1, worker_count()) * 4);
  std::vector<ScanBlock> scans(blocks);
  const std::size_t block_len = (grid.size() + blocks - 1) / blocks;

  parallel_for(blocks, [&](std::size_t b) {
    ScanBlock& scan = scans[b];
    Eigen::VectorXd y;
    const std::size_t begin = b * block_len;
    const std::size_t end = std::min(grid.size(), begin + block_len);
    for (std::size_t idx = begin; idx < end; ++idx) {
      if (!grid.point(idx, y)) continue;
      const double value = f(Point(y)).value();
      ++scan.evaluations;
      if (value == kInf) continue;
      const GridHit hit{value, idx};
      if (keep_top > 0) {
        if (scan.top.size() < keep_top) {
          scan.top.push_back(hit);
          std::push_heap(scan.top.begin(), scan.top.end(), hit_less);
        } else if (hit_less(hit, scan.top.front())) {
          std::pop_heap(scan.top.begin(), scan.top.end(), hit_less);
          scan.top.back() = hit;
          std::push_heap(scan.top.begin(), scan.top.end(), hit_less);
        }
      }
      if (value < scan.best) scan.best = value;
      if (value <= acceptance_threshold(scan.best, cfg.minimizer_value_tolerance)) {
        scan.near.push_back(hit);
        if (scan.near.size() > 2 * scan.last_prune_size + 64) scan.prune(cfg.minimizer_value_tolerance);
      }
    }
  });

  TiltedSolveResult result;
  double best = kInf;
  std::vector<GridHit> near;
  std::vector<GridHit> top;
  for (ScanBlock& scan : scans) {
    result.evaluations += scan.evaluations;
    best = std::min(best, scan.best);
    near.insert(near.end(), scan.near.begin(), scan.near.end());
    top.insert(top.end(), scan.top.begin(), scan.top.end());
  }
  if (best == kInf) {
    throw Error(ErrorKind::AllInfinite, f.descriptor() + " is +inf at every sampled point of the region");
  }

  std::sort(top.begin(), top.end(), hit_less);
  if (top.size() > keep_top) top.resize(keep_top);

  std::vector<Candidate> pool;
  Eigen::VectorXd y;
  for (const GridHit& hit : near) {
    grid.point(hit.index, y);
    pool.push_back({Point(y), hit.value});
  }

  std::vector<PolishOutcome> polished(top.size(), PolishOutcome{Candidate{Point::zero(region.dim()), 0.0}, 0});
  parallel_for(top.size(), [&](std::size_t i) {
    Eigen::VectorXd start;
    grid.point(top[i].index, start);
    polished[i] = polish(f, region, cfg, Candidate{Point(start), top[i].value}, grid.spacing());
  });
  for (const PolishOutcome& outcome : polished) {
    result.evaluations += outcome.evaluations;
    best = std::min(best, outcome.best.value);
    pool.push_back(outcome.best);
  }

  const double limit = acceptance_threshold(best, cfg.minimizer_value_tolerance);
  std::erase_if(pool, [limit](const Candidate& c) { return c.value > limit; });
  std::sort(pool.begin(), pool.end(), candidate_less);
  // Polishing from neighbouring starts lands on the same limit up to round-off.
  std::vector<Candidate> distinct;
  for (Candidate& c : pool) {
    const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const Candidate& kept) {
      return distance(kept.point, c.point) <= cfg.polish_step_tolerance;
    });
    if (!seen) distinct.push_back(std::move(c));
  }

  result.min_value = best;
  result.minimizers = std::move(distinct);
  return result;
}

TiltedSolveResult argmin_tilted(const FunctionOracle& f, const TiltForm& xi, const BallRegion& region,
                                const SolverConfig& cfg) {
  return argmin_ball(tilted(f, xi), region, cfg);
}

TiltedSolveResult argmin_perturbed(const FunctionOracle& f, const FunctionOracle& g, const BallRegion& region,
                                   const SolverConfig& cfg) {
  return argmin_ball(sum(f, g), region, cfg);
}

}  // namespace growthlab
