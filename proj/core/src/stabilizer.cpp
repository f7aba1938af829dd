#include "sff/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "sff/parallel.hpp"

namespace sff {

void StabilizerConfig::validate() const {
  if (alpha < 2 || (alpha & (alpha - 1)) != 0)
    throw Error(Errc::invalid_config, "alpha must be a power of 2, >= 2");
  if (dp <= 0.0 || dp >= 1.0) throw Error(Errc::invalid_config, "dp outside (0, 1)");
  if (cp <= 0.0 || cp >= 0.5) throw Error(Errc::invalid_config, "cp outside (0, 0.5)");
  if (1.0 - 2.0 * cp <= dp)
    throw Error(Errc::invalid_config, "crop rectangle must strictly contain the drop rectangle");
  if (sigma_cov <= 0.0) throw Error(Errc::invalid_config, "sigma_cov must be positive");
  if (eta <= 0.0) throw Error(Errc::invalid_config, "eta must be positive");
  if (max_replacement_rounds < 1)
    throw Error(Errc::invalid_config, "need at least one replacement round");
  if (min_anchor_inliers < 4)
    throw Error(Errc::invalid_config, "min_anchor_inliers must be >= 4");
}

Rect StabilizerConfig::drop_rect(int width, int height) const {
  return centered_rect(width, height, dp);
}

Rect StabilizerConfig::crop_rect(int width, int height) const {
  return centered_rect(width, height, 1.0 - 2.0 * cp);
}

std::vector<PatchPlan::Patch> partition_patches(int n_sampled, int alpha) {
  if (n_sampled < 1) throw Error(Errc::invalid_argument, "need at least one sampled frame");
  if (alpha < 1) throw Error(Errc::invalid_argument, "alpha must be >= 1");
  std::vector<PatchPlan::Patch> patches;
  for (int begin = 0; begin < n_sampled; begin += alpha)
    patches.push_back(PatchPlan::Patch{begin, std::min(begin + alpha, n_sampled)});
  return patches;
}

int select_master(const PatchPlan::Patch& patch, const std::function<int(int, int)>& score) {
  if (patch.end <= patch.begin) throw Error(Errc::invalid_argument, "empty patch");
  int best = patch.begin;
  long best_total = -1;
  for (int f = patch.begin; f < patch.end; ++f) {
    long total = 0;
    for (int i = patch.begin; i < patch.end; ++i) {
      // The self pair is excluded: R(f, f) is just f's feature count and
      // would reward degenerate frames instead of patch agreement.
      if (i == f) continue;
      total += score(i, f);
    }
    if (total > best_total) {
      best_total = total;
      best = f;
    }
  }
  return best;
}

Homography fractional_power(const Homography& h, double p) {
  if (p == 0.0) return Homography::identity();
  if (p == 1.0) return h;
  if (h.is_identity()) return Homography::identity();

  Eigen::EigenSolver<Eigen::Matrix3d> es(h.m);
  for (int k = 0; k < 3; ++k) {
    std::complex<double> ev = es.eigenvalues()(k);
    double mag = std::abs(ev);
    if (mag < 1e-12) throw Error(Errc::branch_failure, "singular homography");
    if (ev.real() <= 0.0 && std::fabs(ev.imag()) <= 1e-12 * std::max(1.0, mag))
      throw Error(Errc::branch_failure, "eigenvalue on the negative real axis");
  }
  Eigen::Matrix3d log_h = h.m.log();
  Eigen::Matrix3d powered = (p * log_h).exp();
  if (!powered.allFinite()) throw Error(Errc::branch_failure, "matrix power diverged");
  return Homography::from_matrix(powered);
}

double transition_weight(int delta, int Delta) {
  if (Delta < 1) throw Error(Errc::invalid_argument, "Delta must be >= 1");
  if (delta < 0 || delta > Delta)
    throw Error(Errc::invalid_argument, "delta outside [0, Delta]");
  return static_cast<double>(delta) / static_cast<double>(Delta);
}

MaskedFrame smooth_frame(const Frame& frame, const WarpSpec& spec) {
  if (spec.w < 0.0 || spec.w > 1.0) throw Error(Errc::invalid_argument, "w outside [0, 1]");
  Homography pre = fractional_power(spec.h_pre, 1.0 - spec.w);
  Homography pos = fractional_power(spec.h_pos, spec.w);
  return warp_frame(frame, pre.compose(pos));
}

namespace {

// Keypoints whose descriptor patch touches a hole are unreliable on a
// warped frame; drop them before matching.
FeatureSet detect_features_masked(const MaskedFrame& mf, const DetectorConfig& cfg) {
  FeatureSet fs = detect_features(mf.frame, cfg);
  FeatureSet filtered;
  filtered.descriptor_size = fs.descriptor_size;
  for (int k = 0; k < fs.size(); ++k) {
    int cx = static_cast<int>(fs.keypoints[k].x);
    int cy = static_cast<int>(fs.keypoints[k].y);
    bool clean = true;
    for (int y = cy - 4; y <= cy + 4 && clean; ++y)
      for (int x = cx - 4; x <= cx + 4 && clean; ++x) {
        if (x < 0 || y < 0 || x >= mf.frame.width || y >= mf.frame.height || !mf.is_valid(x, y))
          clean = false;
      }
    if (!clean) continue;
    filtered.keypoints.push_back(fs.keypoints[k]);
    const float* d = fs.descriptor(k);
    filtered.descriptors.insert(filtered.descriptors.end(), d, d + fs.descriptor_size);
  }
  return filtered;
}

// Fraction of rect pixels that land inside the source frame under h
// (the coverage a warp of a fully valid source would produce).
double warp_coverage(const Homography& h, int src_width, int src_height, const Rect& rect) {
  const Eigen::Matrix3d inv = h.m.inverse();
  const double w_max = src_width - 0.5, h_max = src_height - 0.5;
  long covered = 0;
  for (int y = rect.y; y < rect.y + rect.h; ++y)
    for (int x = rect.x; x < rect.x + rect.w; ++x) {
      double den = inv(2, 0) * x + inv(2, 1) * y + inv(2, 2);
      if (std::fabs(den) < 1e-12) continue;
      double sx = (inv(0, 0) * x + inv(0, 1) * y + inv(0, 2)) / den;
      double sy = (inv(1, 0) * x + inv(1, 1) * y + inv(1, 2)) / den;
      if (sx >= -0.5 && sx <= w_max && sy >= -0.5 && sy <= h_max) ++covered;
    }
  return static_cast<double>(covered) / static_cast<double>(rect.area());
}

std::optional<RansacResult> ransac_between(const FeatureSet& fa, const FeatureSet& fb,
                                           const RansacConfig& cfg) {
  if (fa.size() == 0 || fb.size() == 0) return std::nullopt;
  MatchSet matches = match_features(fa, fb);
  if (matches.size() < 4) return std::nullopt;
  try {
    return estimate_homography_ransac(matches, fa.keypoints, fb.keypoints, cfg);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

StitchResult stitch(MaskedFrame& base, const Frame& donor, const DetectorConfig& det,
                    const RansacConfig& ransac, int min_inliers) {
  donor.validate();
  FeatureSet fbase = detect_features_masked(base, det);
  FeatureSet fdonor = detect_features(donor, det);
  RansacConfig rc = ransac;
  rc.seed = mix_seed(ransac.seed, static_cast<std::uint64_t>(donor.index),
                     static_cast<std::uint64_t>(base.frame.index));
  std::optional<RansacResult> fit = ransac_between(fdonor, fbase, rc);
  if (!fit || fit->inliers < min_inliers) return StitchResult{false};

  // Donor pixels go only where the base is invalid ("copied to the back").
  const Eigen::Matrix3d inv = fit->h.m.inverse();
  const double w_max = donor.width - 0.5, h_max = donor.height - 0.5;
  const bool color = base.frame.has_color();
  for (int y = 0; y < base.frame.height; ++y) {
    for (int x = 0; x < base.frame.width; ++x) {
      std::size_t p = static_cast<std::size_t>(y) * base.frame.width + x;
      if (base.valid[p]) continue;
      double den = inv(2, 0) * x + inv(2, 1) * y + inv(2, 2);
      if (std::fabs(den) < 1e-12) continue;
      double sx = (inv(0, 0) * x + inv(0, 1) * y + inv(0, 2)) / den;
      double sy = (inv(1, 0) * x + inv(1, 1) * y + inv(1, 2)) / den;
      if (sx < -0.5 || sx > w_max || sy < -0.5 || sy > h_max) continue;

      int x0 = static_cast<int>(std::floor(sx));
      int y0 = static_cast<int>(std::floor(sy));
      double fx = sx - x0, fy = sy - y0;
      auto clamp_tap = [&](int xx, int yy) {
        xx = xx < 0 ? 0 : (xx >= donor.width ? donor.width - 1 : xx);
        yy = yy < 0 ? 0 : (yy >= donor.height ? donor.height - 1 : yy);
        return std::make_pair(xx, yy);
      };
      auto lerp = [&](auto get) {
        auto [ax, ay] = clamp_tap(x0, y0);
        auto [bx, by] = clamp_tap(x0 + 1, y0);
        auto [cx2, cy2] = clamp_tap(x0, y0 + 1);
        auto [dx2, dy2] = clamp_tap(x0 + 1, y0 + 1);
        double top = get(ax, ay) * (1 - fx) + get(bx, by) * fx;
        double bot = get(cx2, cy2) * (1 - fx) + get(dx2, dy2) * fx;
        double v = top * (1 - fy) + bot * fy;
        int i = static_cast<int>(v + 0.5);
        return static_cast<std::uint8_t>(i < 0 ? 0 : (i > 255 ? 255 : i));
      };
      base.frame.gray[p] = lerp([&](int xx, int yy) { return static_cast<double>(donor.at(xx, yy)); });
      if (color) {
        for (int c = 0; c < 3; ++c) {
          if (donor.has_color())
            base.frame.color[3 * p + c] = lerp([&](int xx, int yy) {
              return static_cast<double>(donor.color[(static_cast<std::size_t>(yy) * donor.width + xx) * 3 + c]);
            });
          else
            base.frame.color[3 * p + c] = base.frame.gray[p];
        }
      }
      base.valid[p] = 1;
    }
  }
  return StitchResult{true};
}

int select_replacement(const std::vector<int>& candidates, const FrameSequence& original,
                       const ReplacementContext& context, const SemanticProfile& profile,
                       int replaced_index, const StabilizerConfig& cfg) {
  if (candidates.empty()) throw Error(Errc::no_candidates, "empty replacement pool");

  std::optional<FeatureSet> fprev, fnext;
  if (context.prev) fprev = detect_features(*context.prev, cfg.detector);
  if (context.next) fnext = detect_features(*context.next, cfg.detector);
  const Rect crop_area = cfg.crop_rect(original.width(), original.height());

  int best = candidates.front();
  double best_score = -1.0;
  for (int d : candidates) {
    const Frame& df = original[d];
    FeatureSet fd = detect_features(df, cfg.detector);

    auto fit_to = [&](const std::optional<FeatureSet>& fctx,
                      const Frame* ctx) -> std::optional<RansacResult> {
      if (!fctx || !ctx) return std::nullopt;
      RansacConfig rc = cfg.ransac;
      rc.seed = mix_seed(cfg.ransac.seed, static_cast<std::uint64_t>(d),
                         static_cast<std::uint64_t>(ctx->index));
      return ransac_between(fd, *fctx, rc);
    };
    std::optional<RansacResult> ra = fit_to(fprev, context.prev);
    std::optional<RansacResult> rb = fit_to(fnext, context.next);

    double inlier_sum = (ra ? ra->inliers : 0) + (rb ? rb->inliers : 0);
    double cov = 0.0;
    if (ra)
      cov = warp_coverage(ra->h, df.width, df.height, crop_area);
    else if (rb)
      cov = warp_coverage(rb->h, df.width, df.height, crop_area);
    double uncovered_pct = 100.0 * (1.0 - cov);
    double gauss = std::exp(-uncovered_pct * uncovered_pct / (2.0 * cfg.sigma_cov * cfg.sigma_cov));
    double score = gauss * inlier_sum * (cfg.eta + profile.scores[d]);

    bool take = score > best_score;
    if (score == best_score) {
      int cur = std::abs(d - replaced_index), inc = std::abs(best - replaced_index);
      take = cur < inc || (cur == inc && d < best);
    }
    if (take) {
      best_score = score;
      best = d;
    }
  }
  return best;
}

namespace {

struct SlotSpec {
  bool ok = false;
  WarpSpec spec;
};

struct MasterRef {
  int pre_slot = -1;
  int pos_slot = -1;
};

MasterRef masters_around(const std::vector<int>& masters, int slot) {
  MasterRef ref;
  for (int m : masters) {
    if (m <= slot) ref.pre_slot = m;
    if (m >= slot && ref.pos_slot < 0) ref.pos_slot = m;
  }
  return ref;
}

}  // namespace

StabilizeResult stabilize(const FrameSequence& original, const SamplingResult& sampling,
                          const SemanticProfile& profile, const StabilizerConfig& cfg,
                          int jobs) {
  cfg.validate();
  const std::vector<int>& selected = sampling.selected;
  const int n_slots = static_cast<int>(selected.size());
  if (n_slots < 1) throw Error(Errc::invalid_argument, "empty sampling");
  if (profile.size() != original.size())
    throw Error(Errc::length_mismatch, "profile length differs from original length");
  for (int k = 0; k < n_slots; ++k) {
    if (selected[k] < 0 || selected[k] >= original.size())
      throw Error(Errc::out_of_range_frame, "selected index outside the original video");
    if (k > 0 && selected[k] <= selected[k - 1])
      throw Error(Errc::invalid_argument, "selected indices must increase");
  }

  const int width = original.width(), height = original.height();
  const Rect crop_area = cfg.crop_rect(width, height);
  const Rect drop_area = cfg.drop_rect(width, height);

  StabilizeResult result;
  auto patches = partition_patches(n_slots, cfg.alpha);
  result.plan.patches = patches;

  // Slot features are reused by master selection and the per-slot
  // homographies toward the masters.
  std::vector<FeatureSet> slot_features(n_slots);
  parallel_for(n_slots, jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      slot_features[i] = detect_features(original[selected[i]], cfg.detector);
  });

  auto slot_ransac = [&](int i, int f) -> std::optional<RansacResult> {
    RansacConfig rc = cfg.ransac;
    rc.seed = mix_seed(cfg.ransac.seed, static_cast<std::uint64_t>(selected[i]),
                       static_cast<std::uint64_t>(selected[f]));
    return ransac_between(slot_features[i], slot_features[f], rc);
  };

  result.plan.masters.resize(patches.size());
  parallel_for(patches.size(), jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      result.plan.masters[k] = select_master(patches[k], [&](int i, int f) {
        std::optional<RansacResult> r = slot_ransac(i, f);
        return r ? r->inliers : 0;
      });
    }
  });
  const std::vector<int>& masters = result.plan.masters;

  auto spec_for = [&](const FeatureSet& features, int frame_index, int slot) -> SlotSpec {
    SlotSpec out;
    MasterRef ref = masters_around(masters, slot);
    // A master carrying its own frame is the fixed point of the warp.
    if (ref.pre_slot == slot && frame_index == selected[slot]) {
      out.ok = true;
      out.spec = WarpSpec{Homography::identity(), Homography::identity(), 0.0, 0, 1};
      return out;
    }
    auto fit_master = [&](int m_slot) -> std::optional<Homography> {
      RansacConfig rc = cfg.ransac;
      rc.seed = mix_seed(cfg.ransac.seed, static_cast<std::uint64_t>(frame_index),
                         static_cast<std::uint64_t>(selected[m_slot]));
      std::optional<RansacResult> r =
          ransac_between(features, slot_features[m_slot], rc);
      if (!r || r->inliers < cfg.min_anchor_inliers) return std::nullopt;
      return r->h;
    };

    if (ref.pre_slot >= 0 && ref.pos_slot >= 0 && ref.pre_slot != ref.pos_slot) {
      std::optional<Homography> h_pre = fit_master(ref.pre_slot);
      std::optional<Homography> h_pos = fit_master(ref.pos_slot);
      if (!h_pre || !h_pos) return out;
      int delta = slot - ref.pre_slot;
      int Delta = ref.pos_slot - ref.pre_slot;
      out.spec = WarpSpec{*h_pre, *h_pos, transition_weight(delta, Delta), delta, Delta};
      out.ok = true;
    } else if (ref.pre_slot >= 0 && ref.pos_slot < 0) {
      // Tail run: the last slot acts as a virtual identity anchor, so the
      // warp ramps down instead of dragging far frames onto the master.
      std::optional<Homography> h_pre = fit_master(ref.pre_slot);
      if (!h_pre) return out;
      int delta = slot - ref.pre_slot;
      int Delta = std::max(n_slots - 1 - ref.pre_slot, 1);
      out.spec =
          WarpSpec{*h_pre, Homography::identity(), transition_weight(delta, Delta), delta, Delta};
      out.ok = true;
    } else if (ref.pos_slot >= 0) {
      // Head run: virtual identity anchor at slot 0, ramping up toward
      // the first master.
      std::optional<Homography> h_pos = fit_master(ref.pos_slot);
      if (!h_pos) return out;
      int delta = std::min(slot, ref.pos_slot);
      int Delta = std::max(ref.pos_slot, 1);
      out.spec = WarpSpec{Homography::identity(), *h_pos, transition_weight(delta, Delta), delta,
                          Delta};
      out.ok = true;
    }
    return out;
  };

  std::vector<SlotSpec> specs(n_slots);
  parallel_for(n_slots, jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      specs[i] = spec_for(slot_features[i], selected[i], static_cast<int>(i));
  });

  std::set<int> is_selected(selected.begin(), selected.end());
  std::set<int> consumed;
  auto donor_pool = [&](int slot, int around, const std::set<int>& tried) {
    int lower = slot > 0 ? selected[slot - 1] : -1;
    int upper = slot + 1 < n_slots ? selected[slot + 1] : original.size();
    std::vector<int> pool;
    for (int d = lower + 1; d < upper; ++d) {
      if (is_selected.count(d) || consumed.count(d) || tried.count(d)) continue;
      pool.push_back(d);
    }
    std::sort(pool.begin(), pool.end(), [&](int a, int b) {
      int da = std::abs(a - around), db = std::abs(b - around);
      if (da != db) return da < db;
      return a < b;
    });
    return pool;
  };

  std::vector<std::optional<Frame>> outputs(n_slots);
  result.outcomes.resize(n_slots);
  std::optional<MaskedFrame> prev_warped;

  // The reconstruction state machine. Sequential: donor consumption is
  // stateful across neighboring slots.
  for (int i = 0; i < n_slots; ++i) {
    int source = selected[i];
    std::set<int> tried;
    std::vector<int> donors_used;
    int rounds = 0;
    FrameOutcome outcome;
    outcome.slot = i;
    outcome.source_frame = source;
    outcome.state = OutcomeState::dropped;

    // context for replacement scoring; the posterior context comes from
    // the next slot's precomputed warp
    std::optional<MaskedFrame> next_warped;
    bool next_ready = false;
    auto next_context = [&]() -> const Frame* {
      if (!next_ready) {
        next_ready = true;
        if (i + 1 < n_slots && specs[i + 1].ok) {
          try {
            next_warped = smooth_frame(original[selected[i + 1]], specs[i + 1].spec);
          } catch (const Error&) {
            next_warped.reset();
          }
        }
      }
      return next_warped ? &next_warped->frame : nullptr;
    };

    while (true) {
      donors_used.clear();  // donors of discarded attempts stay consumed but unlogged
      SlotSpec slot_spec = source == selected[i] && rounds == 0
                               ? specs[i]
                               : spec_for(detect_features(original[source], cfg.detector),
                                          source, i);
      std::optional<MaskedFrame> warped;
      if (slot_spec.ok) {
        try {
          warped = smooth_frame(original[source], slot_spec.spec);
        } catch (const Error&) {
          warped.reset();
        }
      }

      if (warped) {
        outcome.w = slot_spec.spec.w;
        outcome.crop_coverage = coverage(*warped, crop_area);
        outcome.drop_coverage = coverage(*warped, drop_area);
        if (outcome.crop_coverage == 1.0) {
          outcome.state = OutcomeState::done;
          outcome.source_frame = source;
          outcome.donors = donors_used;
          outputs[i] = crop(warped->frame, crop_area);
          prev_warped = std::move(warped);
          break;
        }
        if (outcome.drop_coverage == 1.0) {
          for (int d : donor_pool(i, source, tried)) {
            if (outcome.crop_coverage == 1.0) break;
            if (!stitch(*warped, original[d], cfg.detector, cfg.ransac,
                        cfg.min_anchor_inliers)
                     .aligned)
              continue;
            donors_used.push_back(d);
            consumed.insert(d);
            outcome.crop_coverage = coverage(*warped, crop_area);
          }
          outcome.drop_coverage = coverage(*warped, drop_area);
          if (outcome.crop_coverage == 1.0) {
            outcome.state = OutcomeState::stitched;
            outcome.source_frame = source;
            outcome.donors = donors_used;
            outputs[i] = crop(warped->frame, crop_area);
            prev_warped = std::move(warped);
            break;
          }
        }
      }

      // frame dropped; pick a replacement and restart, bounded
      if (rounds >= cfg.max_replacement_rounds) {
        outcome.source_frame = source;
        outcome.donors = donors_used;
        break;
      }
      std::vector<int> pool = donor_pool(i, source, tried);
      if (pool.empty()) {
        outcome.source_frame = source;
        outcome.donors = donors_used;
        break;
      }
      ReplacementContext ctx;
      ctx.prev = prev_warped ? &prev_warped->frame : nullptr;
      ctx.next = next_context();
      int d = select_replacement(pool, original, ctx, profile, source, cfg);
      tried.insert(d);
      consumed.insert(d);
      source = d;
      ++rounds;
    }
    result.outcomes[i] = outcome;
  }

  // A patch that lost every slot is passed through unstabilized.
  for (std::size_t k = 0; k < patches.size(); ++k) {
    bool alive = false;
    for (int i = patches[k].begin; i < patches[k].end; ++i) alive |= outputs[i].has_value();
    if (alive) continue;
    result.collapsed_patches.push_back(static_cast<int>(k));
    for (int i = patches[k].begin; i < patches[k].end; ++i) {
      outputs[i] = crop(original[selected[i]], crop_area);
      FrameOutcome& o = result.outcomes[i];
      o.state = OutcomeState::done;
      o.source_frame = selected[i];
      o.donors.clear();
      o.crop_coverage = 1.0;
      o.drop_coverage = 1.0;
      o.w = 0.0;
    }
  }

  result.stabilized.fps = original.fps;
  for (int i = 0; i < n_slots; ++i) {
    if (!outputs[i]) continue;
    Frame f = std::move(*outputs[i]);
    f.index = static_cast<int>(result.stabilized.frames.size());
    f.source_index = result.outcomes[i].source_frame;
    result.stabilized.frames.push_back(std::move(f));
  }
  return result;
}

void save_outcomes_jsonl(const StabilizeResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  for (const FrameOutcome& o : result.outcomes) {
    const char* state = o.state == OutcomeState::done
                            ? "done"
                            : (o.state == OutcomeState::stitched ? "stitched" : "dropped");
    nlohmann::json j{{"slot", o.slot},          {"source_frame", o.source_frame},
                     {"state", state},          {"donors", o.donors},
                     {"crop_coverage", o.crop_coverage}, {"drop_coverage", o.drop_coverage},
                     {"w", o.w}};
    out << j.dump() << '\n';
  }
}

}  // namespace sff
