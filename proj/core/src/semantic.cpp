#include "sff/semantic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace sff {

GaussianSpec GaussianSpec::for_frame(int width, int height, double sigma) {
  GaussianSpec spec;
  spec.center_x = width / 2.0;
  spec.center_y = height / 2.0;
  spec.sigma = sigma > 0 ? sigma : std::min(width / 2.0, height / 2.0);
  return spec;
}

double SemanticProfile::mean() const {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

double gaussian_weight(double x, double y, const GaussianSpec& spec) {
  double dx = x - spec.center_x;
  double dy = y - spec.center_y;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * spec.sigma * spec.sigma));
}

double frame_semantic_score(const std::vector<Roi>& rois, int width, int height,
                            const GaussianSpec& spec) {
  (void)width;
  (void)height;
  double score = 0.0;
  for (const Roi& r : rois)
    score += r.confidence * r.area() * gaussian_weight(r.center_x(), r.center_y(), spec);
  return score;
}

SemanticProfile score_series(const RoiLabels& labels, int n_frames, int width, int height,
                             const GaussianSpec& spec) {
  if (static_cast<int>(labels.size()) != n_frames)
    throw Error(Errc::length_mismatch, "label count " + std::to_string(labels.size()) +
                                           " != frame count " + std::to_string(n_frames));
  SemanticProfile profile;
  profile.sigma_used = spec.sigma;
  profile.scores.resize(n_frames);
  for (int i = 0; i < n_frames; ++i)
    profile.scores[i] = frame_semantic_score(labels[i], width, height, spec);
  return profile;
}

void save_profile_csv(const SemanticProfile& profile, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(Errc::io_error, "cannot write " + path.string());
  std::fprintf(f, "frame,score\n");
  for (std::size_t i = 0; i < profile.scores.size(); ++i)
    std::fprintf(f, "%zu,%.17g\n", i, profile.scores[i]);
  std::fclose(f);
}

SemanticProfile load_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  SemanticProfile profile;
  std::string line;
  bool first = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (first && line.rfind("frame,", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    long frame = 0;
    double score = 0.0;
    if (std::sscanf(line.c_str(), "%ld,%lg", &frame, &score) != 2)
      throw Error(Errc::parse_error, path.string() + ":" + std::to_string(line_no) + ": bad row");
    if (frame != static_cast<long>(profile.scores.size()))
      throw Error(Errc::parse_error,
                  path.string() + ":" + std::to_string(line_no) + ": rows out of order");
    profile.scores.push_back(score);
  }
  return profile;
}

}  // namespace sff
