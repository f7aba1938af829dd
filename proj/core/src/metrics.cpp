#include "sff/metrics.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace sff {

InstabilityReport instability_index(const FrameSequence& seq, int buffer_size) {
  const int n = seq.size();
  if (buffer_size < 2) throw Error(Errc::too_short, "buffer must hold at least 2 frames");
  if (n < buffer_size) throw Error(Errc::too_short, "sequence shorter than the buffer");
  seq.validate();

  const std::size_t pixels = seq[0].gray.size();
  const int n_windows = n - buffer_size + 1;
  double window_sum = 0.0;
  std::vector<double> mean(pixels);
  for (int w = 0; w < n_windows; ++w) {
    // two passes per window keep the variance numerically clean
    std::fill(mean.begin(), mean.end(), 0.0);
    for (int k = 0; k < buffer_size; ++k) {
      const std::uint8_t* g = seq[w + k].gray.data();
      for (std::size_t p = 0; p < pixels; ++p) mean[p] += g[p];
    }
    for (std::size_t p = 0; p < pixels; ++p) mean[p] /= buffer_size;

    double var_sum = 0.0;
    for (int k = 0; k < buffer_size; ++k) {
      const std::uint8_t* g = seq[w + k].gray.data();
      for (std::size_t p = 0; p < pixels; ++p) {
        double d = g[p] - mean[p];
        var_sum += d * d;
      }
    }
    window_sum += var_sum / ((buffer_size - 1) * static_cast<double>(pixels));
  }

  InstabilityReport report;
  report.index = window_sum / n_windows;
  report.buffer_size = buffer_size;
  report.n_frames = n;
  return report;
}

double semantic_content(const std::vector<int>& selected, const SemanticProfile& profile) {
  double total = 0.0;
  for (int idx : selected) {
    if (idx < 0 || idx >= profile.size())
      throw Error(Errc::out_of_range_frame, "selected index outside the profile");
    total += profile.scores[idx];
  }
  return total;
}

double achieved_speedup(long n_in, long n_out) {
  if (n_out < 1) throw Error(Errc::empty_output, "output has no frames");
  if (n_in < 1) throw Error(Errc::invalid_argument, "input has no frames");
  return static_cast<double>(n_in) / static_cast<double>(n_out);
}

void save_metrics_json(const MetricsReport& report, const std::filesystem::path& path) {
  nlohmann::json j{{"achieved_speedup", report.achieved_speedup},
                   {"semantic_content", report.semantic_content},
                   {"instability",
                    {{"index", report.instability.index},
                     {"buffer_size", report.instability.buffer_size},
                     {"n_frames", report.instability.n_frames}}}};
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void save_metrics_csv(const MetricsReport& report, const std::string& name,
                      const std::filesystem::path& path) {
  bool fresh = !std::filesystem::exists(path);
  std::FILE* f = std::fopen(path.c_str(), "a");
  if (!f) throw Error(Errc::io_error, "cannot write " + path.string());
  if (fresh) std::fprintf(f, "name,achieved_speedup,semantic_content,instability_index\n");
  std::fprintf(f, "%s,%.17g,%.17g,%.17g\n", name.c_str(), report.achieved_speedup,
               report.semantic_content, report.instability.index);
  std::fclose(f);
}

}  // namespace sff
