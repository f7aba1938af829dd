#include "sff/cost_table.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

#include "sff/emd.hpp"
#include "sff/parallel.hpp"

namespace sff {

CostTable::CostTable(int n_frames, int tau_max) : n_(n_frames), tau_(tau_max) {
  if (n_frames < 0 || tau_max < 1) throw Error(Errc::invalid_argument, "bad cost table shape");
  data_.assign(3 * static_cast<std::size_t>(n_frames) * tau_max, 0.0f);
}

std::size_t CostTable::slot(int i, int j) const {
  return 3 * (static_cast<std::size_t>(i) * tau_ + (j - i - 1));
}

PairCosts CostTable::at(int i, int j) const {
  if (!valid_pair(i, j)) throw Error(Errc::out_of_range_frame, "pair outside cost table");
  std::size_t s = slot(i, j);
  return PairCosts{data_[s], data_[s + 1], data_[s + 2]};
}

void CostTable::set(int i, int j, const PairCosts& c) {
  if (!valid_pair(i, j)) throw Error(Errc::out_of_range_frame, "pair outside cost table");
  std::size_t s = slot(i, j);
  data_[s] = static_cast<float>(c.instability);
  data_[s + 1] = static_cast<float>(c.velocity);
  data_[s + 2] = static_cast<float>(c.appearance);
}

CostFn CostTable::fn() const {
  return [this](int i, int j) { return at(i, j); };
}

void CostTable::save(const std::filesystem::path& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error(Errc::io_error, "cannot write " + path.string());
  std::uint32_t header[2] = {static_cast<std::uint32_t>(n_), static_cast<std::uint32_t>(tau_)};
  bool ok = std::fwrite(header, sizeof(header), 1, f) == 1;
  for (int i = 0; ok && i < n_; ++i) {
    for (int j = i + 1; ok && j <= i + tau_ && j < n_; ++j)
      ok = std::fwrite(data_.data() + slot(i, j), sizeof(float), 3, f) == 3;
  }
  std::fclose(f);
  if (!ok) throw Error(Errc::io_error, "short write: " + path.string());
}

CostTable CostTable::load(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw Error(Errc::io_error, "cannot open " + path.string());
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> guard(f, std::fclose);

  std::uint32_t header[2];
  if (std::fread(header, sizeof(header), 1, f) != 1)
    throw Error(Errc::parse_error, "truncated cost cache header: " + path.string());
  if (header[0] > (1u << 24) || header[1] < 1 || header[1] > (1u << 20))
    throw Error(Errc::parse_error, "implausible cost cache header: " + path.string());

  CostTable table(static_cast<int>(header[0]), static_cast<int>(header[1]));
  for (int i = 0; i < table.n_; ++i) {
    for (int j = i + 1; j <= i + table.tau_ && j < table.n_; ++j) {
      if (std::fread(table.data_.data() + table.slot(i, j), sizeof(float), 3, f) != 3)
        throw Error(Errc::parse_error, "truncated cost cache data: " + path.string());
    }
  }
  return table;
}

CostTableResult compute_cost_table(const FrameSequence& seq, const CostTableConfig& cfg) {
  const int n = seq.size();
  if (n < 1) throw Error(Errc::empty_sequence, "no frames");
  CostTableResult result;
  result.table = CostTable(n, cfg.tau_max);
  if (n < 2) return result;

  // Per-frame work first: features and appearance histograms.
  std::vector<FeatureSet> features(n);
  std::vector<Histogram> histograms(n);
  parallel_for(n, cfg.jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      features[i] = detect_features(seq[static_cast<int>(i)], cfg.detector);
      histograms[i] = color_histogram(seq[static_cast<int>(i)], cfg.histogram_bins);
    }
  });

  // Adjacent-pair flow magnitudes feed the velocity term.
  std::vector<std::optional<double>> raw(n - 1);
  parallel_for(raw.size(), cfg.jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      std::vector<FlowVector> flow = sparse_flow(features[k], features[k + 1]);
      if (flow.empty()) continue;
      double sum = 0.0;
      for (const FlowVector& f : flow) sum += f.displacement.norm();
      raw[k] = sum / static_cast<double>(flow.size());
    }
  });
  result.flow = impute_flow_magnitudes(raw);

  double target = cfg.target_flow;
  if (target <= 0.0) {
    double sum = 0.0;
    for (double v : result.flow.values) sum += v;
    target = sum / static_cast<double>(result.flow.values.size());
  }
  result.target_flow = target;

  std::vector<double> prefix(n, 0.0);
  for (int k = 0; k < n - 1; ++k) prefix[k + 1] = prefix[k] + result.flow.values[k];

  const int width = seq.width(), height = seq.height();
  parallel_for(n, cfg.jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (int j = static_cast<int>(i) + 1; j <= static_cast<int>(i) + cfg.tau_max && j < n; ++j) {
        PairCosts c;
        std::vector<FlowVector> flow = sparse_flow(features[i], features[j]);
        c.instability =
            static_cast<int>(flow.size()) >= std::max(2, cfg.min_flow_matches)
                ? instability_cost_from_flow(flow, width, height, cfg.foe)
                : 1.0;
        double mean = (prefix[j] - prefix[i]) / static_cast<double>(j - static_cast<int>(i));
        // A fully static sequence has no velocity signal; leave the term 0
        // rather than divide by a zero target.
        c.velocity = target > 0.0 ? velocity_cost_from_mean(mean, target) : 0.0;
        c.appearance = emd_1d(histograms[i], histograms[j]);
        result.table.set(static_cast<int>(i), j, c);
      }
    }
  });
  return result;
}

}  // namespace sff
