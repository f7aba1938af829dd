#include "sff/roi_labels.hpp"

#include <fstream>

#include <json.hpp>

namespace sff {

using nlohmann::json;

RoiLabels load_roi_labels(const std::filesystem::path& path, int n_frames) {
  if (n_frames < 0) throw Error(Errc::invalid_argument, "negative frame count");
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());

  RoiLabels labels(n_frames);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::parse_error,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("frame") || !rec.contains("rois") ||
        !rec["frame"].is_number_integer() || !rec["rois"].is_array())
      throw Error(Errc::parse_error,
                  path.string() + ":" + std::to_string(line_no) + ": expected {frame, rois}");

    long frame = rec["frame"].get<long>();
    if (frame < 0 || frame >= n_frames)
      throw Error(Errc::out_of_range_frame, path.string() + ":" + std::to_string(line_no) +
                                                ": frame " + std::to_string(frame) +
                                                " outside [0, " + std::to_string(n_frames) + ")");
    for (const json& r : rec["rois"]) {
      Roi roi;
      try {
        roi.x = r.at("x").get<int>();
        roi.y = r.at("y").get<int>();
        roi.w = r.at("w").get<int>();
        roi.h = r.at("h").get<int>();
        roi.confidence = r.at("conf").get<double>();
      } catch (const json::exception& e) {
        throw Error(Errc::parse_error,
                    path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (!roi.basic_valid())
        throw Error(Errc::invalid_roi,
                    path.string() + ":" + std::to_string(line_no) + ": roi violates invariants");
      labels[frame].push_back(roi);
    }
  }
  return labels;
}

void save_roi_labels(const RoiLabels& labels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) continue;
    json rois = json::array();
    for (const Roi& r : labels[i])
      rois.push_back({{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}, {"conf", r.confidence}});
    json rec{{"frame", i}, {"rois", rois}};
    out << rec.dump() << '\n';
  }
}

void validate_labels(const RoiLabels& labels, int width, int height) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (const Roi& r : labels[i])
      if (!r.valid_for(width, height))
        throw Error(Errc::invalid_roi,
                    "frame " + std::to_string(i) + ": roi outside " + std::to_string(width) + "x" +
                        std::to_string(height));
}

}  // namespace sff
