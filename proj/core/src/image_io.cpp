#include "sff/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <map>

namespace sff {
namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using UniqueFile = std::unique_ptr<std::FILE, FileCloser>;

std::string lower_ext(const fs::path& path) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

Frame load_png(const fs::path& path) {
  UniqueFile fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error(Errc::io_error, "cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(Errc::decode_error, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(Errc::decode_error, "libpng init failed");
  }
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::decode_error, "png decode failed: " + path.string());
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  color_type = png_get_color_type(png, info);
  bool is_gray = color_type == PNG_COLOR_TYPE_GRAY;
  std::size_t row_bytes = png_get_rowbytes(png, info);

  Frame frame;
  frame.width = static_cast<int>(w);
  frame.height = static_cast<int>(h);
  std::vector<std::uint8_t> raw(row_bytes * h);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = raw.data() + y * row_bytes;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (is_gray) {
    frame.gray.assign(raw.begin(), raw.end());
    frame.gray.resize(static_cast<std::size_t>(w) * h);
  } else {
    frame.color.resize(static_cast<std::size_t>(w) * h * 3);
    for (png_uint_32 y = 0; y < h; ++y)
      std::memcpy(frame.color.data() + static_cast<std::size_t>(y) * w * 3, raw.data() + y * row_bytes,
                  static_cast<std::size_t>(w) * 3);
    derive_gray_from_color(frame);
  }
  return frame;
}

void save_png(const Frame& frame, const fs::path& path) {
  UniqueFile fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error(Errc::io_error, "cannot write " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(Errc::io_error, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(Errc::io_error, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::io_error, "png encode failed: " + path.string());
  }

  png_init_io(png, fp.get());
  png_set_compression_level(png, 4);
  const bool color = frame.has_color();
  png_set_IHDR(png, info, frame.width, frame.height, 8,
               color ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::size_t stride = static_cast<std::size_t>(frame.width) * (color ? 3 : 1);
  const std::uint8_t* data = color ? frame.color.data() : frame.gray.data();
  for (int y = 0; y < frame.height; ++y)
    png_write_row(png, const_cast<png_bytep>(data + y * stride));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Binary PGM (P5) / PPM (P6), maxval 255.
Frame load_pnm(const fs::path& path) {
  UniqueFile fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error(Errc::io_error, "cannot open " + path.string());

  auto next_token = [&]() -> long {
    int c = std::fgetc(fp.get());
    while (c != EOF && (std::isspace(c) || c == '#')) {
      if (c == '#')
        while (c != EOF && c != '\n') c = std::fgetc(fp.get());
      c = std::fgetc(fp.get());
    }
    if (c == EOF || !std::isdigit(c)) throw Error(Errc::decode_error, "bad pnm header: " + path.string());
    long v = 0;
    while (c != EOF && std::isdigit(c)) {
      v = v * 10 + (c - '0');
      c = std::fgetc(fp.get());
    }
    return v;
  };

  char magic[2];
  if (std::fread(magic, 1, 2, fp.get()) != 2 || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
    throw Error(Errc::decode_error, "unsupported pnm magic: " + path.string());
  bool color = magic[1] == '6';
  long w = next_token();
  long h = next_token();
  long maxval = next_token();
  if (w <= 0 || h <= 0 || maxval != 255)
    throw Error(Errc::decode_error, "unsupported pnm geometry: " + path.string());

  Frame frame;
  frame.width = static_cast<int>(w);
  frame.height = static_cast<int>(h);
  std::size_t n = static_cast<std::size_t>(w) * h * (color ? 3 : 1);
  std::vector<std::uint8_t>& plane = color ? frame.color : frame.gray;
  plane.resize(n);
  if (std::fread(plane.data(), 1, n, fp.get()) != n)
    throw Error(Errc::decode_error, "truncated pnm data: " + path.string());
  if (color) derive_gray_from_color(frame);
  return frame;
}

void save_pnm(const Frame& frame, const fs::path& path, bool color) {
  if (color && !frame.has_color())
    throw Error(Errc::invalid_argument, "frame has no color plane for ppm output");
  UniqueFile fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error(Errc::io_error, "cannot write " + path.string());
  std::fprintf(fp.get(), "P%c\n%d %d\n255\n", color ? '6' : '5', frame.width, frame.height);
  const std::vector<std::uint8_t>& plane = color ? frame.color : frame.gray;
  if (std::fwrite(plane.data(), 1, plane.size(), fp.get()) != plane.size())
    throw Error(Errc::io_error, "short write: " + path.string());
}

// Trailing digit run of the stem, per the <stem>_<digits>.<ext> convention.
bool parse_sequence_index(const std::string& stem, long& index) {
  std::size_t end = stem.size();
  std::size_t begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  if (begin == end) return false;
  index = std::stol(stem.substr(begin, end - begin));
  return true;
}

}  // namespace

bool glob_match(const std::string& pattern, const std::string& name) {
  std::size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

Frame load_image(const fs::path& path) {
  std::string ext = lower_ext(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pgm" || ext == ".ppm") return load_pnm(path);
  throw Error(Errc::decode_error, "unsupported image format: " + path.string());
}

void save_image(const Frame& frame, const fs::path& path) {
  frame.validate();
  std::string ext = lower_ext(path);
  if (ext == ".png") return save_png(frame, path);
  if (ext == ".pgm") return save_pnm(frame, path, false);
  if (ext == ".ppm") return save_pnm(frame, path, true);
  throw Error(Errc::invalid_argument, "unsupported image format: " + path.string());
}

FrameSequence load_image_sequence(const fs::path& dir_path, const std::string& pattern) {
  if (!fs::is_directory(dir_path))
    throw Error(Errc::io_error, "not a directory: " + dir_path.string());

  std::map<long, fs::path> ordered;
  for (const auto& entry : fs::directory_iterator(dir_path)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    std::string ext = lower_ext(p);
    if (ext != ".png" && ext != ".pgm" && ext != ".ppm") continue;
    if (!glob_match(pattern, p.filename().string())) continue;
    long index = 0;
    if (!parse_sequence_index(p.stem().string(), index)) continue;
    auto [it, inserted] = ordered.emplace(index, p);
    if (!inserted)
      throw Error(Errc::decode_error, "duplicate sequence index " + std::to_string(index) +
                                          " in " + dir_path.string());
  }
  if (ordered.empty())
    throw Error(Errc::empty_sequence, "no sequence frames match '" + pattern + "' in " +
                                          dir_path.string());

  FrameSequence seq;
  seq.frames.reserve(ordered.size());
  for (const auto& [index, path] : ordered) {
    Frame f = load_image(path);
    f.index = static_cast<int>(seq.frames.size());
    f.source_index = static_cast<int>(index);
    if (!seq.frames.empty() &&
        (f.width != seq.frames.front().width || f.height != seq.frames.front().height))
      throw Error(Errc::dimension_mismatch, "frame size changes at " + path.string());
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

void save_image_sequence(const FrameSequence& seq, const fs::path& dir, const std::string& stem,
                         const std::string& format) {
  if (format != "png" && format != "pgm" && format != "ppm")
    throw Error(Errc::invalid_argument, "unsupported sequence format: " + format);
  fs::create_directories(dir);
  char name[256];
  for (const Frame& f : seq.frames) {
    std::snprintf(name, sizeof(name), "%s_%06d.%s", stem.c_str(), f.index, format.c_str());
    save_image(f, dir / name);
  }
}

}  // namespace sff
