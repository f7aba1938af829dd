#pragma once

#include <filesystem>
#include <string>

#include "sff/frame.hpp"

namespace sff {

/// Decodes a PNG, binary PGM (P5) or binary PPM (P6) file.
/// Color inputs keep their RGB plane and get a derived gray plane.
Frame load_image(const std::filesystem::path& path);

/// Encodes by extension: .png, .pgm (gray) or .ppm (color).
void save_image(const Frame& frame, const std::filesystem::path& path);

/// Loads every file in `dir_path` that matches `pattern` (a shell-style
/// glob over the file name, '*' and '?' only) and follows the
/// `<stem>_<digits>.<ext>` sequence convention. Frames are ordered by the
/// parsed numeric index; positions are re-based to 0..N-1 and the parsed
/// value kept as Frame::source_index.
FrameSequence load_image_sequence(const std::filesystem::path& dir_path,
                                  const std::string& pattern = "*");

/// Writes frames as `<stem>_NNNNNN.<format>` into `dir` (created if needed).
/// `format` is "png", "pgm" or "ppm"; pgm/ppm picks the gray/color plane.
void save_image_sequence(const FrameSequence& seq, const std::filesystem::path& dir,
                         const std::string& stem, const std::string& format);

bool glob_match(const std::string& pattern, const std::string& name);

}  // namespace sff
