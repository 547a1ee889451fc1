#pragma once

#include <filesystem>

#include "qoe/brisque.hpp"

namespace qoe::iqa {

// Decodes any format the image codecs understand and converts to luma.
// Throws Error when the file cannot be read or decoded.
GrayImage read_gray(const std::filesystem::path& path);

}  // namespace qoe::iqa
