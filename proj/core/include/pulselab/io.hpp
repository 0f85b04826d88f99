#pragma once

#include <string>

#include "pulselab/pulse.hpp"

namespace pulselab {

// Mask files: header "grid_tag <tag>", then one radian value per line.
std::string format_mask(const PhaseMask& mask);
PhaseMask parse_mask(const std::string& text);
void write_mask_file(const std::string& path, const PhaseMask& mask);
PhaseMask read_mask_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pulselab
