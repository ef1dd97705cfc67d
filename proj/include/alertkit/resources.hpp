#pragma once

#include <string_view>

// Bundled resource files, embedded at build time from resources/.
namespace alertkit::resources {

std::string_view signatures_json();
std::string_view dialects_json();
std::string_view stage_mapping_json();

}  // namespace alertkit::resources
