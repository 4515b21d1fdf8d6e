#pragma once

#include "flatcrit/surface.hpp"

#include <iosfwd>

namespace flatcrit {

/// Text format, round-trips bit-exactly:
///   [field]
///   D = 2
///   label = octagon
///   [polygon P]
///   v = 0 , 0
///   v = 1 , 0
///   ...
///   [gluing]
///   P.0 <-> P.4
///   [boundary]
///   P.2
TranslationSurface parse_surface(const std::string& text);
TranslationSurface load_surface(const std::string& path);
std::string write_surface(const TranslationSurface& s);
void save_surface(const TranslationSurface& s, const std::string& path);

}  // namespace flatcrit
