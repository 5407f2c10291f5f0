#pragma once

#include <fstream>
#include <string>

namespace srpband {

// Shortest round-trippable decimal for CSV cells, C locale, no exponent
// surprises across platforms ("%.12g").
std::string csv_num(double v);

// Opens an output stream, translating failure (missing directory, perms)
// into IoError so the CLI can map it to exit code 2.
std::ofstream open_output(const std::string& path);

} // namespace srpband
