#ifndef QLAP_IO_HPP
#define QLAP_IO_HPP

#include <string>

namespace qlap {

/// Shortest round-trip decimal representation of a double (std::to_chars).
std::string format_double(double x);

} // namespace qlap

#endif
