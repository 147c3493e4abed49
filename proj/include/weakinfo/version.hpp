#ifndef WEAKINFO_VERSION_HPP
#define WEAKINFO_VERSION_HPP

namespace weakinfo {

inline constexpr const char* version() { return "1.0.0"; }

} // namespace weakinfo

#endif
