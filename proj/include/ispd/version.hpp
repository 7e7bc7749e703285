#ifndef ISPD_VERSION_HPP
#define ISPD_VERSION_HPP

namespace ispd {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
