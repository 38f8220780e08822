#pragma once

namespace polyfk {

inline const char *version_string() { return "0.1.0"; }

} // namespace polyfk
