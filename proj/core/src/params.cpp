#include "rbb/params.hpp"

// Params is header-only today; this translation unit anchors the type for
// the library and leaves room for config-derived validation to grow.
namespace rbb {}
