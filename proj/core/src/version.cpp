#include "curvkit/version.hpp"

namespace curvkit {
const char *version() { return "0.1.0"; }
}
