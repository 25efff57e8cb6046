#pragma once

namespace curvkit {
const char *version();
}
