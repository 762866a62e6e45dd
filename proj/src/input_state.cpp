#include "qspeckle/input_state.hpp"

// InputState is header-only; this translation unit keeps the library layout
// one-file-per-module and anchors any future out-of-line additions.

namespace qspeckle {}
