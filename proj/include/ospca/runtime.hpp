#pragma once

namespace ospca {

// Worker-count cap for parallel support enumeration. 0 means auto
// (hardware concurrency). The reduction is deterministic either way.
void set_max_threads(unsigned n);
unsigned effective_threads();

}  // namespace ospca
