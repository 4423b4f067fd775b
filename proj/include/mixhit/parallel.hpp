#pragma once

namespace mixhit {

// Every parallel kernel has a serial twin selected by this flag.  Both
// perform the same per-item arithmetic, so results are bit-identical.
enum class Exec { Serial, Parallel };

// Reads MIXHIT_THREADS and caps the OpenMP team size accordingly.
void apply_thread_env();

int max_threads();

}  // namespace mixhit
