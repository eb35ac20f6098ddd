#pragma once

namespace rd {

// Effective worker cap: RD_PDHG_THREADS when set to a positive integer,
// otherwise the OpenMP default.  The first call applies the cap
// process-wide; later calls just report it.
int thread_cap();

} // namespace rd
