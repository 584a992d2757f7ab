#pragma once

namespace plq {

// Worker count for parallel kernels: min(PERSUASION_LQ_THREADS, hardware),
// defaulting to the machine parallelism. Returns 1 when built without OpenMP.
// An explicit request > 0 bypasses the environment variable.
int resolve_threads(int requested = 0);

}  // namespace plq
