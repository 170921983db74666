#pragma once

namespace belldice {

// Worker-count policy shared by every parallel entry point: a positive
// request wins, otherwise the BELLDICE_WORKERS environment variable,
// otherwise the OpenMP default. Always at least 1.
int resolve_workers(int requested);

}  // namespace belldice
