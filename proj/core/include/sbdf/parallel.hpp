#pragma once

#include <functional>

namespace sbdf {

/// Worker count used by the row-parallel sweeps (default 1).
void set_thread_count(int n);
int thread_count();

/// Calls fn(row_begin, row_end) over a fixed partition of [0, rows).
/// Runs inline when one thread is configured or the work is small.
void for_rows(int rows, const std::function<void(int, int)>& fn);

}  // namespace sbdf
