#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "maobo/trace_io.hpp"

namespace maobo {

/// Noiseless hypervolume of all observations up to each iteration, from
/// n_init to T. Non-decreasing by construction.
std::vector<std::pair<std::size_t, double>> hypervolume_series(const io::StoredRun& run);

/// Writes plot-ready CSVs for the artifacts in `in` into `out`:
///  - a run directory (trace.json): hypervolume_series.csv and
///    means/t<t>_obj<j>.csv (probe-grid inputs, posterior mean, variance);
///  - a study directory (similarity.json): means/<function>_seed<s>.csv;
///  - a sweep directory (table.csv): every cell, into out/<cell>/.
/// Returns the files written. Throws IoError naming the missing file.
std::vector<std::filesystem::path> emit_plotdata(const std::filesystem::path& in, const std::filesystem::path& out);

}  // namespace maobo
