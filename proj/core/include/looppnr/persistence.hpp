#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "looppnr/belief.hpp"
#include "looppnr/config.hpp"
#include "looppnr/harness.hpp"
#include "looppnr/kernel.hpp"

namespace looppnr {

/// A file could not be opened or written; the message carries the path.
class PersistenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kTrialCsvHeader = "trial_id,n0_true,n_est,var_est,n_mle,rounds,clicks,seed";
inline constexpr const char* kTraceCsvHeader =
    "trial_id,round,d,epsilon,info_gained_bits,info_available_bits,expected_loop_photons";

/// Shortest text that round-trips the double exactly.
[[nodiscard]] std::string format_double(double value);

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& records);
void write_info_trace_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& records);

/// R(0) then R(1), each preceded by a `# r0 epsilon=...` comment line; rows are
/// m, columns n.
void write_kernel_csv(const std::filesystem::path& path, const TransitionKernel& kernel);

/// Summary JSON: config echo, master seed, and one object per cell.
void write_summary_json(const std::filesystem::path& path, const RunConfig& config,
                        const std::vector<EnsembleSummary>& cells, const std::vector<std::string>& trial_files = {});

/// Tabular summary, one row per cell.
void write_summary_csv(const std::filesystem::path& path, const std::vector<EnsembleSummary>& cells);

/// Streams belief snapshots as `round,p_0_0,...,p_M_M` rows (row-major in m, n).
class BeliefCsvWriter {
 public:
  BeliefCsvWriter(const std::filesystem::path& path, std::size_t dimension);
  void write(const BeliefMatrix& belief);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t dimension_;
};

}  // namespace looppnr
