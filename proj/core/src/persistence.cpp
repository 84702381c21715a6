#include "looppnr/persistence.hpp"

#include <charconv>
#include <sstream>

#include <nlohmann/json.hpp>

namespace looppnr {

using nlohmann::json;

namespace {

std::ofstream open_for_writing(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw PersistenceError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PersistenceError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw PersistenceError("write failed for " + path.string());
}

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"se", e.standard_error}}; }

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) return "nan";
  return {buffer, end};
}

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& records) {
  auto out = open_for_writing(path);
  out << kTrialCsvHeader << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << i << ',' << r.n0_true << ',' << format_double(r.n_est) << ',' << format_double(r.var_est) << ','
        << r.n_mle << ',' << r.rounds << ',' << r.click_count() << ',' << r.seed << '\n';
  }
  finish(out, path);
}

void write_info_trace_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& records) {
  auto out = open_for_writing(path);
  out << kTraceCsvHeader << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& trace = records[i].info_trace;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const auto& t = trace[k];
      out << i << ',' << (k + 1) << ',' << t.click << ',' << format_double(t.epsilon) << ','
          << format_double(t.info_gained) << ',' << format_double(t.info_available) << ','
          << format_double(t.expected_loop_photons) << '\n';
    }
  }
  finish(out, path);
}

void write_kernel_csv(const std::filesystem::path& path, const TransitionKernel& kernel) {
  auto out = open_for_writing(path);
  const char* names[2] = {"r0", "r1"};
  for (int d = 0; d < 2; ++d) {
    const Matrix& r = kernel.outcome(d);
    out << "# " << names[d] << " epsilon=" << format_double(kernel.epsilon) << '\n';
    for (Eigen::Index m = 0; m < r.rows(); ++m) {
      for (Eigen::Index n = 0; n < r.cols(); ++n) {
        if (n > 0) out << ',';
        out << format_double(r(m, n));
      }
      out << '\n';
    }
  }
  finish(out, path);
}

void write_summary_json(const std::filesystem::path& path, const RunConfig& config,
                        const std::vector<EnsembleSummary>& cells, const std::vector<std::string>& trial_files) {
  json doc;
  doc["master_seed"] = config.ensemble.master_seed;
  doc["config"] = json::parse(to_json_text(config));
  json list = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    json cell = {
        {"cell", i},
        {"eta", c.eta},
        {"gamma", config.ensemble.params.gamma},
        {"nu", config.ensemble.params.nu},
        {"n_max", config.ensemble.params.n_max},
        {"policy", c.policy.label()},
        {"policy_kind", c.policy.kind == PolicySpec::Kind::passive ? "passive" : "adaptive"},
        {"n0", c.n0},
        {"n_trials", c.n_trials},
        {"mean_est", estimate_json(c.mean_est)},
        {"mean_var_est", estimate_json(c.mean_var_est)},
        {"var_of_est", estimate_json(c.var_of_est)},
        {"mse", estimate_json(c.mse)},
        {"bias", estimate_json(c.bias)},
        {"mean_rounds", estimate_json(c.mean_rounds)},
        {"mean_clicks", estimate_json(c.mean_clicks)},
        {"shot_noise_mse", c.shot_noise_mse},
        {"optimal_variance", c.optimal_variance},
    };
    if (c.policy.kind == PolicySpec::Kind::passive) cell["epsilon"] = c.policy.epsilon;
    if (i < trial_files.size()) cell["trials_file"] = trial_files[i];
    list.push_back(std::move(cell));
  }
  doc["cells"] = std::move(list);

  auto out = open_for_writing(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<EnsembleSummary>& cells) {
  auto out = open_for_writing(path);
  out << "eta,policy,n0,n_trials,mean_est,mean_est_se,mean_var_est,var_of_est,var_of_est_se,mse,mse_se,bias,"
         "bias_se,mean_rounds,mean_rounds_se,mean_clicks,shot_noise_mse,optimal_variance\n";
  for (const auto& c : cells) {
    out << format_double(c.eta) << ',' << c.policy.label() << ',' << c.n0 << ',' << c.n_trials << ','
        << format_double(c.mean_est.value) << ',' << format_double(c.mean_est.standard_error) << ','
        << format_double(c.mean_var_est.value) << ',' << format_double(c.var_of_est.value) << ','
        << format_double(c.var_of_est.standard_error) << ',' << format_double(c.mse.value) << ','
        << format_double(c.mse.standard_error) << ',' << format_double(c.bias.value) << ','
        << format_double(c.bias.standard_error) << ',' << format_double(c.mean_rounds.value) << ','
        << format_double(c.mean_rounds.standard_error) << ',' << format_double(c.mean_clicks.value) << ','
        << format_double(c.shot_noise_mse) << ',' << format_double(c.optimal_variance) << '\n';
  }
  finish(out, path);
}

BeliefCsvWriter::BeliefCsvWriter(const std::filesystem::path& path, std::size_t dimension)
    : path_(path), out_(open_for_writing(path)), dimension_(dimension) {
  out_ << "round";
  for (std::size_t m = 0; m < dimension_; ++m) {
    for (std::size_t n = 0; n < dimension_; ++n) out_ << ",p_" << m << '_' << n;
  }
  out_ << '\n';
}

void BeliefCsvWriter::write(const BeliefMatrix& belief) {
  if (belief.dimension() != dimension_) throw InvalidArgument("belief dump: dimension changed mid-trial");
  out_ << belief.round_index();
  const Matrix& j = belief.joint();
  for (Eigen::Index m = 0; m < j.rows(); ++m) {
    for (Eigen::Index n = 0; n < j.cols(); ++n) out_ << ',' << format_double(j(m, n));
  }
  out_ << '\n';
  out_.flush();
  if (!out_) throw PersistenceError("write failed for " + path_.string());
}

}  // namespace looppnr
