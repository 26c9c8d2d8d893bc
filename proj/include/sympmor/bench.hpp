#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sympmor/reduce.hpp"

namespace sympmor::bench {

/// One basis-generation method instance, e.g. rcSVD with p_ovs=10, q_pow=1.
struct MethodSpec {
  sympbasis::MethodTag tag = sympbasis::MethodTag::kCsvdFull;
  Index p_ovs = 0;
  int q_pow = 0;
  matkit::SketchKind kind = matkit::SketchKind::kSrft;  // rcSVD only

  bool randomized() const { return sympbasis::is_randomized(tag); }
  /// "cSVDFull", "rcSVD_povs10_qpow1", ...
  std::string label() const;
};

/// Parses "TAG" or "TAG:povs=10,qpow=1[,kind=gaussian]".
MethodSpec parse_method_descriptor(const std::string& text);

/// All eight method tags with the benchmark's (p_ovs, q_pow) grid
/// {0, 10, 30} x {0, 1} on the randomized ones.
std::vector<MethodSpec> default_methods();

struct ExperimentConfig {
  hamsys::GridConfig grid{100, 10, 1.0, 0.2};
  Index n_t = 200;
  std::vector<double> training_mus = {1.0, 2.0};
  Index test_mu_count = 10;
  std::array<double, 2> test_mu_range = {1.0, 2.0};
  Index sketch_seed_count = 5;
  std::vector<Index> basis_sizes = {10, 20, 40, 80, 160};
  std::vector<MethodSpec> methods = default_methods();
  std::uint64_t master_seed = 42;
  std::string output_path = "plots";
};

struct ResultRow {
  Index rbsize = 0;
  double runtime = 0.0;
  double relerr = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

using MethodResults = std::map<std::string, std::vector<ResultRow>>;

void validate(const ExperimentConfig& cfg);

/// Uniform draws from test_mu_range, reproducible from master_seed.
std::vector<double> draw_test_parameters(const ExperimentConfig& cfg);

/// Seed fed to the sketch of (method_index, rbsize, repetition).
std::uint64_t sketch_seed(std::uint64_t master_seed, Index method_index,
                          Index rbsize, Index repetition);

/// Generates one basis for the method at half rank k = rbsize/2.
sympbasis::SymplecticBasis generate_basis(const MethodSpec& method,
                                          const RealMatrix& snapshots, Index k,
                                          std::uint64_t seed);

/// Full benchmark pipeline: snapshots once, basis generation timed in
/// isolation (averaged over sketch seeds for randomized methods), relative
/// reduction errors averaged over the test parameters. Rows of failed
/// (method, size) pairs are omitted and the reason logged to stderr.
/// Deterministic in master_seed except for the runtime column.
MethodResults run_experiment(const ExperimentConfig& cfg);

/// "plot_<label>.dat".
std::string plot_filename(const MethodSpec& method);

/// Writes header "rbsize,runtime,relerr" and one row per record. Refuses to
/// create a file for an empty row list.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

/// Exact inverse of emit_csv (doubles round-trip bitwise).
std::vector<ResultRow> parse_result_csv(const std::string& path);

/// Writes one plot file per method into cfg.output_path.
void emit_all_csv(const ExperimentConfig& cfg, const MethodResults& results);

/// Applies one "key=value" setting; throws ValidationError on unknown keys or
/// malformed values. Recognized keys: grid, nt, seed, training-mus,
/// test-mus, test-mu-range, sketch-seeds, basis-sizes, methods, out,
/// paper-scale.
void apply_option(ExperimentConfig& cfg, const std::string& key,
                  const std::string& value);

/// Plain-text key=value configuration ('#' starts a comment).
void load_config_file(ExperimentConfig& cfg, const std::string& path);

/// Defaults, then the config file (if any), then flags, later wins.
ExperimentConfig parse_config(
    const std::vector<std::pair<std::string, std::string>>& flags,
    const std::optional<std::string>& config_file);

}  // namespace sympmor::bench
