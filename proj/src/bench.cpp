#include "sympmor/bench.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sympmor::bench {

namespace {

constexpr std::uint64_t kTestParameterStream = 1;
constexpr std::uint64_t kSketchStream = 2;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, delim)) {
    parts.push_back(item);
  }
  return parts;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

long long parse_int(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const std::string t = trim(text);
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end == t.c_str() || *end != '\0') {
    throw ValidationError("malformed integer for " + what + ": '" + text + "'");
  }
  return v;
}

double parse_double(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const std::string t = trim(text);
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end == t.c_str() || *end != '\0') {
    throw ValidationError("malformed number for " + what + ": '" + text + "'");
  }
  return v;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string MethodSpec::label() const {
  std::string name = sympbasis::to_string(tag);
  if (randomized()) {
    name += "_povs" + std::to_string(p_ovs) + "_qpow" + std::to_string(q_pow);
    if (tag == sympbasis::MethodTag::kRcsvd &&
        kind == matkit::SketchKind::kGaussian) {
      name += "_gaussian";
    }
  }
  return name;
}

MethodSpec parse_method_descriptor(const std::string& text) {
  const std::string body = trim(text);
  const auto colon = body.find(':');
  MethodSpec spec;
  spec.tag = sympbasis::method_tag_from_string(
      colon == std::string::npos ? body : body.substr(0, colon));
  if (colon != std::string::npos) {
    if (!spec.randomized()) {
      throw ValidationError("method " + body.substr(0, colon) +
                            " takes no sketch parameters");
    }
    for (const std::string& kv : split(body.substr(colon + 1), ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw ValidationError("malformed method parameter: '" + kv + "'");
      }
      const std::string key = trim(kv.substr(0, eq));
      const std::string value = trim(kv.substr(eq + 1));
      if (key == "povs") {
        spec.p_ovs = parse_int(value, "povs");
        if (spec.p_ovs < 0) throw ValidationError("povs must be nonnegative");
      } else if (key == "qpow") {
        spec.q_pow = static_cast<int>(parse_int(value, "qpow"));
        if (spec.q_pow < 0) throw ValidationError("qpow must be nonnegative");
      } else if (key == "kind") {
        if (spec.tag != sympbasis::MethodTag::kRcsvd) {
          throw ValidationError("kind applies to rcSVD only");
        }
        if (value == "srft") {
          spec.kind = matkit::SketchKind::kSrft;
        } else if (value == "gaussian") {
          spec.kind = matkit::SketchKind::kGaussian;
        } else {
          throw ValidationError("unknown sketch kind: '" + value + "'");
        }
      } else {
        throw ValidationError("unknown method parameter: '" + key + "'");
      }
    }
  }
  return spec;
}

std::vector<MethodSpec> default_methods() {
  using sympbasis::MethodTag;
  std::vector<MethodSpec> methods;
  for (const MethodTag tag :
       {MethodTag::kCsvdFull, MethodTag::kCsvdPartial, MethodTag::kCsvdEig,
        MethodTag::kSvdLike}) {
    methods.push_back({tag, 0, 0});
  }
  for (const MethodTag tag :
       {MethodTag::kRcsvd, MethodTag::kRsvdLikeK, MethodTag::kRsvdLikeXs,
        MethodTag::kRsvdLikeKXs}) {
    for (const Index povs : {0, 10, 30}) {
      for (const int qpow : {0, 1}) {
        methods.push_back({tag, povs, qpow});
      }
    }
  }
  return methods;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.grid.n_x1 < 3 || cfg.grid.n_x2 < 3) {
    throw ValidationError("config: grid must be at least 3x3");
  }
  if (cfg.n_t < 1) {
    throw ValidationError("config: nt must be at least 1");
  }
  if (cfg.training_mus.empty()) {
    throw ValidationError("config: training parameter list is empty");
  }
  if (cfg.test_mu_count < 1) {
    throw ValidationError("config: test-mus must be at least 1");
  }
  if (cfg.sketch_seed_count < 1) {
    throw ValidationError("config: sketch-seeds must be at least 1");
  }
  if (cfg.basis_sizes.empty()) {
    throw ValidationError("config: basis size list is empty");
  }
  for (const Index size : cfg.basis_sizes) {
    if (size < 2 || size % 2 != 0) {
      throw ValidationError("config: basis sizes must be even and positive");
    }
  }
  if (!(cfg.test_mu_range[0] <= cfg.test_mu_range[1])) {
    throw ValidationError("config: test-mu-range must be ordered");
  }
}

std::vector<double> draw_test_parameters(const ExperimentConfig& cfg) {
  const matkit::CounterRng rng(
      matkit::derive_seed(cfg.master_seed, kTestParameterStream));
  std::vector<double> mus(static_cast<std::size_t>(cfg.test_mu_count));
  const double lo = cfg.test_mu_range[0];
  const double hi = cfg.test_mu_range[1];
  for (Index i = 0; i < cfg.test_mu_count; ++i) {
    mus[static_cast<std::size_t>(i)] =
        lo + rng.uniform01(static_cast<std::uint64_t>(i)) * (hi - lo);
  }
  return mus;
}

std::uint64_t sketch_seed(std::uint64_t master_seed, Index method_index,
                          Index rbsize, Index repetition) {
  std::uint64_t s = matkit::derive_seed(master_seed, kSketchStream);
  s = matkit::derive_seed(s, static_cast<std::uint64_t>(method_index));
  s = matkit::derive_seed(s, static_cast<std::uint64_t>(rbsize));
  return matkit::derive_seed(s, static_cast<std::uint64_t>(repetition));
}

sympbasis::SymplecticBasis generate_basis(const MethodSpec& method,
                                          const RealMatrix& snapshots, Index k,
                                          std::uint64_t seed) {
  using sympbasis::MethodTag;
  switch (method.tag) {
    case MethodTag::kCsvdFull:
      return sympbasis::csvd_basis(snapshots, k, sympbasis::CsvdVariant::kFull);
    case MethodTag::kCsvdPartial:
      return sympbasis::csvd_basis(snapshots, k,
                                   sympbasis::CsvdVariant::kPartial);
    case MethodTag::kCsvdEig:
      return sympbasis::csvd_basis(snapshots, k, sympbasis::CsvdVariant::kEig);
    case MethodTag::kRcsvd: {
      matkit::SketchSpec spec;
      spec.target_rank = k;
      spec.oversampling = method.p_ovs;
      spec.power_iterations = method.q_pow;
      spec.kind = method.kind;
      spec.seed = seed;
      return sympbasis::rcsvd_basis(snapshots, k, spec);
    }
    case MethodTag::kSvdLike:
      return sympbasis::svd_like_basis(snapshots, k).first;
    case MethodTag::kRsvdLikeK:
      return sympbasis::rsvd_like_basis(snapshots, k, method.p_ovs,
                                        method.q_pow,
                                        sympbasis::SketchVariant::kK, seed)
          .first;
    case MethodTag::kRsvdLikeXs:
      return sympbasis::rsvd_like_basis(snapshots, k, method.p_ovs,
                                        method.q_pow,
                                        sympbasis::SketchVariant::kXs, seed)
          .first;
    case MethodTag::kRsvdLikeKXs:
      return sympbasis::rsvd_like_basis(snapshots, k, method.p_ovs,
                                        method.q_pow,
                                        sympbasis::SketchVariant::kKXs, seed)
          .first;
  }
  throw ValidationError("generate_basis: unknown method tag");
}

MethodResults run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  MethodResults results;
  if (cfg.methods.empty()) {
    return results;
  }

  if (cfg.grid.point_count() >= 10000) {
    std::cerr << "[bench] full-scale configuration (N = "
              << cfg.grid.point_count() << "); expect minutes-to-hours\n";
  }

  const hamsys::LinearHamiltonianSystem sys = hamsys::discretize_wave(cfg.grid);
  std::cerr << "[bench] collecting snapshots: " << cfg.training_mus.size()
            << " parameters x " << cfg.n_t << " steps\n";
  const hamsys::SnapshotMatrix snaps =
      hamsys::collect_snapshots(sys, cfg.training_mus, cfg.n_t);

  const std::vector<double> test_mus = draw_test_parameters(cfg);
  std::vector<hamsys::Trajectory> fom;
  fom.reserve(test_mus.size());
  for (const double mu : test_mus) {
    fom.push_back(hamsys::integrate_midpoint(sys, mu, cfg.n_t));
  }

  for (Index mi = 0; mi < static_cast<Index>(cfg.methods.size()); ++mi) {
    const MethodSpec& method = cfg.methods[static_cast<std::size_t>(mi)];
    std::vector<ResultRow> rows;
    for (const Index rbsize : cfg.basis_sizes) {
      const Index k = rbsize / 2;
      const Index reps = method.randomized() ? cfg.sketch_seed_count : 1;
      double gen_seconds = 0.0;
      double rom_seconds = 0.0;
      double err_sum = 0.0;
      Index err_count = 0;
      bool failed = false;
      for (Index rep = 0; rep < reps && !failed; ++rep) {
        const std::uint64_t seed = sketch_seed(cfg.master_seed, mi, rbsize, rep);
        try {
          const auto start = std::chrono::steady_clock::now();
          auto basis = std::make_shared<const sympbasis::SymplecticBasis>(
              generate_basis(method, snaps.columns, k, seed));
          gen_seconds += elapsed_seconds(start);

          const reduce::ReducedSystem rsys = reduce::reduce_system(sys, basis);
          for (std::size_t t = 0; t < test_mus.size(); ++t) {
            const auto rom_start = std::chrono::steady_clock::now();
            const hamsys::Trajectory rtraj =
                reduce::integrate_reduced(rsys, test_mus[t], cfg.n_t);
            rom_seconds += elapsed_seconds(rom_start);
            err_sum += reduce::relative_error(fom[t], *basis, rtraj);
            ++err_count;
          }
        } catch (const std::exception& e) {
          std::cerr << "[bench] " << method.label() << " rbsize " << rbsize
                    << ": row omitted (" << e.what() << ")\n";
          failed = true;
        }
      }
      if (!failed) {
        ResultRow row;
        row.rbsize = rbsize;
        row.runtime = gen_seconds / static_cast<double>(reps);
        row.relerr = err_sum / static_cast<double>(err_count);
        rows.push_back(row);
        std::cerr << "[bench] " << method.label() << " rbsize " << rbsize
                  << ": relerr " << row.relerr << ", basis gen "
                  << row.runtime << " s, rom solve mean "
                  << rom_seconds / static_cast<double>(err_count) << " s\n";
      }
    }
    results[method.label()] = std::move(rows);
  }
  return results;
}

std::string plot_filename(const MethodSpec& method) {
  return "plot_" + method.label() + ".dat";
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) {
    throw ValidationError("emit_csv: no rows to write");
  }
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("emit_csv: cannot open " + path);
  }
  out << "rbsize,runtime,relerr\n";
  for (const ResultRow& row : rows) {
    out << row.rbsize << ',' << format_double(row.runtime) << ','
        << format_double(row.relerr) << "\n";
  }
  if (!out) {
    throw ValidationError("emit_csv: write failed for " + path);
  }
}

std::vector<ResultRow> parse_result_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("parse_result_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || trim(line) != "rbsize,runtime,relerr") {
    throw ValidationError("parse_result_csv: bad header in " + path);
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw ValidationError("parse_result_csv: bad row in " + path);
    }
    ResultRow row;
    row.rbsize = parse_int(fields[0], "rbsize");
    row.runtime = parse_double(fields[1], "runtime");
    row.relerr = parse_double(fields[2], "relerr");
    rows.push_back(row);
  }
  return rows;
}

void emit_all_csv(const ExperimentConfig& cfg, const MethodResults& results) {
  std::filesystem::create_directories(cfg.output_path);
  for (const MethodSpec& method : cfg.methods) {
    const auto it = results.find(method.label());
    if (it == results.end() || it->second.empty()) {
      std::cerr << "[bench] no rows for " << method.label()
                << "; file not written\n";
      continue;
    }
    const auto path =
        std::filesystem::path(cfg.output_path) / plot_filename(method);
    emit_csv(it->second, path.string());
  }
}

void apply_option(ExperimentConfig& cfg, const std::string& key,
                  const std::string& value) {
  if (key == "grid") {
    const auto parts = split(value, 'x');
    if (parts.size() != 2) {
      throw ValidationError("grid must look like 100x10");
    }
    cfg.grid.n_x1 = parse_int(parts[0], "grid");
    cfg.grid.n_x2 = parse_int(parts[1], "grid");
  } else if (key == "nt") {
    cfg.n_t = parse_int(value, "nt");
  } else if (key == "seed") {
    cfg.master_seed = static_cast<std::uint64_t>(parse_int(value, "seed"));
  } else if (key == "training-mus") {
    cfg.training_mus.clear();
    for (const std::string& item : split(value, ',')) {
      cfg.training_mus.push_back(parse_double(item, "training-mus"));
    }
  } else if (key == "test-mus") {
    cfg.test_mu_count = parse_int(value, "test-mus");
  } else if (key == "test-mu-range") {
    const auto parts = split(value, ',');
    if (parts.size() != 2) {
      throw ValidationError("test-mu-range must look like 1,2");
    }
    cfg.test_mu_range[0] = parse_double(parts[0], "test-mu-range");
    cfg.test_mu_range[1] = parse_double(parts[1], "test-mu-range");
  } else if (key == "sketch-seeds") {
    cfg.sketch_seed_count = parse_int(value, "sketch-seeds");
  } else if (key == "basis-sizes") {
    cfg.basis_sizes.clear();
    for (const std::string& item : split(value, ',')) {
      cfg.basis_sizes.push_back(parse_int(item, "basis-sizes"));
    }
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const std::string& group : split(value, ';')) {
      std::istringstream in(group);
      std::string word;
      while (in >> word) {
        cfg.methods.push_back(parse_method_descriptor(word));
      }
    }
  } else if (key == "out") {
    cfg.output_path = trim(value);
  } else if (key == "paper-scale") {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes") {
      cfg.grid = hamsys::GridConfig{1000, 20, 1.0, 0.2};
      cfg.n_t = 1000;
      cfg.training_mus = {1.0, 2.0};
    } else if (v != "false" && v != "0" && v != "no") {
      throw ValidationError("paper-scale must be a boolean");
    }
  } else {
    throw ValidationError("unknown configuration key: '" + key + "'");
  }
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open config file " + path);
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config file " + path + ":" +
                            std::to_string(lineno) + ": expected key=value");
    }
    apply_option(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

ExperimentConfig parse_config(
    const std::vector<std::pair<std::string, std::string>>& flags,
    const std::optional<std::string>& config_file) {
  ExperimentConfig cfg;
  if (config_file.has_value()) {
    load_config_file(cfg, *config_file);
  }
  for (const auto& [key, value] : flags) {
    apply_option(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

}  // namespace sympmor::bench
