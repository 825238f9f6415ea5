// Command line front end: subcommands wrapping the distance, alignment, and
// batch-analysis operations, with CSV/JSON file I/O.
//
// Exit codes: 0 success, 2 input parse error, 3 config/dimension error,
// 4 numerical non-convergence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "io.hpp"
#include "riswie/alignment.hpp"
#include "riswie/analysis.hpp"
#include "riswie/distance.hpp"
#include "riswie/errors.hpp"
#include "riswie/point_cloud.hpp"

namespace {

using nlohmann::ordered_json;
using namespace riswie;
using tool::emit;
using tool::format_double;

struct EmbeddingOpts {
  std::string kind = "pca";
  int axes = 0;  // 0 = auto
  int neighbors = 0;
  double epsilon = 0.0;
  double time = 1.0;

  EmbeddingConfig to_config() const {
    EmbeddingConfig config;
    if (kind == "pca") {
      config.kind = EmbeddingKind::pca;
    } else if (kind == "diffusion") {
      config.kind = EmbeddingKind::diffusion;
    } else {
      config.kind = EmbeddingKind::coordinate;
    }
    config.k = axes;
    config.diffusion.neighbors = neighbors;
    config.diffusion.epsilon = epsilon;
    config.diffusion.time = time;
    return config;
  }
};

void add_embedding_options(CLI::App* cmd, EmbeddingOpts& opts) {
  cmd->add_option("--embedding", opts.kind, "Embedding kind")
      ->check(CLI::IsMember({"pca", "diffusion", "coordinate"}))
      ->capture_default_str();
  cmd->add_option("--axes", opts.axes,
                  "Number of embedding axes k (0 = smallest cloud dimension)");
  cmd->add_option("--neighbors", opts.neighbors,
                  "Diffusion kNN count (0 = ceil(d ln n))");
  cmd->add_option("--epsilon", opts.epsilon,
                  "Diffusion kernel bandwidth (0 = median kNN edge)");
  cmd->add_option("--time", opts.time, "Diffusion time exponent")
      ->capture_default_str();
}

ordered_json match_json(const SignedMatch& match) {
  std::vector<int> one_based;
  one_based.reserve(match.permutation.size());
  for (const int target : match.permutation) one_based.push_back(target + 1);
  ordered_json j;
  j["permutation"] = one_based;
  j["signs"] = match.signs;
  j["pair_costs"] = match.pair_costs;
  return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- dist ----

struct DistArgs {
  std::string path_a;
  std::string path_b;
  EmbeddingOpts embedding;
  std::string out;
};

void run_dist(const DistArgs& args) {
  const PointCloud a = tool::read_cloud_csv(args.path_a);
  const PointCloud b = tool::read_cloud_csv(args.path_b);
  const RiswieResult r = riswie_distance(a, b, args.embedding.to_config());

  ordered_json j;
  j["distance"] = r.distance;
  j["squared"] = r.squared;
  j["k"] = r.k;
  const ordered_json m = match_json(r.match);
  j["permutation"] = m["permutation"];
  j["signs"] = m["signs"];
  j["pair_costs"] = m["pair_costs"];
  emit(args.out, dump(j));
}

// -------------------------------------------------------------- matrix ----

struct MatrixArgs {
  std::vector<std::string> inputs;
  EmbeddingOpts embedding;
  bool soft = false;
  double beta = 0.0;
  double eps = 0.0;
  int jobs = 0;
  std::string out;
  std::string meta;
};

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  namespace fs = std::filesystem;
  if (inputs.size() == 1 && fs::is_directory(inputs[0])) {
    std::vector<std::string> found;
    for (const auto& entry : fs::directory_iterator(inputs[0])) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        found.push_back(entry.path().string());
      }
    }
    std::sort(found.begin(), found.end());
    if (found.empty()) {
      throw Error(ErrorCode::parse,
                  inputs[0] + ": directory contains no .csv files");
    }
    return found;
  }
  return inputs;
}

void run_matrix(const MatrixArgs& args) {
  const std::vector<std::string> paths = expand_inputs(args.inputs);
  std::vector<PointCloud> clouds;
  clouds.reserve(paths.size());
  for (const auto& path : paths) {
    PointCloud cloud = tool::read_cloud_csv(path);
    cloud.id = std::filesystem::path(path).stem().string();
    for (const auto& existing : clouds) {
      if (existing.id == cloud.id) {
        throw Error(ErrorCode::bad_spec,
                    "duplicate cloud id '" + cloud.id + "' (from " + path + ")");
      }
    }
    clouds.push_back(std::move(cloud));
  }

  PairwiseConfig config;
  config.embedding = args.embedding.to_config();
  config.soft = args.soft;
  config.soft_params.beta = args.beta;
  config.soft_params.eps = args.eps;
  config.jobs = args.jobs;
  const DistanceMatrix matrix = pairwise_matrix(clouds, config);

  emit(args.out, tool::matrix_to_csv(matrix));
  if (!args.meta.empty()) {
    ordered_json j;
    j["ids"] = matrix.ids;
    j["embedding"] = {{"kind", args.embedding.kind},
                      {"axes", args.embedding.axes},
                      {"neighbors", args.embedding.neighbors},
                      {"epsilon", args.embedding.epsilon},
                      {"time", args.embedding.time}};
    j["soft"] = args.soft;
    if (args.soft) {
      j["beta"] = args.beta;
      j["eps"] = args.eps;
    }
    tool::write_text(args.meta, dump(j));
  }
}

// --------------------------------------------------------------- align ----

struct AlignArgs {
  std::string path_a;
  std::string path_b;
  std::string out;
  std::string transform;
};

void run_align(const AlignArgs& args) {
  const PointCloud a = tool::read_cloud_csv(args.path_a);
  const PointCloud b = tool::read_cloud_csv(args.path_b);
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "clouds must share an ambient dimension to align (" +
                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) +
                    ")");
  }

  EmbeddingConfig config;
  config.kind = EmbeddingKind::pca;
  config.k = static_cast<int>(a.dim());
  const RiswieResult r = riswie_distance(a, b, config);
  const RigidTransform transform =
      recover_transform(r.basis_x, r.basis_y, r.match,
                        weighted_mean(a).transpose(),
                        weighted_mean(b).transpose());
  const PointCloud aligned = transform.apply(b);

  tool::write_text(args.out, tool::cloud_to_csv(aligned.points));

  std::vector<double> rotation;
  rotation.reserve(
      static_cast<std::size_t>(transform.rotation.size()));
  for (Eigen::Index i = 0; i < transform.rotation.rows(); ++i) {
    for (Eigen::Index j = 0; j < transform.rotation.cols(); ++j) {
      rotation.push_back(transform.rotation(i, j));
    }
  }
  ordered_json j;
  j["rotation"] = rotation;  // row-major d*d
  j["translation"] = std::vector<double>(
      transform.translation.data(),
      transform.translation.data() + transform.translation.size());
  const ordered_json m = match_json(r.match);
  j["permutation"] = m["permutation"];
  j["signs"] = m["signs"];
  j["det"] = transform.determinant();
  emit(args.transform, dump(j));
}

// -------------------------------------------------------------- stacks ----

struct StacksArgs {
  std::string matrix_path;
  int stack_count = 0;
  std::string labels;
  int restarts = 0;
  std::uint64_t seed = 0;
  std::string out;
};

void run_stacks(const StacksArgs& args) {
  const DistanceMatrix matrix = tool::read_matrix_csv(args.matrix_path);
  const StackAssignment assignment =
      stack_assign(matrix, args.stack_count, args.restarts, args.seed);

  std::string csv = "id,stack\n";
  for (std::size_t i = 0; i < matrix.ids.size(); ++i) {
    csv += matrix.ids[i];
    csv += ',';
    csv += std::to_string(assignment.stack_of[i] + 1);  // stacks named 1..K
    csv += '\n';
  }
  emit(args.out, csv);

  if (!args.labels.empty()) {
    const std::vector<std::string> truth =
        tool::read_labels_csv(args.labels, matrix.ids);
    ordered_json j;
    j["cost"] = assignment.cost;
    j["accuracy"] = match_accuracy(assignment, truth);
    std::cout << dump(j);
  }
}

// -------------------------------------------------------------- hybrid ----

struct HybridArgs {
  std::string spatial_path;
  std::string marker_path;
  double lambda = 0.5;
  std::string out;
};

void run_hybrid(const HybridArgs& args) {
  const DistanceMatrix spatial = tool::read_matrix_csv(args.spatial_path);
  const DistanceMatrix marker = tool::read_matrix_csv(args.marker_path);
  const HybridMatrix blended = hybrid_matrix(spatial, marker, args.lambda);
  if (blended.spatial_degenerate) {
    std::cerr << "warning: spatial matrix has constant off-diagonal entries; "
                 "its normalized copy is all zeros\n";
  }
  if (blended.marker_degenerate) {
    std::cerr << "warning: marker matrix has constant off-diagonal entries; "
                 "its normalized copy is all zeros\n";
  }
  emit(args.out, tool::matrix_to_csv(blended.matrix));
}

// --------------------------------------------------------------- agree ----

struct AgreeArgs {
  std::string first_path;
  std::string second_path;
  double min_sep = 0.0;
  std::string out;
};

void run_agree(const AgreeArgs& args) {
  const DistanceMatrix first = tool::read_matrix_csv(args.first_path);
  const DistanceMatrix second = tool::read_matrix_csv(args.second_path);
  const OrderingAgreement agreement =
      ordering_agreement(first, second, args.min_sep);
  ordered_json j;
  j["fraction"] = agreement.fraction;  // null when nothing passed the filter
  j["compared"] = agreement.compared;
  j["mean_abs_percentile_diff"] = agreement.mean_abs_percentile_gap;
  emit(args.out, dump(j));
}

// ------------------------------------------------------------- biasvar ----

struct BiasvarArgs {
  std::string spec_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 0;
  std::string out;
};

BiasVarianceSpec parse_biasvar_spec(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(tool::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, path + ": " + e.what());
  }

  BiasVarianceSpec spec;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "dims") {
        spec.dims = value.get<std::vector<int>>();
      } else if (key == "sample_sizes") {
        spec.sample_sizes = value.get<std::vector<int>>();
      } else if (key == "trials") {
        spec.trials = value.get<int>();
      } else if (key == "spectrum_a") {
        spec.spectrum_a = value.get<std::vector<double>>();
      } else if (key == "spectrum_b") {
        spec.spectrum_b = value.get<std::vector<double>>();
      } else if (key == "seed") {
        spec.seed = value.get<std::uint64_t>();
      } else {
        throw Error(ErrorCode::parse, path + ": unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, path + ": " + e.what());
  }
  if (!j.contains("dims") || !j.contains("sample_sizes") ||
      !j.contains("spectrum_a") || !j.contains("spectrum_b")) {
    throw Error(ErrorCode::parse,
                path +
                    ": required keys: dims, sample_sizes, spectrum_a, "
                    "spectrum_b (optional: trials, seed)");
  }
  return spec;
}

void run_biasvar(const BiasvarArgs& args) {
  BiasVarianceSpec spec = parse_biasvar_spec(args.spec_path);
  if (args.seed_given) spec.seed = args.seed;
  spec.jobs = args.jobs;
  const std::vector<BiasVarianceRow> rows = bias_variance_experiment(spec);

  std::string csv = "d,n,mean,bias,variance,alpha_bias,alpha_var\n";
  for (const auto& row : rows) {
    csv += std::to_string(row.dim);
    csv += ',';
    csv += std::to_string(row.n);
    csv += ',';
    csv += format_double(row.mean_distance);
    csv += ',';
    csv += format_double(row.bias);
    csv += ',';
    csv += format_double(row.variance);
    csv += ',';
    csv += format_double(row.alpha_bias);
    csv += ',';
    csv += format_double(row.alpha_var);
    csv += '\n';
  }
  emit(args.out, csv);
}

// ------------------------------------------------------------ gaussian ----

struct GaussianArgs {
  std::vector<double> spectrum_a;
  std::vector<double> spectrum_b;
  double e_norm = -1.0;  // <0 = derive from the spectra
  std::string out;
};

void run_gaussian(const GaussianArgs& args) {
  const GaussianSpec a = GaussianSpec::from_eigenvalues(args.spectrum_a);
  const GaussianSpec b = GaussianSpec::from_eigenvalues(args.spectrum_b);
  const double distance = gaussian_closed_form(a, b);
  const GwBounds bounds = gw_bounds(a, b);

  ordered_json j;
  j["D"] = distance;
  j["D2"] = distance * distance;
  j["lgw2"] = bounds.lgw2;
  j["ggw2"] = bounds.ggw2;
  j["alpha"] = bounds.alpha;
  if (bounds.alpha > 0.0) {
    j["bound_i_rhs_at_ggw"] = bounds.bound_i_rhs(bounds.ggw2);
  } else {
    j["bound_i_rhs_at_ggw"] = nullptr;  // rank-deficient on both sides
  }
  const BoundValue second = bounds.bound_ii_rhs(bounds.ggw2);
  j["bound_ii_rhs_at_ggw"] = second.value;
  j["bound_ii_clamped"] = second.radicand_clamped;

  // Stability: lambda_min over both spectra; the perturbation norm defaults
  // to the largest per-axis spectrum gap (the smallest ||E||_2 consistent
  // with the two spectra, by Weyl's inequality).
  const double lambda_min =
      std::min(a.eigenvalues.minCoeff(), b.eigenvalues.minCoeff());
  double e_norm = args.e_norm;
  if (e_norm < 0.0) {
    e_norm = 0.0;
    const int d = std::min(a.dim(), b.dim());
    for (int i = 0; i < d; ++i) {
      e_norm = std::max(e_norm, std::abs(a.eigenvalues[i] - b.eigenvalues[i]));
    }
  }
  ordered_json stability;
  stability["lambda_min"] = lambda_min;
  stability["e_norm"] = e_norm;
  if (lambda_min > 0.0) {
    stability["bound"] = stability_bound(lambda_min, e_norm);
  } else {
    stability["bound"] = nullptr;
  }
  j["stability"] = stability;
  emit(args.out, dump(j));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Rigid-invariant sliced transport distances between point clouds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "riswie 0.1.0");

  DistArgs dist_args;
  auto* dist = app.add_subcommand(
      "dist", "Distance between two point-cloud CSV files (JSON output)");
  dist->add_option("A", dist_args.path_a, "First cloud CSV")->required();
  dist->add_option("B", dist_args.path_b, "Second cloud CSV")->required();
  add_embedding_options(dist, dist_args.embedding);
  dist->add_option("--out", dist_args.out, "Write JSON here instead of stdout");
  dist->callback([&] { run_dist(dist_args); });

  MatrixArgs matrix_args;
  auto* matrix = app.add_subcommand(
      "matrix", "Pairwise distance matrix over cloud CSVs (CSV output)");
  matrix
      ->add_option("inputs", matrix_args.inputs,
                   "Cloud CSV files, or a single directory of them")
      ->required();
  add_embedding_options(matrix, matrix_args.embedding);
  matrix->add_flag("--soft", matrix_args.soft,
                   "Entropic soft distance instead of the hard assignment");
  matrix->add_option("--beta", matrix_args.beta,
                     "Soft mode: sigmoid sharpness (0 = 10/median gap)");
  matrix->add_option("--eps", matrix_args.eps,
                     "Soft mode: entropic weight (0 = 1e-2 * mean cost)");
  matrix->add_option("--jobs", matrix_args.jobs,
                     "Worker threads (0 = RISWIE_JOBS env or logical cores)");
  matrix->add_option("--out", matrix_args.out,
                     "Write CSV here instead of stdout");
  matrix->add_option("--meta", matrix_args.meta,
                     "Also write run metadata JSON to this path");
  matrix->callback([&] { run_matrix(matrix_args); });

  AlignArgs align_args;
  auto* align = app.add_subcommand(
      "align", "Rigidly align B onto A (aligned CSV + transform JSON)");
  align->add_option("A", align_args.path_a, "Reference cloud CSV")->required();
  align->add_option("B", align_args.path_b, "Cloud to align CSV")->required();
  align->add_option("--out", align_args.out, "Aligned copy of B (CSV)")
      ->required();
  align->add_option("--transform", align_args.transform,
                    "Write transform JSON here instead of stdout");
  align->callback([&] { run_align(align_args); });

  StacksArgs stacks_args;
  auto* stacks = app.add_subcommand(
      "stacks", "Balanced stack assignment from a distance matrix");
  stacks->add_option("matrix", stacks_args.matrix_path, "Distance matrix CSV")
      ->required();
  stacks->add_option("K", stacks_args.stack_count, "Number of stacks")
      ->required();
  stacks->add_option("--labels", stacks_args.labels,
                     "Truth labels CSV; prints cost/accuracy JSON to stdout");
  stacks->add_option("--restarts", stacks_args.restarts,
                     "Extra random seed sets beyond the per-item starts");
  stacks->add_option("--seed", stacks_args.seed, "Seed for random restarts");
  stacks->add_option("--out", stacks_args.out,
                     "Write assignment CSV here instead of stdout");
  stacks->callback([&] { run_stacks(stacks_args); });

  HybridArgs hybrid_args;
  auto* hybrid = app.add_subcommand(
      "hybrid", "Blend two distance matrices after min-max normalization");
  hybrid
      ->add_option("spatial", hybrid_args.spatial_path,
                   "Spatial distance matrix CSV")
      ->required();
  hybrid
      ->add_option("marker", hybrid_args.marker_path,
                   "Marker distance matrix CSV")
      ->required();
  hybrid->add_option("--lambda", hybrid_args.lambda,
                     "Weight on the spatial matrix, in [0,1]")
      ->required();
  hybrid->add_option("--out", hybrid_args.out,
                     "Write CSV here instead of stdout");
  hybrid->callback([&] { run_hybrid(hybrid_args); });

  AgreeArgs agree_args;
  auto* agree = app.add_subcommand(
      "agree", "Ordering agreement between two distance matrices (JSON)");
  agree->add_option("first", agree_args.first_path, "First matrix CSV")
      ->required();
  agree->add_option("second", agree_args.second_path, "Second matrix CSV")
      ->required();
  agree->add_option("--min-sep", agree_args.min_sep,
                    "Only compare entry pairs separated by at least this many "
                    "sample standard deviations of the first matrix");
  agree->add_option("--out", agree_args.out,
                    "Write JSON here instead of stdout");
  agree->callback([&] { run_agree(agree_args); });

  BiasvarArgs biasvar_args;
  auto* biasvar = app.add_subcommand(
      "biasvar", "Bias/variance scaling experiment from a JSON spec (CSV)");
  biasvar->add_option("spec", biasvar_args.spec_path, "Experiment spec JSON")
      ->required();
  auto* biasvar_seed =
      biasvar->add_option("--seed", biasvar_args.seed,
                          "Override the seed from the spec file");
  biasvar->add_option("--jobs", biasvar_args.jobs,
                      "Worker threads (0 = RISWIE_JOBS env or logical cores)");
  biasvar->add_option("--out", biasvar_args.out,
                      "Write CSV here instead of stdout");
  biasvar->callback([&] {
    biasvar_args.seed_given = biasvar_seed->count() > 0;
    run_biasvar(biasvar_args);
  });

  GaussianArgs gaussian_args;
  auto* gaussian = app.add_subcommand(
      "gaussian", "Closed form, GW bounds, and stability for two spectra");
  gaussian
      ->add_option("--a", gaussian_args.spectrum_a,
                   "First covariance spectrum, comma separated")
      ->required()
      ->delimiter(',');
  gaussian
      ->add_option("--b", gaussian_args.spectrum_b,
                   "Second covariance spectrum, comma separated")
      ->required()
      ->delimiter(',');
  gaussian->add_option(
      "--enorm", gaussian_args.e_norm,
      "Perturbation spectral norm for the stability bound (default: largest "
      "per-axis spectrum gap)");
  gaussian->add_option("--out", gaussian_args.out,
                       "Write JSON here instead of stdout");
  gaussian->callback([&] { run_gaussian(gaussian_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;  // bad flags/usage are config errors
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
