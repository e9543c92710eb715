#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "candyman/autoencoder.hpp"
#include "candyman/kdtree.hpp"
#include "candyman/kmeans.hpp"
#include "candyman/knn_graph.hpp"
#include "candyman/systems.hpp"
#include "candyman/whitener.hpp"

namespace candyman {

struct ArchSpec {
  std::vector<int> dims;  // full layer dims
  std::vector<Activation> acts;
};

/// Standard architecture of the training recipes: given hidden widths,
/// elu on every gap but the last, which is linear.
ArchSpec make_arch(const std::vector<int>& dims);

enum class AutoencoderMode { Plain, PcaAnchored };

struct ChartFitConfig {
  int latent_dim = 1;
  ArchSpec encoder, decoder;
  TrainConfig train;
  AutoencoderMode mode = AutoencoderMode::Plain;
  double alpha = 1.0;        // PCA-anchored penalty weight
  bool whitening = false;
  double overlap_weight = 1.0;  // weight for points shared between charts

  // A chart map must be a homeomorphism onto its image, but nothing in the
  // reconstruction loss enforces injectivity: a training run can "fold" two
  // distant arcs of the domain onto nearby local coordinates, which poisons
  // the latent dynamics. Charts whose fold score (see chart_fold_score)
  // exceeds the threshold are retrained from a different initialization,
  // deterministically, up to `restarts` attempts; the best-scoring map wins.
  int restarts = 8;
  double fold_threshold = 3.0;
};

/// Coordinate domain membership plus coordinate map, approximate inverse,
/// and optional whitening normalizer. Local coordinates are whitened
/// encoder outputs when a whitener is present.
struct Chart {
  int id = 0;
  int latent_dim = 0;
  std::vector<int> interior;  // sorted dataset indices
  std::vector<int> border;    // sorted, disjoint from interior
  std::vector<int> members;   // interior followed by border, sorted overall
  std::shared_ptr<CoordMap> map;
  std::optional<Whitener> whitener;

  Mat member_local;  // |members| x latent_dim, local coords of member points
  std::shared_ptr<KdTree> member_tree;
  std::vector<double> member_recon_err;  // ambient reconstruction error
  double max_recon_err = 0.0;
  double recon_mse = 0.0;
  double fold_score = 0.0;
  int restarts_used = 0;
  LossReport training;

  Vec local_coords(const Vec& ambient) const;
  Vec reconstruct(const Vec& local) const;
  Mat local_coords_batch(const Mat& ambient_cols) const;

  bool is_interior_index(int dataset_index) const;
};

struct AtlasConfig {
  int n_charts = 3;
  int knn = 4;
  int expansion_rounds = 2;
  ChartFitConfig chart;
  std::uint64_t seed = 0;
  int jobs = 1;
  int kmeans_max_iters = 300;
};

/// The collection of charts plus the clustering artifacts needed for chart
/// assignment. Immutable after construction; safe to share read-only.
struct Atlas {
  std::vector<Chart> charts;
  Mat centroids;               // k x m
  Mat points;                  // training points, N x m
  std::vector<int> interior_of;  // N -> owning chart id
  KnnGraph graph;
  std::string fingerprint;
  double dt = 0.0;

  int n_charts() const { return static_cast<int>(charts.size()); }
  int ambient_dim() const { return static_cast<int>(points.cols()); }
  int size() const { return static_cast<int>(points.rows()); }
};

/// Continuity defect of a coordinate map on its members, evaluated on the
/// chart's successor pairs. Two scale-invariant components, the worse one
/// wins: the 90th percentile of local Lipschitz ratios of the induced
/// latent one-step map (catches maps that interleave distant branches of
/// the domain), and the worst-over-median latent displacement per step
/// (catches maps that tear the domain with one giant mid-chart jump). A
/// homeomorphic chart of a smooth flow scores near 1-2.
double chart_fold_score(const Dataset& dataset, const std::vector<int>& members,
                        const Mat& data_cols, const Mat& latent_cols);

/// Fold-free 1-D anchoring targets: position of each member along the
/// successor chains of the chart's trajectory, scaled to [-1, 1] in
/// visiting order.
Vec chain_positions(const Dataset& dataset, const std::vector<int>& members,
                    const Mat& data_cols);

/// Fold-free 2-D anchoring targets for charts whose data is a trajectory
/// winding through the chart in several parallel strands: coordinate 0 is
/// the position along each strand, coordinate 1 the strand's position
/// along a short closed tour of the strands, cut at its widest gap. Both
/// coordinates are standardized to zero mean and unit RMS; columns align
/// with members.
Mat strand_grid_positions(const Dataset& dataset,
                          const std::vector<int>& members,
                          const Mat& data_cols);

/// Recompute the derived per-chart caches (member local coordinates, the
/// residency search tree, reconstruction statistics) from the training
/// points. Called after fitting and after deserialization.
void finalize_chart_caches(Chart& chart, const Mat& points);

/// Train one chart's coordinate map on its member rows only.
Chart fit_chart(const Dataset& dataset, int chart_id,
                const ChartMembership& membership,
                const std::vector<int>& membership_counts,
                const ChartFitConfig& config);

/// Full pipeline: k-means, kNN graph, expansion, per-chart autoencoders and
/// whiteners. Chart fits run concurrently when config.jobs > 1.
Atlas build_atlas(const Dataset& dataset, const AtlasConfig& config);

/// phi_beta(phi_alpha^inv(z)): convert local coordinates between charts.
/// Only meaningful when the decoded point lies in the overlap.
Vec transition(const Atlas& atlas, int from_chart, int to_chart, const Vec& z);

std::string dataset_fingerprint(const Mat& points);

}  // namespace candyman
