#include "candyman/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "candyman/errors.hpp"

namespace candyman {

ArchSpec make_arch(const std::vector<int>& dims) {
  ArchSpec spec;
  spec.dims = dims;
  spec.acts.assign(dims.size() - 1, Activation::Elu);
  spec.acts.back() = Activation::Linear;
  return spec;
}

Vec Chart::local_coords(const Vec& ambient) const {
  Vec z = map->encode(ambient);
  return whitener ? whitener->apply(z) : z;
}

Mat Chart::local_coords_batch(const Mat& ambient_cols) const {
  Mat z = map->encode_batch(ambient_cols);
  return whitener ? whitener->apply_batch(z) : z;
}

Vec Chart::reconstruct(const Vec& local) const {
  return map->decode(whitener ? whitener->invert(local) : local);
}

bool Chart::is_interior_index(int dataset_index) const {
  return std::binary_search(interior.begin(), interior.end(), dataset_index);
}

std::string dataset_fingerprint(const Mat& points) {
  // FNV-1a over the raw coefficient bytes.
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const unsigned char* data, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
      hash ^= data[i];
      hash *= 1099511628211ull;
    }
  };
  const std::int64_t shape[2] = {points.rows(), points.cols()};
  mix(reinterpret_cast<const unsigned char*>(shape), sizeof(shape));
  mix(reinterpret_cast<const unsigned char*>(points.data()),
      sizeof(double) * points.size());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

// Decompose a chart's members into maximal successor chains ("strands"):
// runs of points that follow each other in time without leaving the chart.
// Successors are matched back to member rows exactly, which holds for
// time-series datasets where p' is literally the next sample. Chains are
// walked from their starts (members whose predecessor lies outside the
// chart) in ascending row order; any leftover cycle is broken at its lowest
// row. Deterministic.
std::vector<std::vector<int>> successor_chains(const Dataset& dataset,
                                               const std::vector<int>& members,
                                               const Mat& data_cols) {
  const int n = static_cast<int>(members.size());
  KdTree tree(data_cols.transpose());
  std::vector<int> next(n, -1);
  std::vector<char> has_in(n, 0);
  for (int row = 0; row < n; ++row) {
    const Vec succ = dataset.successors.row(members[row]).transpose();
    const auto [succ_row, dist] = tree.nearest(succ);
    if (dist < 1e-12 && succ_row != row) {
      next[row] = succ_row;
      has_in[succ_row] = 1;
    }
  }
  std::vector<std::vector<int>> chains;
  std::vector<char> visited(n, 0);
  auto walk = [&](int start) {
    std::vector<int> chain;
    for (int cur = start; cur != -1 && !visited[cur]; cur = next[cur]) {
      visited[cur] = 1;
      chain.push_back(cur);
    }
    if (!chain.empty()) chains.push_back(std::move(chain));
  };
  for (int row = 0; row < n; ++row)
    if (!has_in[row]) walk(row);
  for (int row = 0; row < n; ++row)
    if (!visited[row]) walk(row);
  return chains;
}

}  // namespace

Vec chain_positions(const Dataset& dataset, const std::vector<int>& members,
                    const Mat& data_cols) {
  const int n = static_cast<int>(members.size());
  Vec positions(n);
  int k = 0;
  for (const auto& chain : successor_chains(dataset, members, data_cols))
    for (int row : chain)
      positions(row) = n > 1 ? -1.0 + 2.0 * k++ / (n - 1.0) : 0.0;
  return positions;
}

// Injective by construction (strands are disjoint) and turns the one-step
// map into a near-uniform translation, so it cannot interleave
// neighbouring strands the way an unconstrained autoencoder can.
Mat strand_grid_positions(const Dataset& dataset,
                          const std::vector<int>& members,
                          const Mat& data_cols) {
  const int n = static_cast<int>(members.size());
  auto chains = successor_chains(dataset, members, data_cols);

  // Border trimming can drop isolated points out of the middle of an orbit
  // pass, splitting one physical strand into fragments. Re-join chains
  // whose dataset rows nearly touch: they are the same pass, and giving the
  // fragments separate transverse coordinates would tear the targets.
  std::sort(chains.begin(), chains.end(), [&](const auto& a, const auto& b) {
    return members[a.front()] < members[b.front()];
  });
  std::vector<std::vector<int>> merged;
  for (auto& chain : chains) {
    if (!merged.empty() &&
        members[chain.front()] - members[merged.back().back()] <= 3)
      merged.back().insert(merged.back().end(), chain.begin(), chain.end());
    else
      merged.push_back(std::move(chain));
  }
  chains = std::move(merged);
  const int n_chains = static_cast<int>(chains.size());

  // Pairwise strand gap: smallest point-to-point distance.
  Mat gap = Mat::Constant(n_chains, n_chains,
                          std::numeric_limits<double>::infinity());
  for (int a = 0; a < n_chains; ++a)
    for (int b = a + 1; b < n_chains; ++b) {
      double best = gap(a, b);
      for (int i : chains[a])
        for (int j : chains[b])
          best = std::min(best, (data_cols.col(i) - data_cols.col(j)).norm());
      gap(a, b) = gap(b, a) = best;
    }

  // Order the strands along a short closed tour (greedy nearest neighbour
  // plus 2-opt). A tour rather than a path matters: when the strands wind
  // all the way around a closed direction of the manifold, any linear
  // ordering must have a seam where physically adjacent strands get distant
  // coordinates. Cutting the tour at its widest gap puts that seam where
  // the data is sparsest, which is the easiest place for a continuous
  // encoder to approximate the jump.
  std::vector<int> order;
  {
    std::vector<char> used(n_chains, 0);
    int current = 0;
    for (int step = 0; step < n_chains; ++step) {
      order.push_back(current);
      used[current] = 1;
      int best = -1;
      for (int b = 0; b < n_chains; ++b)
        if (!used[b] && (best < 0 || gap(current, b) < gap(current, best)))
          best = b;
      if (best >= 0) current = best;
    }
  }
  const auto tour_edge = [&](int i) {
    return gap(order[i], order[(i + 1) % n_chains]);
  };
  for (bool improved = n_chains > 3; improved;) {
    improved = false;
    for (int i = 0; i < n_chains - 1; ++i)
      for (int j = i + 1; j < n_chains - (i == 0 ? 1 : 0); ++j) {
        // Reversing order[i+1..j] swaps edges (i,i+1),(j,j+1) for (i,j),(i+1,j+1).
        const double before = tour_edge(i) + tour_edge(j);
        const double after = gap(order[i], order[j]) +
                             gap(order[i + 1], order[(j + 1) % n_chains]);
        if (after < before - 1e-12) {
          std::reverse(order.begin() + i + 1, order.begin() + j + 1);
          improved = true;
        }
      }
  }
  int cut = 0;
  for (int i = 1; i < n_chains; ++i)
    if (tour_edge(i) > tour_edge(cut)) cut = i;
  std::rotate(order.begin(), order.begin() + (cut + 1) % n_chains, order.end());

  // Transverse coordinate: cumulative gap distance along the cut tour, so
  // latent spacing between strands tracks their ambient spacing. Gaps are
  // clamped to a band around the median: nearly-touching strands must keep
  // distinct coordinates (the targets have to stay injective), and one huge
  // gap must not flatten the spacing everywhere else.
  std::vector<double> sorted_gaps;
  for (int i = 1; i < n_chains; ++i)
    sorted_gaps.push_back(gap(order[i - 1], order[i]));
  std::sort(sorted_gaps.begin(), sorted_gaps.end());
  const double median_gap =
      sorted_gaps.empty() ? 1.0 : sorted_gaps[sorted_gaps.size() / 2];
  std::vector<double> transverse(n_chains, 0.0);
  for (int i = 1; i < n_chains; ++i) {
    const double g = std::clamp(gap(order[i - 1], order[i]), 0.5 * median_gap,
                                2.0 * median_gap);
    transverse[order[i]] = transverse[order[i - 1]] + g;
  }

  // Longitudinal coordinate from dataset-row offsets, so a merged-over
  // hole keeps its width. Standardized before use in either layout below.
  Vec longitudinal(n);
  for (int s = 0; s < n_chains; ++s) {
    const auto& chain = chains[s];
    const double mid =
        0.5 * (members[chain.back()] - members[chain.front()]);
    for (int idx : chain)
      longitudinal(idx) = members[idx] - members[chain.front()] - mid;
  }
  longitudinal.array() -= longitudinal.mean();
  longitudinal /=
      std::max(std::sqrt(longitudinal.squaredNorm() / n), 1e-8);

  // When the strands wind all the way around a closed direction of the
  // manifold, the tour has no genuinely wide gap: its worst edge looks like
  // all the others. A rectangular layout would then force a seam -- two
  // physically adjacent strands at opposite ends of the transverse axis --
  // which a continuous encoder can only fit by folding. Lay such charts out
  // as an annulus instead: the transverse coordinate becomes an angle and
  // the seam disappears entirely. A clearly dominant worst edge means the
  // strands form an open sheet, where the rectangular layout is right.
  const double widest_gap =
      n_chains < 2 ? 0.0 : tour_edge(n_chains - 1);  // the cut edge
  const bool closed = n_chains >= 3 && widest_gap < 3.0 * median_gap;

  Mat targets(2, n);
  if (closed) {
    const double closing =
        std::clamp(widest_gap, 0.5 * median_gap, 2.0 * median_gap);
    const double total = transverse[order.back()] + closing;
    for (int s = 0; s < n_chains; ++s) {
      const double angle = 2.0 * M_PI * transverse[s] / total;
      for (int idx : chains[s]) {
        const double radius =
            1.0 + 0.25 * std::clamp(longitudinal(idx), -2.0, 2.0);
        targets(0, idx) = radius * std::cos(angle);
        targets(1, idx) = radius * std::sin(angle);
      }
    }
    targets.row(0).array() -= targets.row(0).mean();
    targets.row(1).array() -= targets.row(1).mean();
  } else {
    for (int s = 0; s < n_chains; ++s)
      for (int idx : chains[s]) {
        targets(0, idx) = longitudinal(idx);
        targets(1, idx) = transverse[s];
      }
    for (int d = 0; d < 2; ++d) {
      targets.row(d).array() -= targets.row(d).mean();
      const double rms = std::sqrt(targets.row(d).squaredNorm() / n);
      targets.row(d) /= std::max(rms, 1e-8);
    }
  }
  return targets;
}

namespace {

// Geodesic multidimensional scaling of the member points: classical MDS on
// shortest-path distances through the members' K-nearest-neighbour graph.
// Unlike a linear projection, this respects the intrinsic ordering of
// neighbouring strands of a trajectory that winds through the chart, so it
// cannot interleave distant pieces of the domain. Falls back to PCA
// coordinates when the neighbour graph is disconnected. Rows are scaled to
// unit RMS.
Mat manifold_positions(const Mat& data_cols, int latent_dim) {
  const int n = static_cast<int>(data_cols.cols());
  Mat targets;

  const int k = std::min(6, n - 1);
  KnnGraph graph = build_knn_graph(data_cols.transpose(), k);
  const double inf = std::numeric_limits<double>::infinity();
  Mat dist = Mat::Constant(n, n, inf);
  for (int i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (int j : graph.adjacency[i])
      dist(i, j) = dist(j, i) = (data_cols.col(i) - data_cols.col(j)).norm();
  }
  for (int m = 0; m < n; ++m)     // Floyd-Warshall; n is a few hundred
    for (int i = 0; i < n; ++i) {
      if (dist(i, m) == inf) continue;
      for (int j = 0; j < n; ++j)
        dist(i, j) = std::min(dist(i, j), dist(i, m) + dist(m, j));
    }

  if (dist.allFinite()) {
    Mat sq = dist.cwiseProduct(dist);
    Vec row_mean = sq.rowwise().mean();
    const double grand = row_mean.mean();
    // Double centering: b_ij = -0.5 (d^2_ij - r_i - r_j + g).
    Mat b = -0.5 * sq;
    b.colwise() += 0.5 * row_mean;
    b.rowwise() += 0.5 * row_mean.transpose();
    b.array() -= 0.5 * grand;
    Eigen::SelfAdjointEigenSolver<Mat> eig(b);
    targets.resize(latent_dim, n);
    bool ok = true;
    for (int d = 0; d < latent_dim; ++d) {
      const double lambda = eig.eigenvalues()(n - 1 - d);
      if (lambda <= 0.0) { ok = false; break; }
      targets.row(d) =
          std::sqrt(lambda) * eig.eigenvectors().col(n - 1 - d).transpose();
    }
    if (!ok) targets.resize(0, 0);
  }

  if (targets.size() == 0) {
    auto [mean, projection] = pca_projection(data_cols, latent_dim);
    targets = projection * (data_cols.colwise() - mean);
  }

  for (int d = 0; d < targets.rows(); ++d) {
    const double rms = std::sqrt(targets.row(d).squaredNorm() / n);
    targets.row(d) /= std::max(rms, 1e-8);
  }
  return targets;
}

}  // namespace

Chart fit_chart(const Dataset& dataset, int chart_id,
                const ChartMembership& membership,
                const std::vector<int>& membership_counts,
                const ChartFitConfig& config) {
  Chart chart;
  chart.id = chart_id;
  chart.latent_dim = config.latent_dim;
  chart.interior = membership.interior;
  chart.border = membership.border;
  std::sort(chart.interior.begin(), chart.interior.end());
  chart.members = chart.interior;
  chart.members.insert(chart.members.end(), chart.border.begin(),
                       chart.border.end());
  std::sort(chart.members.begin(), chart.members.end());

  const int n_members = static_cast<int>(chart.members.size());
  if (chart.interior.empty()) throw DataError("fit_chart: empty interior");
  if (n_members <= config.latent_dim)
    throw DataError("fit_chart: need more members than latent dims");

  // Member data, columns are samples.
  Mat data(dataset.ambient_dim(), n_members);
  for (int i = 0; i < n_members; ++i)
    data.col(i) = dataset.points.row(chart.members[i]).transpose();

  TrainConfig train_config = config.train;
  if (config.overlap_weight != 1.0) {
    Vec weights(n_members);
    for (int i = 0; i < n_members; ++i)
      weights(i) =
          membership_counts[chart.members[i]] > 1 ? config.overlap_weight : 1.0;
    train_config.sample_weights = weights;
  }

  // Retrain when the learned map folds (see ChartFitConfig); every attempt
  // is seeded deterministically. The first attempts restart from a fresh
  // initialization; for 1-D plain charts, later attempts warm-start the
  // encoder towards the chart's successor-chain ordering, which cannot fold.
  PretrainSpec unfold;
  unfold.weight = 10.0;
  const bool can_pretrain = config.mode == AutoencoderMode::Plain;
  if (can_pretrain) {
    if (config.latent_dim == 1)
      unfold.latent_targets =
          chain_positions(dataset, chart.members, data).transpose();
    else if (config.latent_dim == 2)
      unfold.latent_targets =
          strand_grid_positions(dataset, chart.members, data);
    else
      unfold.latent_targets = manifold_positions(data, config.latent_dim);
  }

  double best_score = 0.0;
  for (int attempt = 0; attempt < std::max(1, config.restarts); ++attempt) {
    TrainConfig attempt_config = train_config;
    attempt_config.seed = train_config.seed + 7907ull * attempt;
    const PretrainSpec* pretrain =
        can_pretrain && attempt >= 2 ? &unfold : nullptr;

    std::shared_ptr<CoordMap> map;
    LossReport report;
    if (config.mode == AutoencoderMode::PcaAnchored) {
      auto [m, r] = train_pca_anchored_autoencoder(
          data, config.alpha, config.encoder.dims, config.encoder.acts,
          config.decoder.dims, config.decoder.acts, attempt_config);
      map = m;
      report = std::move(r);
    } else {
      auto [m, r] = train_plain_autoencoder(
          data, config.encoder.dims, config.encoder.acts, config.decoder.dims,
          config.decoder.acts, attempt_config, pretrain);
      map = m;
      report = std::move(r);
    }

    const double score =
        chart_fold_score(dataset, chart.members, data, map->encode_batch(data));
    if (attempt == 0 || score < best_score) {
      best_score = score;
      chart.map = std::move(map);
      chart.training = std::move(report);
      chart.restarts_used = attempt;
      chart.fold_score = score;
    }
    if (best_score <= config.fold_threshold) break;
  }

  if (config.whitening) {
    Mat latent = chart.map->encode_batch(data);
    chart.whitener = fit_whitener(latent.transpose());
  }
  finalize_chart_caches(chart, dataset.points);
  return chart;
}

double chart_fold_score(const Dataset& dataset, const std::vector<int>& members,
                        const Mat& data_cols, const Mat& latent_cols) {
  const int n = static_cast<int>(data_cols.cols());
  if (n < 4) return 1.0;
  KdTree ambient_tree(data_cols.transpose());

  // In-chart successor pairs: member rows whose successor is also a member.
  // Successors are matched back to member rows exactly, which holds for
  // time-series datasets where p' is literally the next sample.
  std::vector<int> from, to;
  for (int row = 0; row < n; ++row) {
    const Vec succ = dataset.successors.row(members[row]).transpose();
    const auto [succ_row, dist] = ambient_tree.nearest(succ);
    if (dist < 1e-12 && succ_row != row) {
      from.push_back(row);
      to.push_back(succ_row);
    }
  }
  const int n_pairs = static_cast<int>(from.size());
  if (n_pairs < 4) return 1.0;

  // Local roughness of the induced one-step map z -> z': for each pair, the
  // latent displacement of its nearest (in latent space) other pair, over
  // their latent input distance. Under a homeomorphic chart map this is a
  // local Lipschitz estimate of a smooth map and stays near 1; when the map
  // folds, interleaved branches make nearby inputs jump to distant outputs.
  Mat z0(latent_cols.rows(), n_pairs);
  for (int p = 0; p < n_pairs; ++p) z0.col(p) = latent_cols.col(from[p]);
  KdTree pair_tree(z0.transpose());

  double step_acc = 0.0;
  for (int p = 0; p < n_pairs; ++p)
    step_acc += (latent_cols.col(to[p]) - latent_cols.col(from[p])).norm();
  const double typical_step = std::max(step_acc / n_pairs, 1e-12);

  std::vector<double> ratios(n_pairs);
  for (int p = 0; p < n_pairs; ++p) {
    const int q = pair_tree.k_nearest(z0.col(p), 2)[1].first;
    const double din = std::max((z0.col(q) - z0.col(p)).norm(),
                                1e-6 * typical_step);
    const double dout =
        (latent_cols.col(to[q]) - latent_cols.col(to[p])).norm();
    ratios[p] = dout / din;
  }
  std::nth_element(ratios.begin(), ratios.begin() + n_pairs * 9 / 10,
                   ratios.end());
  const double roughness = ratios[n_pairs * 9 / 10];

  // Worst-over-median latent displacement across successor pairs: a map
  // that tears the domain mid-chart shows one giant latent jump between
  // two ambient neighbours even when the rest of the map looks smooth.
  std::vector<double> steps(n_pairs);
  for (int p = 0; p < n_pairs; ++p)
    steps[p] = (latent_cols.col(to[p]) - latent_cols.col(from[p])).norm();
  std::nth_element(steps.begin(), steps.begin() + n_pairs / 2, steps.end());
  const double median_step = std::max(steps[n_pairs / 2], 1e-12);
  const double max_step = *std::max_element(steps.begin(), steps.end());

  return std::max(roughness, max_step / median_step);
}

void finalize_chart_caches(Chart& chart, const Mat& points) {
  const int n_members = static_cast<int>(chart.members.size());
  Mat data(points.cols(), n_members);
  for (int i = 0; i < n_members; ++i)
    data.col(i) = points.row(chart.members[i]).transpose();

  Mat latent = chart.map->encode_batch(data);
  chart.member_local =
      (chart.whitener ? chart.whitener->apply_batch(latent) : latent)
          .transpose();
  chart.member_tree = std::make_shared<KdTree>(chart.member_local);

  Mat recon = chart.map->decode_batch(latent);
  chart.member_recon_err.resize(n_members);
  chart.max_recon_err = 0.0;
  double sq_sum = 0.0;
  for (int i = 0; i < n_members; ++i) {
    const double err = (recon.col(i) - data.col(i)).norm();
    chart.member_recon_err[i] = err;
    chart.max_recon_err = std::max(chart.max_recon_err, err);
    sq_sum += err * err;
  }
  chart.recon_mse = sq_sum / (static_cast<double>(n_members) * data.rows());
}

Atlas build_atlas(const Dataset& dataset, const AtlasConfig& config) {
  Atlas atlas;
  atlas.points = dataset.points;
  atlas.dt = dataset.dt;
  atlas.fingerprint = dataset_fingerprint(dataset.points);

  KmeansResult clusters =
      kmeans(dataset.points, config.n_charts, config.seed, config.kmeans_max_iters);
  atlas.centroids = clusters.centroids;

  atlas.graph = build_knn_graph(dataset.points, config.knn);
  std::vector<ChartMembership> memberships =
      expand_clusters(clusters.labels, atlas.graph, config.expansion_rounds);

  std::vector<int> membership_counts(dataset.size(), 0);
  for (const ChartMembership& m : memberships) {
    for (int i : m.interior) membership_counts[i] += 1;
    for (int i : m.border) membership_counts[i] += 1;
  }

  // Expansion swallowing a whole neighbouring cluster usually signals a
  // degenerate clustering; allowed, but worth a warning.
  for (std::size_t c = 0; c < memberships.size(); ++c) {
    for (std::size_t o = 0; o < memberships.size(); ++o) {
      if (c == o) continue;
      if (std::includes(memberships[c].border.begin(), memberships[c].border.end(),
                        memberships[o].interior.begin(),
                        memberships[o].interior.end()))
        std::cerr << "warning: chart " << c << " border contains all of chart "
                  << o << "'s interior\n";
    }
  }

  atlas.charts.resize(config.n_charts);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, config.jobs)) if (config.jobs > 1)
  for (int c = 0; c < config.n_charts; ++c) {
    try {
      ChartFitConfig chart_config = config.chart;
      chart_config.train.seed = config.seed + 1000003ull * (c + 1);
      atlas.charts[c] =
          fit_chart(dataset, c, memberships[c], membership_counts, chart_config);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  atlas.interior_of.assign(dataset.size(), -1);
  for (const Chart& chart : atlas.charts)
    for (int i : chart.interior) atlas.interior_of[i] = chart.id;
  for (int owner : atlas.interior_of)
    if (owner < 0) throw DataError("build_atlas: point with no interior chart");
  return atlas;
}

Vec transition(const Atlas& atlas, int from_chart, int to_chart, const Vec& z) {
  const Chart& from = atlas.charts.at(from_chart);
  const Chart& to = atlas.charts.at(to_chart);
  return to.local_coords(from.reconstruct(z));
}

}  // namespace candyman
