#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cengap/types.hpp"

namespace cengap {

// l2 is the default reading of "distance to a cluster center"; cosine is kept
// behind this switch so the assumption stays testable.
enum class DistanceKind { l2, cosine };

const char* distance_kind_name(DistanceKind kind);
DistanceKind distance_kind_from_name(const std::string& name);

// L2: sqrt(sum((a-b)^2)), summed in index order (bit-reproducible).
// Cosine: 1 - a.b/(|a||b|); a zero-norm operand is treated as orthogonal,
// giving distance 1.
double distance(DistanceKind kind, std::span<const double> a, std::span<const double> b);

// Per-label mean vectors of the training split. Immutable after construction
// and safe to share across concurrent readers.
struct CentroidIndex {
    std::map<std::string, std::vector<double>> centroids;  // label -> mean vector
    std::map<std::string, std::size_t> counts;             // label -> contributing samples
    std::size_t dimensionality = 0;
    DistanceKind distance_kind = DistanceKind::l2;

    bool contains_label(const std::string& label) const {
        return centroids.find(label) != centroids.end();
    }
    std::set<std::string> label_set() const;
};

// Distances from one query to its two nearest centroids. The gap d2 - d1 is
// the confidence signal: small values mean the query sits between clusters
// (ambiguous or novel), large values mean one cluster clearly owns it.
struct GapMeasurement {
    std::string nearest_label;
    std::string second_label;
    double d1 = 0.0;
    double d2 = 0.0;
    double delta = 0.0;  // d2 - d1, exactly
};

// Per-label arithmetic mean, accumulated in dataset order. Requires at least
// two distinct labels; throws too_few_labels otherwise.
CentroidIndex compute_centroids(const Dataset& train,
                                DistanceKind distance_kind = DistanceKind::l2);

// Exact search: every centroid is examined. Equal distances are broken by
// lexicographic label order (smaller label counts as nearer).
GapMeasurement nearest_two(const CentroidIndex& index, std::span<const double> query);

// One measurement per sample, in input order. May fan out across `threads`
// workers; the output is identical regardless of worker count. An empty
// dataset yields an empty result.
std::vector<std::pair<std::string, GapMeasurement>> measure_all(
    const CentroidIndex& index, const Dataset& data, unsigned threads = 1);

}  // namespace cengap
