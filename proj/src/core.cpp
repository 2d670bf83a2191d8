#include "cengap/core.hpp"

#include <cmath>
#include <limits>

#include "cengap/error.hpp"
#include "cengap/parallel.hpp"

namespace cengap {

const char* distance_kind_name(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::l2: return "l2";
        case DistanceKind::cosine: return "cosine";
    }
    return "unknown";
}

DistanceKind distance_kind_from_name(const std::string& name) {
    if (name == "l2") return DistanceKind::l2;
    if (name == "cosine") return DistanceKind::cosine;
    raise(ErrorCode::bad_argument, "unknown distance kind: " + name);
}

double distance(DistanceKind kind, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        raise(ErrorCode::dimension_mismatch,
              "vector lengths differ: " + std::to_string(a.size()) + " vs " +
                  std::to_string(b.size()));
    }
    if (kind == DistanceKind::l2) {
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double diff = a[i] - b[i];
            sum += diff * diff;
        }
        return std::sqrt(sum);
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

std::set<std::string> CentroidIndex::label_set() const {
    std::set<std::string> labels;
    for (const auto& [label, _] : centroids) labels.insert(label);
    return labels;
}

CentroidIndex compute_centroids(const Dataset& train, DistanceKind distance_kind) {
    validate_dataset(train);

    CentroidIndex index;
    index.dimensionality = train.dimensionality;
    index.distance_kind = distance_kind;

    // Accumulate in dataset order so the sums are bit-reproducible.
    for (const auto& sample : train.samples) {
        auto [it, inserted] = index.centroids.try_emplace(
            sample.label, std::vector<double>(train.dimensionality, 0.0));
        auto& sum = it->second;
        for (std::size_t i = 0; i < train.dimensionality; ++i) {
            sum[i] += sample.vector[i];
        }
        index.counts[sample.label] += 1;
    }
    if (index.centroids.size() < 2) {
        raise(ErrorCode::too_few_labels,
              "training split has " + std::to_string(index.centroids.size()) +
                  " distinct label(s); at least 2 are required");
    }
    for (auto& [label, sum] : index.centroids) {
        const double n = static_cast<double>(index.counts.at(label));
        for (double& v : sum) v /= n;
    }
    return index;
}

GapMeasurement nearest_two(const CentroidIndex& index, std::span<const double> query) {
    if (query.size() != index.dimensionality) {
        raise(ErrorCode::dimension_mismatch,
              "query length " + std::to_string(query.size()) +
                  " does not match index dimensionality " +
                  std::to_string(index.dimensionality));
    }
    if (index.centroids.size() < 2) {
        raise(ErrorCode::too_few_labels, "index needs at least 2 centroids");
    }

    const std::string* best_label = nullptr;
    const std::string* second_label = nullptr;
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();

    // Centroids are visited in ascending label order; a strict < comparison
    // therefore resolves distance ties toward the smaller label.
    for (const auto& [label, centroid] : index.centroids) {
        const double d = distance(index.distance_kind, query, centroid);
        if (d < best) {
            second = best;
            second_label = best_label;
            best = d;
            best_label = &label;
        } else if (d < second) {
            second = d;
            second_label = &label;
        }
    }

    GapMeasurement gap;
    gap.nearest_label = *best_label;
    gap.second_label = *second_label;
    gap.d1 = best;
    gap.d2 = second;
    gap.delta = second - best;
    return gap;
}

std::vector<std::pair<std::string, GapMeasurement>> measure_all(
    const CentroidIndex& index, const Dataset& data, unsigned threads) {
    std::vector<std::pair<std::string, GapMeasurement>> results(data.samples.size());
    parallel_for(data.samples.size(), threads, [&](std::size_t i) {
        const auto& sample = data.samples[i];
        try {
            results[i] = {sample.id, nearest_two(index, sample.vector)};
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), "sample " + sample.id);
        }
    });
    return results;
}

}  // namespace cengap
