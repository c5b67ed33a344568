#pragma once

// Representation reading over final-token hidden states: contrastive direction
// sets, their mean pattern, dispersion, and PCA for 2-D inspection.

#include <cstddef>
#include <string>
#include <vector>

#include "l2v/matrix.hpp"
#include "l2v/tensor_store.hpp"

namespace l2v::latrep {

/// Row-aligned differences positive[i] - negative[i] at one layer.
struct DirectionSet {
    Matrix rows;
    int layer = 0;
    std::string source_tag;
    std::string prompt_set;

    std::size_t n() const noexcept { return rows.rows(); }
    std::size_t d() const noexcept { return rows.cols(); }

    store::ActivationMatrix to_activation() const;
    /// Accepts a stored matrix tagged as a direction set.
    static DirectionSet from_activation(const store::ActivationMatrix& m);
};

struct PatternVector {
    std::vector<double> values;
    int layer = 0;
    std::string source_tag;
    std::string prompt_set;
};

DirectionSet direction_set(const store::ActivationMatrix& pos, const store::ActivationMatrix& neg);

PatternVector mean_pattern(const DirectionSet& dirs);

/// (1/n) sum ||u_i - mean||^2. Normalized by n, not n - 1.
double covariance_trace(const DirectionSet& dirs);

struct PcaModel {
    std::vector<double> mean;
    Matrix components;  // m x d, orthonormal rows, descending variance
    std::vector<double> explained_variance;

    std::size_t dim() const noexcept { return mean.size(); }
    std::size_t n_components() const noexcept { return components.rows(); }
};

/// Top-m eigenvectors of the 1/n sample covariance. Each component is signed
/// so its largest-magnitude entry (lowest index on ties) is nonnegative.
PcaModel pca_fit(const DirectionSet& dirs, std::size_t m);

Matrix pca_project(const PcaModel& model, const Matrix& rows);

}  // namespace l2v::latrep
