#include "l2v/latrep.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "l2v/error.hpp"

namespace l2v::latrep {

namespace {

std::vector<double> column_mean(const Matrix& m) {
    std::vector<double> mean(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) mean[c] += row[c];
    }
    const double inv = 1.0 / static_cast<double>(m.rows());
    for (auto& x : mean) x *= inv;
    return mean;
}

}  // namespace

store::ActivationMatrix DirectionSet::to_activation() const {
    store::ActivationMatrix m;
    m.values = rows;
    m.role = store::Role::direction;
    m.layer = layer;
    m.source_tag = source_tag;
    m.prompt_set = prompt_set;
    return m;
}

DirectionSet DirectionSet::from_activation(const store::ActivationMatrix& m) {
    if (m.role != store::Role::direction) {
        fail(ErrorKind::format, "expected a direction tensor, got role '" +
                                    std::string(store::to_string(m.role)) + "'");
    }
    return DirectionSet{m.values, m.layer, m.source_tag, m.prompt_set};
}

DirectionSet direction_set(const store::ActivationMatrix& pos, const store::ActivationMatrix& neg) {
    if (pos.role != store::Role::positive || neg.role != store::Role::negative) {
        fail(ErrorKind::format, "direction_set: expected roles positive/negative, got " +
                                    std::string(store::to_string(pos.role)) + "/" +
                                    std::string(store::to_string(neg.role)));
    }
    if (pos.n() != neg.n() || pos.d() != neg.d()) {
        fail(ErrorKind::dimension, "direction_set: shape " + std::to_string(pos.n()) + "x" +
                                       std::to_string(pos.d()) + " vs " + std::to_string(neg.n()) +
                                       "x" + std::to_string(neg.d()));
    }
    if (pos.layer != neg.layer) {
        fail(ErrorKind::dimension, "direction_set: layer " + std::to_string(pos.layer) + " vs " +
                                       std::to_string(neg.layer));
    }
    if (pos.n() == 0 || pos.d() == 0) fail(ErrorKind::degenerate, "direction_set: empty input");

    DirectionSet out{Matrix(pos.n(), pos.d()), pos.layer, pos.source_tag, pos.prompt_set};
    const auto& a = pos.values.data();
    const auto& b = neg.values.data();
    auto& u = out.rows.data();
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = a[i] - b[i];
    return out;
}

PatternVector mean_pattern(const DirectionSet& dirs) {
    if (dirs.n() == 0) fail(ErrorKind::degenerate, "mean_pattern: empty direction set");
    return PatternVector{column_mean(dirs.rows), dirs.layer, dirs.source_tag, dirs.prompt_set};
}

double covariance_trace(const DirectionSet& dirs) {
    if (dirs.n() == 0) fail(ErrorKind::degenerate, "covariance_trace: empty direction set");
    // Shift by the first row before centering: identical rows then give exactly 0.
    Matrix shifted = dirs.rows;
    const auto anchor = dirs.rows.row(0);
    for (std::size_t r = 0; r < dirs.n(); ++r) {
        auto row = shifted.row(r);
        for (std::size_t c = 0; c < dirs.d(); ++c) row[c] -= anchor[c];
    }
    const auto mean = column_mean(shifted);
    double acc = 0.0;
    for (std::size_t r = 0; r < dirs.n(); ++r) {
        const auto row = shifted.row(r);
        for (std::size_t c = 0; c < dirs.d(); ++c) {
            const double dev = row[c] - mean[c];
            acc += dev * dev;
        }
    }
    return acc / static_cast<double>(dirs.n());
}

PcaModel pca_fit(const DirectionSet& dirs, std::size_t m) {
    const std::size_t n = dirs.n();
    const std::size_t d = dirs.d();
    if (n < 2) fail(ErrorKind::usage, "pca_fit: need at least 2 samples, got " + std::to_string(n));
    if (m < 1 || m > std::min(n, d)) {
        fail(ErrorKind::usage, "pca_fit: component count " + std::to_string(m) + " outside [1, " +
                                   std::to_string(std::min(n, d)) + "]");
    }

    PcaModel model;
    model.mean = column_mean(dirs.rows);

    Eigen::MatrixXd centered(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = dirs.rows.row(r);
        for (std::size_t c = 0; c < d; ++c) centered(r, c) = row[c] - model.mean[c];
    }
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        fail(ErrorKind::degenerate, "pca_fit: eigendecomposition did not converge");
    }

    // Eigen returns ascending eigenvalues.
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    model.components = Matrix(m, d);
    model.explained_variance.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const Eigen::Index col = static_cast<Eigen::Index>(d - 1 - j);
        model.explained_variance[j] = std::max(values(col), 0.0);

        std::size_t pivot = 0;
        for (std::size_t c = 1; c < d; ++c) {
            if (std::abs(vectors(static_cast<Eigen::Index>(c), col)) >
                std::abs(vectors(static_cast<Eigen::Index>(pivot), col))) {
                pivot = c;
            }
        }
        const double sign = vectors(static_cast<Eigen::Index>(pivot), col) < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < d; ++c) {
            model.components(j, c) = sign * vectors(static_cast<Eigen::Index>(c), col);
        }
    }
    return model;
}

Matrix pca_project(const PcaModel& model, const Matrix& rows) {
    if (rows.cols() != model.dim()) {
        fail(ErrorKind::dimension, "pca_project: input dimension " + std::to_string(rows.cols()) +
                                       " vs model dimension " + std::to_string(model.dim()));
    }
    const std::size_t m = model.n_components();
    Matrix out(rows.rows(), m);
    std::vector<double> centered(model.dim());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        const auto row = rows.row(r);
        for (std::size_t c = 0; c < model.dim(); ++c) centered[c] = row[c] - model.mean[c];
        for (std::size_t j = 0; j < m; ++j) out(r, j) = dot(model.components.row(j), centered);
    }
    return out;
}

}  // namespace l2v::latrep
