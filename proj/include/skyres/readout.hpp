#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "skyres/errors.hpp"
#include "skyres/rng.hpp"

namespace skyres {

struct ReadoutWeights {
    Eigen::MatrixXd w; // F x C
    double ridge_lambda = 0.0;
};

/// Default ridge strength when the caller asks for "auto": small relative
/// to the feature scale, just enough to keep the solve well-posed.
inline double auto_ridge_lambda(const Eigen::MatrixXd& features) {
    const double tr = features.squaredNorm(); // trace(X^T X)
    return 1e-6 * tr / static_cast<double>(features.cols());
}

/// Minimize |X w - L|^2 + lambda |w|^2 through the normal equations
/// (X^T X + lambda I) w = X^T L with an LDLT solve plus one step of
/// iterative refinement. lambda = 0 is allowed only while X^T X is
/// well-conditioned; otherwise SingularSystem tells the caller to
/// regularize.
inline ReadoutWeights fit_readout(const Eigen::MatrixXd& X, const Eigen::MatrixXd& L,
                                  double ridge_lambda) {
    if (X.rows() < 1) throw DimensionMismatch("fit_readout: no samples");
    if (L.rows() != X.rows()) throw DimensionMismatch("fit_readout: row count mismatch");
    if (ridge_lambda < 0) throw ConfigError("ridge_lambda must be >= 0");
    if (!X.allFinite() || !L.allFinite()) throw Error("fit_readout: non-finite input");

    const long f = X.cols();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(f, f);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += ridge_lambda;
    const Eigen::MatrixXd rhs = X.transpose() * L;

    const auto ldlt = gram.ldlt();
    if (ldlt.info() != Eigen::Success)
        throw SingularSystem("normal equations factorization failed");
    if (ridge_lambda == 0.0) {
        const double rc = ldlt.rcond();
        if (!(rc > 1e-12))
            throw SingularSystem("X^T X is rank-deficient (rcond = " + std::to_string(rc) +
                                 "); set ridge_lambda > 0");
    }

    ReadoutWeights out;
    out.ridge_lambda = ridge_lambda;
    out.w = ldlt.solve(rhs);
    out.w += ldlt.solve(rhs - gram.selfadjointView<Eigen::Lower>() * out.w);
    if (!out.w.allFinite()) throw SingularSystem("normal equations produced non-finite weights");
    return out;
}

/// Frobenius norm of the fit optimality residual 2 X^T (Xw - L) + 2 lambda w.
inline double residual_gradient_norm(const Eigen::MatrixXd& X, const Eigen::MatrixXd& L,
                                     const ReadoutWeights& weights) {
    const Eigen::MatrixXd g =
        2.0 * (X.transpose() * (X * weights.w - L)) + 2.0 * weights.ridge_lambda * weights.w;
    return g.norm();
}

inline Eigen::MatrixXd predict_series(const ReadoutWeights& weights, const Eigen::MatrixXd& X) {
    if (X.cols() != weights.w.rows())
        throw DimensionMismatch("predict_series: feature count " + std::to_string(X.cols()) +
                                " != trained " + std::to_string(weights.w.rows()));
    return X * weights.w;
}

/// sign(y) with the tie sign(0) = +1.
inline std::vector<int> binarize_waveform(const Eigen::VectorXd& y) {
    if (!y.allFinite()) throw Error("binarize_waveform: non-finite input");
    std::vector<int> out(y.size());
    for (long i = 0; i < y.size(); ++i) out[i] = y[i] >= 0.0 ? +1 : -1;
    return out;
}

/// Argmax over the class scores; ties break toward the smaller digit.
inline std::pair<int, Eigen::VectorXd> classify_digit(const ReadoutWeights& weights,
                                                      const Eigen::RowVectorXd& features) {
    if (features.cols() != weights.w.rows())
        throw DimensionMismatch("classify_digit: feature count mismatch");
    Eigen::VectorXd scores = (features * weights.w).transpose();
    int best = 0;
    for (int c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;
    return {best, std::move(scores)};
}

struct SplitSpec {
    int train_n = 0;
    int test_n = 0;
    int repeats = 1;
    std::uint64_t seed = 0;
};

struct EvalReport {
    double accuracy = 0.0;
    std::vector<double> per_repeat;
    Eigen::MatrixXi confusion; // accumulated over repeats; rows = true digit
    double ridge_lambda = 0.0;
    /// Full-scale accuracy reported for the hardware this models; carried
    /// in reports for context, never asserted by the simulator.
    double hardware_reference_accuracy = 0.947;
};

/// Repeated random split evaluation: fit one-hot ridge regression on the
/// train rows, classify the held-out rows, accumulate the confusion
/// matrix, and average accuracy over repeats.
inline EvalReport evaluate_mnist(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                 const SplitSpec& split, double ridge_lambda) {
    const long d = features.rows();
    if (static_cast<long>(labels.size()) != d)
        throw DimensionMismatch("evaluate_mnist: label count mismatch");
    if (split.train_n < 1 || split.test_n < 1 || split.repeats < 1)
        throw SplitError("train_n, test_n and repeats must all be >= 1");
    if (split.train_n + split.test_n > d)
        throw SplitError("split needs " + std::to_string(split.train_n + split.test_n) +
                         " samples but only " + std::to_string(d) + " are available");
    for (int l : labels)
        if (l < 0 || l > 9) throw Error("evaluate_mnist: label out of range");

    const long f = features.cols();
    EvalReport rep;
    rep.ridge_lambda = ridge_lambda;
    rep.confusion = Eigen::MatrixXi::Zero(10, 10);

    std::vector<int> order(d);
    for (int r = 0; r < split.repeats; ++r) {
        std::iota(order.begin(), order.end(), 0);
        RngCursor rng(split.seed, static_cast<std::uint64_t>(r) + 1);
        for (long i = d - 1; i > 0; --i)
            std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);

        Eigen::MatrixXd xtr(split.train_n, f);
        Eigen::MatrixXd ltr = Eigen::MatrixXd::Zero(split.train_n, 10);
        for (int i = 0; i < split.train_n; ++i) {
            xtr.row(i) = features.row(order[i]);
            ltr(i, labels[order[i]]) = 1.0;
        }
        const ReadoutWeights w = fit_readout(xtr, ltr, ridge_lambda);

        int correct = 0;
        for (int i = 0; i < split.test_n; ++i) {
            const int idx = order[split.train_n + i];
            const auto [digit, scores] =
                classify_digit(w, Eigen::RowVectorXd(features.row(idx)));
            rep.confusion(labels[idx], digit) += 1;
            if (digit == labels[idx]) ++correct;
        }
        rep.per_repeat.push_back(static_cast<double>(correct) / split.test_n);
    }
    rep.accuracy = std::accumulate(rep.per_repeat.begin(), rep.per_repeat.end(), 0.0) /
                   rep.per_repeat.size();
    return rep;
}

/// Waveform scoring: a sample is correct when its binarized output matches
/// the label; a segment is correct when more than half its samples are.
struct WaveformAccuracy {
    double per_sample = 0.0;
    double per_segment = 0.0;
};

inline WaveformAccuracy waveform_accuracy(const std::vector<int>& predicted,
                                          const std::vector<int>& labels,
                                          int samples_per_segment) {
    if (predicted.size() != labels.size())
        throw DimensionMismatch("waveform_accuracy: length mismatch");
    if (samples_per_segment < 1 || predicted.size() % samples_per_segment != 0)
        throw DimensionMismatch("waveform_accuracy: segment size does not divide sample count");
    const size_t n = predicted.size();
    size_t correct = 0;
    size_t seg_correct = 0;
    const size_t n_seg = n / samples_per_segment;
    for (size_t s = 0; s < n_seg; ++s) {
        size_t in_seg = 0;
        for (int j = 0; j < samples_per_segment; ++j) {
            const size_t k = s * samples_per_segment + j;
            if (predicted[k] == labels[k]) {
                ++correct;
                ++in_seg;
            }
        }
        if (2 * in_seg > static_cast<size_t>(samples_per_segment)) ++seg_correct;
    }
    return {static_cast<double>(correct) / n, static_cast<double>(seg_correct) / n_seg};
}

} // namespace skyres
