// SPDX-License-Identifier: Apache-2.0
//
// qcslab: quantized compressed sensing laboratory
// Copyright (C) 2026 qcslab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "qcs/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qcs/errors.hpp"

namespace qcs {

void ScalarQuantizer::validate() const
{
    if (levels.empty())
        throw ConfigError("scalar quantizer needs at least one level");
    if (thresholds.size() + 1 != levels.size())
        throw ConfigError("scalar quantizer needs exactly one more level than thresholds");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw ConfigError("scalar quantizer thresholds must be nondecreasing");
}

QuantIndex sq_encode(const ScalarQuantizer& q, double value)
{
    if (!std::isfinite(value))
        throw DomainError("cannot quantize a non-finite value");
    // First threshold >= value closes the region that contains value.
    const auto it = std::lower_bound(q.thresholds.begin(), q.thresholds.end(), value);
    return static_cast<QuantIndex>(it - q.thresholds.begin()) + 1;
}

double sq_decode(const ScalarQuantizer& q, QuantIndex index)
{
    if (index < 1 || index > q.levels.size())
        throw ProtocolError("quantization index " + std::to_string(index) + " outside 1.." +
                            std::to_string(q.levels.size()));
    return q.levels[index - 1];
}

ScalarQuantizer uniform_sq(double lo, double hi, std::size_t levels)
{
    if (!(lo < hi))
        throw ConfigError("uniform quantizer needs lo < hi");
    if (levels < 1)
        throw ConfigError("uniform quantizer needs at least one level");
    const double step = (hi - lo) / static_cast<double>(levels);
    ScalarQuantizer q;
    for (std::size_t i = 1; i < levels; ++i)
        q.thresholds.push_back(lo + static_cast<double>(i) * step);
    for (std::size_t i = 0; i < levels; ++i)
        q.levels.push_back(lo + (static_cast<double>(i) + 0.5) * step);
    return q;
}

namespace {

bool keep_iterating(const std::vector<double>& history, double tol)
{
    if (history.size() < 2)
        return true;
    const double prev = history[history.size() - 2];
    const double cur = history.back();
    if (prev <= 0.0)
        return false;
    return (prev - cur) / prev >= tol;
}

} // namespace

LloydScalarResult lloyd_max_sq(std::span<const double> samples, std::size_t levels,
                               const LloydOptions& options)
{
    if (levels < 1)
        throw ConfigError("Lloyd-Max needs at least one level");
    if (samples.size() < levels)
        throw ConfigError("Lloyd-Max needs at least as many samples as levels");
    if (!(options.tol > 0.0))
        throw ConfigError("Lloyd tolerance must be positive");
    for (double s : samples)
        if (!std::isfinite(s))
            throw DomainError("Lloyd-Max samples must be finite");

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    LloydScalarResult result;
    std::vector<double> g(levels);
    for (std::size_t i = 0; i < levels; ++i) {
        const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(levels);
        g[i] = sorted[std::min(n - 1, static_cast<std::size_t>(q * static_cast<double>(n)))];
    }

    // cell_end[i]: one past the last sorted sample assigned to cell i.
    std::vector<std::size_t> cell_end(levels), prev_end;
    std::vector<double> t(levels - 1);
    auto partition = [&] {
        std::sort(g.begin(), g.end());
        for (std::size_t i = 0; i + 1 < levels; ++i)
            t[i] = 0.5 * (g[i] + g[i + 1]);
        for (std::size_t i = 0; i + 1 < levels; ++i)
            cell_end[i] = static_cast<std::size_t>(
                std::upper_bound(sorted.begin(), sorted.end(), t[i]) - sorted.begin());
        cell_end[levels - 1] = n;
    };
    auto distortion = [&] {
        double d = 0.0;
        std::size_t begin = 0;
        for (std::size_t i = 0; i < levels; ++i) {
            for (std::size_t k = begin; k < cell_end[i]; ++k)
                d += (sorted[k] - g[i]) * (sorted[k] - g[i]);
            begin = cell_end[i];
        }
        return d / static_cast<double>(n);
    };

    partition();
    while (result.iterations < options.max_iters) {
        ++result.iterations;
        // Centroid step; empty cells are re-seeded at the worst-served sample.
        std::size_t begin = 0;
        bool reseeded = false;
        for (std::size_t i = 0; i < levels; ++i) {
            if (cell_end[i] > begin) {
                double sum = 0.0;
                for (std::size_t k = begin; k < cell_end[i]; ++k)
                    sum += sorted[k];
                g[i] = sum / static_cast<double>(cell_end[i] - begin);
            } else {
                reseeded = true;
            }
            begin = cell_end[i];
        }
        if (reseeded) {
            std::size_t b = 0;
            for (std::size_t i = 0; i < levels; ++i) {
                if (cell_end[i] == b) {
                    double worst = -1.0;
                    std::size_t arg = 0;
                    std::size_t cb = 0;
                    for (std::size_t c = 0; c < levels; ++c) {
                        for (std::size_t k = cb; k < cell_end[c]; ++k) {
                            const double e = std::abs(sorted[k] - g[c]);
                            if (e > worst) {
                                worst = e;
                                arg = k;
                            }
                        }
                        cb = cell_end[c];
                    }
                    g[i] = sorted[arg];
                    ++result.reseeded_cells;
                }
                b = cell_end[i];
            }
        }

        const std::vector<double> g_before = g;
        prev_end = cell_end;
        partition();
        const double d = distortion();
        if (!result.distortion_history.empty() && d > result.distortion_history.back() && !reseeded) {
            // Lloyd cannot increase distortion in exact arithmetic; a rise is
            // rounding noise at the fixed point, so keep the previous cells.
            g = g_before;
            cell_end = prev_end;
            break;
        }
        result.distortion_history.push_back(d);
        if (cell_end == prev_end && !reseeded && result.iterations > 1)
            break;
        if (!reseeded && !keep_iterating(result.distortion_history, options.tol))
            break;
    }

    // Final centroids for the last partition.
    std::size_t begin = 0;
    for (std::size_t i = 0; i < levels; ++i) {
        if (cell_end[i] > begin) {
            double sum = 0.0;
            for (std::size_t k = begin; k < cell_end[i]; ++k)
                sum += sorted[k];
            const double centroid = sum / static_cast<double>(cell_end[i] - begin);
            g[i] = centroid;
        }
        begin = cell_end[i];
    }
    std::sort(g.begin(), g.end());
    for (std::size_t i = 0; i + 1 < levels; ++i)
        t[i] = 0.5 * (g[i] + g[i + 1]);
    result.quantizer.levels = g;
    result.quantizer.thresholds = t;
    return result;
}

namespace {

// Codewords transposed so each coordinate is contiguous across codewords;
// distances accumulate over coordinates in ascending order, which gives the
// same rounding as the direct per-codeword loop in vq_quantize.
class NearestSearch {
public:
    explicit NearestSearch(const Eigen::MatrixXd& codewords)
        : transposed_(codewords.transpose()), dist_(codewords.cols())
    {
    }

    VqMatch find(const double* v)
    {
        const Eigen::Index size = transposed_.rows();
        const Eigen::Index dim = transposed_.cols();
        double* dist = dist_.data();
        std::fill(dist, dist + size, 0.0);
        for (Eigen::Index d = 0; d < dim; ++d) {
            const double* col = transposed_.col(d).data();
            const double x = v[d];
            for (Eigen::Index c = 0; c < size; ++c) {
                const double diff = x - col[c];
                dist[c] += diff * diff;
            }
        }
        VqMatch best{0, dist[0]};
        for (Eigen::Index c = 1; c < size; ++c)
            if (dist[c] < best.squared_distance)
                best = {static_cast<std::size_t>(c), dist[c]};
        return best;
    }

private:
    Eigen::MatrixXd transposed_;
    Eigen::VectorXd dist_;
};

} // namespace

VqMatch vq_quantize(const VectorCodebook& book, const Eigen::VectorXd& v)
{
    if (book.size() == 0)
        throw StateError("empty codebook");
    if (static_cast<std::size_t>(v.size()) != book.dim())
        throw ShapeError("vector dimension " + std::to_string(v.size()) +
                         " does not match codeword dimension " + std::to_string(book.dim()));
    VqMatch best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t c = 0; c < book.size(); ++c) {
        double d = 0.0;
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            const double diff = v(k) - book.codewords(k, static_cast<Eigen::Index>(c));
            d += diff * diff;
        }
        if (d < best.squared_distance)
            best = {c, d};
    }
    return best;
}

std::vector<VqMatch> vq_quantize_all(const VectorCodebook& book, const Eigen::MatrixXd& samples)
{
    if (book.size() == 0)
        throw StateError("empty codebook");
    if (static_cast<std::size_t>(samples.rows()) != book.dim())
        throw ShapeError("sample dimension does not match codeword dimension");
    NearestSearch search(book.codewords);
    std::vector<VqMatch> out(static_cast<std::size_t>(samples.cols()));
    for (Eigen::Index k = 0; k < samples.cols(); ++k)
        out[static_cast<std::size_t>(k)] = search.find(samples.col(k).data());
    return out;
}

LloydVectorResult lloyd_vq(const Eigen::MatrixXd& samples, std::size_t size,
                           const LloydOptions& options, CounterRng& rng)
{
    const auto n = static_cast<std::size_t>(samples.cols());
    const Eigen::Index dim = samples.rows();
    if (size < 1)
        throw ConfigError("codebook size must be at least 1");
    if (size > n)
        throw ConfigError("codebook size " + std::to_string(size) + " exceeds the " +
                          std::to_string(n) + " training vectors");
    if (!(options.tol > 0.0))
        throw ConfigError("Lloyd tolerance must be positive");
    if (!samples.allFinite())
        throw DomainError("Lloyd VQ samples must be finite");

    // k-means++ seeding.
    Eigen::MatrixXd book(dim, static_cast<Eigen::Index>(size));
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    book.col(0) = samples.col(static_cast<Eigen::Index>(rng.below(n)));
    for (std::size_t c = 1; c <= size; ++c) {
        const auto prev = book.col(static_cast<Eigen::Index>(c - 1));
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = (samples.col(static_cast<Eigen::Index>(k)) - prev).squaredNorm();
            nearest[k] = std::min(nearest[k], d);
            total += nearest[k];
        }
        if (c == size)
            break;
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t k = 0; k < n; ++k) {
                acc += nearest[k];
                if (acc >= target && nearest[k] > 0.0) {
                    pick = k;
                    break;
                }
            }
        } else {
            pick = rng.below(n);
        }
        book.col(static_cast<Eigen::Index>(c)) = samples.col(static_cast<Eigen::Index>(pick));
    }

    LloydVectorResult result;
    std::vector<std::size_t> assign(n, 0), prev_assign;
    std::vector<double> err(n, 0.0);
    auto assign_all = [&] {
        NearestSearch search(book);
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const VqMatch m = search.find(samples.col(static_cast<Eigen::Index>(k)).data());
            assign[k] = m.index;
            err[k] = m.squared_distance;
            total += m.squared_distance;
        }
        return total / static_cast<double>(n);
    };

    double d = assign_all();
    result.distortion_history.push_back(d);
    Eigen::MatrixXd sums(dim, static_cast<Eigen::Index>(size));
    std::vector<std::size_t> counts(size);
    while (result.iterations < options.max_iters) {
        ++result.iterations;
        sums.setZero();
        std::fill(counts.begin(), counts.end(), std::size_t{0});
        for (std::size_t k = 0; k < n; ++k) {
            sums.col(static_cast<Eigen::Index>(assign[k])) += samples.col(static_cast<Eigen::Index>(k));
            ++counts[assign[k]];
        }
        bool reseeded = false;
        std::vector<bool> taken(n, false);
        for (std::size_t c = 0; c < size; ++c) {
            const auto col = static_cast<Eigen::Index>(c);
            if (counts[c] > 0) {
                book.col(col) = sums.col(col) / static_cast<double>(counts[c]);
            } else {
                std::size_t worst = 0;
                double worst_err = -1.0;
                for (std::size_t k = 0; k < n; ++k)
                    if (!taken[k] && err[k] > worst_err) {
                        worst_err = err[k];
                        worst = k;
                    }
                taken[worst] = true;
                err[worst] = 0.0;
                book.col(col) = samples.col(static_cast<Eigen::Index>(worst));
                reseeded = true;
                ++result.reseeded_cells;
            }
        }
        prev_assign = assign;
        const std::vector<double> prev_err = err;
        d = assign_all();
        if (d > result.distortion_history.back() && !reseeded) {
            // Rounding noise at the fixed point; keep the previous partition.
            assign = prev_assign;
            err = prev_err;
            break;
        }
        result.distortion_history.push_back(d);
        if (assign == prev_assign)
            break;
        if (!reseeded && !keep_iterating(result.distortion_history, options.tol))
            break;
    }
    // Training distortion of the returned codebook is the last history entry.
    result.codebook.codewords = std::move(book);
    return result;
}

} // namespace qcs
