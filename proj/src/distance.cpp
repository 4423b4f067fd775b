#include "mixhit/distance.hpp"

#include "mixhit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace mixhit {

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::EpsOutOfRange, "eps must lie in (0, 1)");
}

struct BlockRange {
    Eigen::Index begin, count;
};

std::vector<BlockRange> split_rows(Eigen::Index rows, std::size_t block_rows) {
    std::vector<BlockRange> out;
    auto step = static_cast<Eigen::Index>(std::max<std::size_t>(1, block_rows));
    for (Eigen::Index b = 0; b < rows; b += step) out.push_back({b, std::min(step, rows - b)});
    return out;
}

// max over rows with first-index tie breaking
std::pair<double, Eigen::Index> row_max(const Vector& d) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) > best) {
            best = d(i);
            arg = i;
        }
    return {best, arg};
}

// Profile of max_r d_r(t) over the rows of `starts`.
Profile profile_rows(const HeatKernel& kernel, const Matrix& starts, double t_max, std::size_t n_points,
                     const ProfileOptions& opts) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw Error(Errc::InvalidArgument, "t_max must be positive");
    if (n_points < 2) throw Error(Errc::InvalidArgument, "a profile needs at least 2 points");
    const Vector& pi = kernel.chain().pi();
    const std::size_t N = n_points;
    const double dt = t_max / static_cast<double>(N - 1);
    const Matrix step = kernel.matrix(dt);
    auto blocks = split_rows(starts.rows(), opts.block_rows);
    const auto nb = static_cast<std::ptrdiff_t>(blocks.size());

    std::vector<std::vector<double>> val(blocks.size(), std::vector<double>(N));
    std::vector<std::vector<Eigen::Index>> arg(blocks.size(), std::vector<Eigen::Index>(N));
    auto pass1 = [&](std::ptrdiff_t b) {
        auto [begin, count] = blocks[static_cast<std::size_t>(b)];
        Matrix X = starts.middleRows(begin, count);
        for (std::size_t i = 0; i < N; ++i) {
            auto [v, a] = row_max(row_distances(X, pi));
            val[static_cast<std::size_t>(b)][i] = v;
            arg[static_cast<std::size_t>(b)][i] = begin + a;
            if (i + 1 < N) X = X * step;
        }
    };
    if (opts.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t b = 0; b < nb; ++b) pass1(b);
    } else {
        for (std::ptrdiff_t b = 0; b < nb; ++b) pass1(b);
    }

    auto reduce = [&](const std::vector<std::vector<double>>& v, const std::vector<std::vector<Eigen::Index>>& a,
                      std::size_t i) {
        double best = -1.0;
        Eigen::Index where = 0;
        for (std::size_t b = 0; b < v.size(); ++b)
            if (v[b][i] > best) {
                best = v[b][i];
                where = a[b][i];
            }
        return std::pair{best, static_cast<std::size_t>(where)};
    };

    std::vector<double> coarse(N);
    std::vector<std::size_t> coarse_arg(N);
    for (std::size_t i = 0; i < N; ++i) std::tie(coarse[i], coarse_arg[i]) = reduce(val, arg, i);

    // Subdivide steep intervals.
    std::vector<std::size_t> depth(N, 0);
    std::map<std::size_t, Matrix> sub_steps;
    std::size_t refined = 0;
    for (std::size_t i = 0; i + 1 < N && opts.max_refine_depth > 0; ++i) {
        double drop = coarse[i] - coarse[i + 1];
        if (drop <= opts.refine_threshold) continue;
        auto d = static_cast<std::size_t>(std::ceil(std::log2(drop / opts.refine_threshold)));
        depth[i] = std::clamp<std::size_t>(d, 1, opts.max_refine_depth);
        ++refined;
    }
    for (auto d : depth)
        if (d && !sub_steps.count(d)) sub_steps.emplace(d, kernel.matrix(dt / static_cast<double>(1u << d)));

    Profile out;
    out.meta = {t_max, N, opts.max_refine_depth, opts.refine_threshold, refined};
    if (refined == 0) {
        for (std::size_t i = 0; i < N; ++i) {
            out.grid.push_back(dt * static_cast<double>(i));
            out.values.push_back(coarse[i]);
            out.argmax.push_back(coarse_arg[i]);
        }
        return out;
    }

    // Second sweep visits the sub-points of refined intervals.
    std::vector<double> sub_times;
    std::vector<std::pair<std::size_t, std::size_t>> sub_owner;  // (interval, sub index)
    for (std::size_t i = 0; i + 1 < N; ++i)
        for (std::size_t s = 1; depth[i] && s < (1u << depth[i]); ++s) {
            sub_times.push_back(dt * (static_cast<double>(i) + static_cast<double>(s) / static_cast<double>(1u << depth[i])));
            sub_owner.emplace_back(i, s);
        }
    const std::size_t M = sub_times.size();
    std::vector<std::vector<double>> sval(blocks.size(), std::vector<double>(M));
    std::vector<std::vector<Eigen::Index>> sarg(blocks.size(), std::vector<Eigen::Index>(M));
    auto pass2 = [&](std::ptrdiff_t b) {
        auto [begin, count] = blocks[static_cast<std::size_t>(b)];
        Matrix X = starts.middleRows(begin, count);
        std::size_t k = 0;
        for (std::size_t i = 0; i + 1 < N; ++i) {
            if (depth[i]) {
                const Matrix& sub = sub_steps.at(depth[i]);
                Matrix Y = X;
                for (std::size_t s = 1; s < (1u << depth[i]); ++s, ++k) {
                    Y = Y * sub;
                    auto [v, a] = row_max(row_distances(Y, pi));
                    sval[static_cast<std::size_t>(b)][k] = v;
                    sarg[static_cast<std::size_t>(b)][k] = begin + a;
                }
            }
            X = X * step;
        }
    };
    if (opts.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t b = 0; b < nb; ++b) pass2(b);
    } else {
        for (std::ptrdiff_t b = 0; b < nb; ++b) pass2(b);
    }

    std::size_t k = 0;
    for (std::size_t i = 0; i < N; ++i) {
        out.grid.push_back(dt * static_cast<double>(i));
        out.values.push_back(coarse[i]);
        out.argmax.push_back(coarse_arg[i]);
        while (k < M && sub_owner[k].first == i) {
            auto [v, a] = reduce(sval, sarg, k);
            out.grid.push_back(sub_times[k]);
            out.values.push_back(v);
            out.argmax.push_back(a);
            ++k;
        }
    }
    return out;
}

}  // namespace

double tv(const Vector& mu, const Vector& nu) {
    if (mu.size() != nu.size()) throw Error(Errc::DimensionMismatch, "distributions over different state spaces");
    return 0.5 * (mu - nu).lpNorm<1>();
}

double tv(const Distribution& mu, const Distribution& nu) { return tv(mu.probs(), nu.probs()); }

double lp_distance(const Distribution& mu, const Vector& pi, double p) {
    if (static_cast<Eigen::Index>(mu.size()) != pi.size())
        throw Error(Errc::DimensionMismatch, "distribution length differs from pi");
    if (!(p >= 1.0)) throw Error(Errc::InvalidArgument, "p must be at least 1");
    if ((pi.array() <= 0.0).any()) throw Error(Errc::ZeroStationaryMass, "pi vanishes somewhere");
    Vector dev = (mu.probs().cwiseQuotient(pi).array() - 1.0).abs().matrix();
    if (std::isinf(p)) return dev.maxCoeff();
    if (p == 1.0) return pi.dot(dev);
    // Factor out the largest deviation so large p does not overflow.
    double top = dev.maxCoeff();
    if (top == 0.0) return 0.0;
    double s = pi.dot((dev / top).array().pow(p).matrix());
    return top * std::pow(s, 1.0 / p);
}

double separation(const Distribution& mu, const Vector& pi) {
    if (static_cast<Eigen::Index>(mu.size()) != pi.size())
        throw Error(Errc::DimensionMismatch, "distribution length differs from pi");
    return (1.0 - mu.probs().cwiseQuotient(pi).array()).maxCoeff();
}

Vector row_distances(const Matrix& rows, const Vector& pi) {
    return 0.5 * (rows.rowwise() - pi.transpose()).cwiseAbs().rowwise().sum();
}

Matrix propagate_rows(const HeatKernel& kernel, const Matrix& starts, double t, Exec exec, std::size_t block_rows) {
    auto blocks = split_rows(starts.rows(), block_rows);
    Matrix out(starts.rows(), starts.cols());
    const auto nb = static_cast<std::ptrdiff_t>(blocks.size());
    auto one = [&](std::ptrdiff_t b) {
        auto [begin, count] = blocks[static_cast<std::size_t>(b)];
        out.middleRows(begin, count) = kernel.rows(starts.middleRows(begin, count), t);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t b = 0; b < nb; ++b) one(b);
    } else {
        for (std::ptrdiff_t b = 0; b < nb; ++b) one(b);
    }
    return out;
}

Profile mixing_profile(const HeatKernel& kernel, const Distribution& mu, double t_max, std::size_t n_points,
                       const ProfileOptions& opts) {
    if (mu.size() != kernel.size()) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    Profile p = profile_rows(kernel, mu.probs().transpose(), t_max, n_points, opts);
    p.argmax.clear();
    return p;
}

Profile worst_case_profile(const HeatKernel& kernel, double t_max, std::size_t n_points, const ProfileOptions& opts) {
    const auto n = static_cast<Eigen::Index>(kernel.size());
    return profile_rows(kernel, Matrix::Identity(n, n), t_max, n_points, opts);
}

double distance_at(const HeatKernel& kernel, const Distribution& mu, double t) {
    return tv(kernel.apply(mu, t).probs(), kernel.chain().pi());
}

double worst_distance_at(const HeatKernel& kernel, double t, std::size_t* argmax, Exec exec) {
    const auto n = static_cast<Eigen::Index>(kernel.size());
    Matrix H = propagate_rows(kernel, Matrix::Identity(n, n), t, exec);
    auto [v, a] = row_max(row_distances(H, kernel.chain().pi()));
    if (argmax) *argmax = static_cast<std::size_t>(a);
    return v;
}

double time_tolerance(double t_rel) { return 1e-9 * std::max(1.0, t_rel); }

namespace {

// inf{t : max_r d_r(t) <= eps} over the rows of `starts`.  Rows that have
// already dropped to eps are discarded as the bracket moves right.
double crossing_time(const HeatKernel& kernel, Matrix rows, double eps, Exec exec) {
    const Vector& pi = kernel.chain().pi();
    auto keep_above = [&](const Matrix& X) {
        Vector d = row_distances(X, pi);
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < d.size(); ++i)
            if (d(i) > eps) idx.push_back(i);
        Matrix Y(static_cast<Eigen::Index>(idx.size()), X.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) Y.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
        return Y;
    };
    rows = keep_above(rows);
    if (rows.rows() == 0) return 0.0;
    const double tol = time_tolerance(kernel.t_rel());
    double lo = 0.0;
    double hi = std::max(kernel.t_rel(), tol);
    Matrix at_hi = keep_above(propagate_rows(kernel, rows, hi, exec));
    while (at_hi.rows() > 0) {
        if (hi > 1e13) throw Error(Errc::NumericalBreakdown, "distance does not fall below eps");
        lo = hi;
        rows = std::move(at_hi);
        at_hi = keep_above(propagate_rows(kernel, rows, hi, exec));
        hi *= 2.0;
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        Matrix at_mid = keep_above(propagate_rows(kernel, rows, mid - lo, exec));
        if (at_mid.rows() > 0) {
            lo = mid;
            rows = std::move(at_mid);
        } else {
            hi = mid;
        }
    }
    return hi;
}

}  // namespace

double t_mix_mu(const HeatKernel& kernel, const Distribution& mu, double eps) {
    check_eps(eps);
    if (mu.size() != kernel.size()) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    return crossing_time(kernel, mu.probs().transpose(), eps, Exec::Serial);
}

double t_mix(const HeatKernel& kernel, double eps, Exec exec) {
    check_eps(eps);
    const auto n = static_cast<Eigen::Index>(kernel.size());
    return crossing_time(kernel, Matrix::Identity(n, n), eps, exec);
}

}  // namespace mixhit
