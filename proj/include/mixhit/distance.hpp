#pragma once

#include "mixhit/heat_kernel.hpp"
#include "mixhit/parallel.hpp"

#include <vector>

namespace mixhit {

double tv(const Distribution& mu, const Distribution& nu);
double tv(const Vector& mu, const Vector& nu);

// |mu/pi - 1| in L^p(pi); p = infinity gives the max form.
double lp_distance(const Distribution& mu, const Vector& pi, double p);
double separation(const Distribution& mu, const Vector& pi);

struct ProfileMeta {
    double t_max = 0.0;
    std::size_t n_points = 0;
    std::size_t max_refine_depth = 0;
    double refine_threshold = 0.0;
    std::size_t refined_intervals = 0;
};

struct Profile {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<std::size_t> argmax;  // worst start per point (worst-case profiles only)
    ProfileMeta meta;
};

struct ProfileOptions {
    std::size_t max_refine_depth = 3;
    double refine_threshold = 0.05;  // drops larger than this between grid points get subdivided
    std::size_t block_rows = 32;
    Exec exec = Exec::Parallel;
};

Profile mixing_profile(const HeatKernel& kernel, const Distribution& mu, double t_max, std::size_t n_points,
                       const ProfileOptions& opts = {});
Profile worst_case_profile(const HeatKernel& kernel, double t_max, std::size_t n_points,
                           const ProfileOptions& opts = {});

double distance_at(const HeatKernel& kernel, const Distribution& mu, double t);
// d(t) with the worst start (first index on ties) written to argmax.
double worst_distance_at(const HeatKernel& kernel, double t, std::size_t* argmax = nullptr,
                         Exec exec = Exec::Parallel);

// Absolute tolerance of every time inversion.
double time_tolerance(double t_rel);

double t_mix_mu(const HeatKernel& kernel, const Distribution& mu, double eps);
double t_mix(const HeatKernel& kernel, double eps, Exec exec = Exec::Parallel);

// Block-parallel starts * H_t.
Matrix propagate_rows(const HeatKernel& kernel, const Matrix& starts, double t, Exec exec,
                      std::size_t block_rows = 32);

// Half l1 distance of every row to pi.
Vector row_distances(const Matrix& rows, const Vector& pi);

}  // namespace mixhit
