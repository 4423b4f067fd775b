#pragma once

#include "mixhit/gallery.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace mixhit {

enum class MuRule { WorstSingleton, Labeled, Stationary };

struct MuChoice {
    MuRule rule = MuRule::WorstSingleton;
    std::string label;  // for Labeled
};

// "worst", "pi" or a state label.
MuChoice parse_mu_choice(const std::string& text);

struct SweepConfig {
    std::string family;
    nlohmann::json params = nlohmann::json::object();  // "n" is filled per schedule entry
    std::vector<std::size_t> schedule;
    std::vector<double> eps_grid{0.05, 0.25, 0.35, 0.5, 0.65, 0.75, 0.95};  // t_mix grid
    double alpha = 0.5;
    std::vector<double> hit_eps{0.05, 0.25, 0.5, 0.75, 0.95};
    std::vector<double> concentration_eps{0.1, 0.25, 0.5};
    std::vector<double> k_levels{0.25, 0.49, 0.5, 0.51, 0.75};
    std::string k_target;  // label of the target for k_n(p); empty uses the t_H argmax set
    MuChoice mu;
    SearchMode mode = SearchMode::Candidates;
};

struct WorstStateRecord {
    std::string label;
    std::string branch;
    long offset = 0;  // n - j for a state c_j or b_j
    double expectation = 0.0;
};

struct SweepRecord {
    std::size_t n = 0;
    std::size_t states = 0;
    double t_rel = 0.0;
    std::string heat_method;
    std::string mu_label;
    std::vector<double> t_mix;     // worst start, aligned with eps_grid
    std::vector<double> t_mix_mu;  // from mu
    std::vector<double> hit;       // hit_{alpha,mu}(eps), aligned with hit_eps
    bool hit_lower_bound = false;
    double t_h = 0.0;              // t_{H,mu}(alpha)
    std::vector<std::string> t_h_set;
    std::string search_mode;
    std::vector<double> concentration;  // aligned with concentration_eps
    std::vector<double> k_values;       // aligned with k_levels
    bool has_worst_state = false;
    WorstStateRecord worst_state;
};

struct SequenceSweep {
    SweepConfig config;
    std::vector<SweepRecord> per_n;
};

SequenceSweep sweep(const SweepConfig& config);

// One diagnostic over the schedule.  The trend label describes the finite
// sequence only.
struct DiagnosticSeries {
    std::string name;
    std::vector<std::size_t> n;
    std::vector<double> values;
    std::string trend;  // decreasing / increasing / flat / mixed
    double last = 0.0;
    std::string note;
};

std::string trend_label(const std::vector<double>& values);

DiagnosticSeries cutoff_ratio_diagnostic(const SequenceSweep& s, double eps);
DiagnosticSeries hit_cutoff_diagnostic(const SequenceSweep& s, double alpha, double eps);
DiagnosticSeries product_condition(const SequenceSweep& s);
DiagnosticSeries concentration_diagnostic(const SequenceSweep& s, double alpha, double eps);
// n - j for the maximiser of E_x[T_z]; the fitted slope against log n goes in the note.
DiagnosticSeries worst_state_locator(const SequenceSweep& s);

nlohmann::ordered_json to_json(const SequenceSweep& s);
nlohmann::ordered_json to_json(const DiagnosticSeries& d);

}  // namespace mixhit
