// series.hpp: time series of named observables shared by all solvers

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace superabsorb {

struct SeriesDiagnostics {
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0;   // smallest over sampled grid points
    double max_hermiticity_error = 0.0;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
};

class ObservableSeries {
public:
    ObservableSeries() = default;
    ObservableSeries(std::vector<double> times, std::vector<std::string> names);

    const std::vector<double>& times() const { return times_; }
    const std::vector<std::string>& names() const { return names_; }
    const Eigen::MatrixXd& values() const { return values_; } // rows: times, cols: names
    Eigen::MatrixXd& values() { return values_; }

    bool has(const std::string& name) const;
    std::size_t index(const std::string& name) const; // ConfigError when missing
    Eigen::VectorXd column(const std::string& name) const;
    double at(std::size_t time_index, const std::string& name) const;

    SeriesDiagnostics diagnostics;

private:
    std::vector<double> times_;
    std::vector<std::string> names_;
    Eigen::MatrixXd values_;
};

struct EnsembleResult {
    ObservableSeries mean;
    ObservableSeries standard_error;
    std::size_t samples = 0;
};

// Welford accumulator over whole series; merge() follows Chan et al. so block
// results combine deterministically in any fixed order.
class SeriesAccumulator {
public:
    SeriesAccumulator() = default;
    SeriesAccumulator(std::vector<double> times, std::vector<std::string> names);

    void add(const Eigen::MatrixXd& sample);
    void merge(const SeriesAccumulator& other);
    std::size_t count() const { return count_; }
    EnsembleResult result() const;

private:
    std::vector<double> times_;
    std::vector<std::string> names_;
    std::size_t count_ = 0;
    Eigen::MatrixXd mean_;
    Eigen::MatrixXd m2_;
};

} // namespace superabsorb
