// series.cpp: observable series and ensemble accumulation

#include "superabsorb/series.hpp"

#include <algorithm>
#include <cmath>

#include "superabsorb/errors.hpp"

namespace superabsorb {

ObservableSeries::ObservableSeries(std::vector<double> times, std::vector<std::string> names)
    : times_(std::move(times)), names_(std::move(names)),
      values_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(times_.size()),
                                    static_cast<Eigen::Index>(names_.size())))
{
}

bool ObservableSeries::has(const std::string& name) const
{
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t ObservableSeries::index(const std::string& name) const
{
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw ConfigError("series has no observable '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

Eigen::VectorXd ObservableSeries::column(const std::string& name) const
{
    return values_.col(static_cast<Eigen::Index>(index(name)));
}

double ObservableSeries::at(std::size_t time_index, const std::string& name) const
{
    return values_(static_cast<Eigen::Index>(time_index), static_cast<Eigen::Index>(index(name)));
}

SeriesAccumulator::SeriesAccumulator(std::vector<double> times, std::vector<std::string> names)
    : times_(std::move(times)), names_(std::move(names))
{
    const auto rows = static_cast<Eigen::Index>(times_.size());
    const auto cols = static_cast<Eigen::Index>(names_.size());
    mean_ = Eigen::MatrixXd::Zero(rows, cols);
    m2_ = Eigen::MatrixXd::Zero(rows, cols);
}

void SeriesAccumulator::add(const Eigen::MatrixXd& sample)
{
    if (sample.rows() != mean_.rows() || sample.cols() != mean_.cols()) {
        throw DomainError("sample shape does not match the accumulator");
    }
    ++count_;
    const Eigen::MatrixXd delta = sample - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(sample - mean_);
}

void SeriesAccumulator::merge(const SeriesAccumulator& other)
{
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const Eigen::MatrixXd delta = other.mean_ - mean_;
    mean_ += delta * (nb / n);
    m2_ += other.m2_ + delta.cwiseProduct(delta) * (na * nb / n);
    count_ += other.count_;
}

EnsembleResult SeriesAccumulator::result() const
{
    EnsembleResult out;
    out.samples = count_;
    out.mean = ObservableSeries(times_, names_);
    out.standard_error = ObservableSeries(times_, names_);
    out.mean.values() = mean_;
    if (count_ > 1) {
        const double n = static_cast<double>(count_);
        out.standard_error.values() = (m2_.cwiseMax(0.0) / (n - 1.0) / n).cwiseSqrt();
    }
    return out;
}

} // namespace superabsorb
