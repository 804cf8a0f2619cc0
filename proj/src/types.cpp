#include "koopuq/types.hpp"

#include <string>

#include "koopuq/errors.hpp"

namespace koopuq {

void TimeSeriesData::validate() const {
    if (!(dt > 0.0)) throw data_error("time series: dt must be positive, got " + std::to_string(dt));
    if (observables.rows() < 1) throw data_error("time series: needs at least one observable row");
    const Eigen::Index q = observables.cols();
    if (inputs.size() > 0 && inputs.cols() != q)
        throw data_error("time series: inputs have " + std::to_string(inputs.cols()) +
                         " columns, observables have " + std::to_string(q));
    if (states.size() > 0 && states.cols() != q)
        throw data_error("time series: states have " + std::to_string(states.cols()) +
                         " columns, observables have " + std::to_string(q));
}

TimeSeriesData TimeSeriesData::slice(Eigen::Index start, Eigen::Index count) const {
    if (start < 0 || count < 0 || start + count > length())
        throw data_error("time series slice [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") out of range, length " +
                         std::to_string(length()));
    TimeSeriesData out;
    out.dt = dt;
    out.t0 = time(start);
    out.observables = observables.middleCols(start, count);
    if (inputs.cols() == length()) out.inputs = inputs.middleCols(start, count);
    if (states.cols() == length()) out.states = states.middleCols(start, count);
    return out;
}

}  // namespace koopuq
