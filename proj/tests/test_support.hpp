#pragma once

// Shared builders for the unit suites.

#include <random>
#include <string>
#include <vector>

#include "lrsa/dataset.hpp"

namespace test_support {

inline lrsa::ConsolidatedSeries make_series(const std::vector<double>& times,
                                            const std::vector<double>& values,
                                            const std::string& probe = "g1") {
    lrsa::ConsolidatedSeries s;
    s.probe_id = probe;
    for (std::size_t i = 0; i < times.size(); ++i) {
        s.points.push_back({times[i], values[i], "b" + std::to_string(i)});
    }
    return s;
}

// Series whose points all lie on a + b t + c t^2.
inline lrsa::ConsolidatedSeries quadratic_series(const std::vector<double>& times, double a,
                                                 double b, double c) {
    std::vector<double> v;
    for (double t : times) v.push_back(a + b * t + c * t * t);
    return make_series(times, v);
}

inline const std::vector<double> kDesignTimes = {0.0, 1.0, 3.0, 7.0, 14.0, 30.0};

// Small random series on the standard design, values in roughly [-2, 4].
inline lrsa::ConsolidatedSeries random_series(std::mt19937_64& rng, std::size_t n_extra = 0) {
    std::uniform_real_distribution<double> val(-2.0, 4.0);
    std::vector<double> times = kDesignTimes;
    std::uniform_real_distribution<double> tpick(0.0, 30.0);
    for (std::size_t i = 0; i < n_extra; ++i) times.push_back(std::floor(tpick(rng)));
    std::sort(times.begin(), times.end());
    std::vector<double> values;
    for (std::size_t i = 0; i < times.size(); ++i) values.push_back(val(rng));
    return make_series(times, values);
}

}
