#include "iga1d/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "iga1d/errors.hpp"

namespace iga1d {

void Signal::validate() const {
    if (times.size() != accel.size()) throw config_error("signal: column length mismatch");
    if (times.size() < 2) throw config_error("signal: need at least two samples");
    for (size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i + 1] > times[i])) throw config_error("signal: times must be strictly increasing");
}

double interp_signal(const Signal& signal, double t) {
    if (signal.times.empty()) throw config_error("signal: empty record");
    if (t < signal.times.front() || t > signal.times.back()) return 0.0;
    auto it = std::upper_bound(signal.times.begin(), signal.times.end(), t);
    if (it == signal.times.begin()) return signal.accel.front();
    if (it == signal.times.end()) return signal.accel.back();
    const size_t hi = it - signal.times.begin();
    const size_t lo = hi - 1;
    const double f = (t - signal.times[lo]) / (signal.times[hi] - signal.times[lo]);
    return signal.accel[lo] + f * (signal.accel[hi] - signal.accel[lo]);
}

Signal read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open signal file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw config_error("signal: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "time,accel") throw config_error("signal: expected header 'time,accel' in " + path);

    Signal s;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw config_error("signal: missing comma on line " + std::to_string(lineno));
        try {
            size_t used = 0;
            const double t = std::stod(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("trailing");
            const std::string rest = line.substr(comma + 1);
            const double a = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("trailing");
            s.times.push_back(t);
            s.accel.push_back(a);
        } catch (const std::exception&) {
            throw config_error("signal: non-numeric cell on line " + std::to_string(lineno));
        }
    }
    s.validate();
    return s;
}

void write_signal_csv(const Signal& signal, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write signal file: " + path);
    out << "time,accel\n";
    char buf[64];
    for (size_t i = 0; i < signal.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", signal.times[i], signal.accel[i]);
        out << buf;
    }
}

Signal synthetic_burst_signal(double duration, double sample_dt) {
    Signal s;
    const int n = static_cast<int>(std::floor(duration / sample_dt)) + 1;
    s.times.resize(n);
    s.accel.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        const double t = i * sample_dt;
        const double env = std::exp(-0.5 * std::pow((t - 12.0) / 7.0, 2.0));
        const double a = 2.5 * std::sin(2.0 * pi * 1.1 * t) + 1.2 * std::sin(2.0 * pi * 2.3 * t + 0.7) +
                         0.6 * std::sin(2.0 * pi * 0.4 * t + 1.9);
        s.times[i] = t;
        s.accel[i] = env * a;
    }
    return s;
}

}  // namespace iga1d
