#pragma once

#include <string>
#include <vector>

namespace iga1d {

/// Sampled ground-acceleration record: strictly increasing times (s) and
/// accelerations (m/s^2).
struct Signal {
    std::vector<double> times;
    std::vector<double> accel;

    void validate() const;
};

/// Value at t by linear interpolation between samples; zero outside the
/// recorded window.
double interp_signal(const Signal& signal, double t);

/// Reads a CSV with header `time,accel` (LF or CRLF). Throws io_error on
/// missing files and config_error on malformed content.
Signal read_signal_csv(const std::string& path);

void write_signal_csv(const Signal& signal, const std::string& path);

/// Deterministic synthetic strong-motion burst: a few decaying oscillatory
/// components under a smooth envelope, 50 s at 100 Hz. Stands in for
/// earthquake records that cannot be redistributed.
Signal synthetic_burst_signal(double duration = 50.0, double sample_dt = 0.01);

}  // namespace iga1d
