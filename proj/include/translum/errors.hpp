#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace translum {

/// Invalid configuration, CLI usage, or input file. CLI exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Decoder found no usable signal in a capture. CLI exit code 3.
struct no_signal_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Frame-start prefix not found in a decoded bit stream.
struct sync_failure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Not enough bits after the prefix to extract a full payload.
struct truncated_frame_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One or more safety limits violated. CLI exit code 4.
struct safety_violation : std::runtime_error {
    safety_violation(std::string msg, std::vector<std::string> limits)
        : std::runtime_error(std::move(msg)), violated_limits(std::move(limits)) {}

    std::vector<std::string> violated_limits;
};

}  // namespace translum
