#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sdde::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kBlowUp = 3,
    kIoError = 4,
};

struct ExperimentConfig {
    std::string command;  // simulate | converge | stability | gamma
    std::string model_name = "example1";
    std::string profile_spec;  // empty: the catalog's recommended profile
    std::string scheme;        // tem | stab-tem | em; empty: follows the profile kind
    std::vector<int> n_list;
    int ref_n = 1 << 16;
    double T = 0.0;  // 0: command default
    std::int64_t samples = 0;
    std::int64_t as_samples = 0;
    std::int64_t paths = 1;
    std::uint64_t seed = 0;
    double p_bar = 0.0;  // 0: model default (3 for example1, else 2)
    double epsilon = 0.5;
    std::optional<double> gamma;
    std::vector<double> fit_window;
    std::optional<double> k6_bar, k6, k7_bar, k7;
    double tau = 1.0;
    std::optional<double> mu, k_hat;
    unsigned threads = 0;
    std::string out_dir;
    std::string out_file;
};

/// Parses argv-style arguments (without the program name) and runs the command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdde::cli
