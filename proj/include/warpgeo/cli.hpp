#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "warpgeo/warp.hpp"

namespace warpgeo {

enum class OutputFormat { Json, Csv };

struct RunConfig {
    WarpSpec warp{};
    std::optional<double> abs_tol;
    std::optional<double> rel_tol;
    std::optional<double> max_step;
    std::optional<OutputFormat> format;  // unset means the command's default
    std::optional<std::string> out_path;
    std::optional<std::string> plot_path;  // gnuplot companion script for CSV output
    std::optional<double> tol;
    std::uint64_t seed = 0;

    void validate() const;
};

// Reads a JSON config file of the form
// {"warp": "...", "integrator": {"abs_tol", "rel_tol", "max_step"},
//  "output": {"format", "path", "plot"}, "seed": n, "tol": x}.
RunConfig load_config(const std::string& path);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoGeodesic = 2;

// `args` excludes the program name. WARPGEO_CONFIG names a config file unless
// --config is given; command-line flags override the file.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace warpgeo
