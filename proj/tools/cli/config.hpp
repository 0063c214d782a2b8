#ifndef DARBOUX_CLI_CONFIG_HPP
#define DARBOUX_CLI_CONFIG_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "darboux/susy.hpp"
#include "darboux/transform.hpp"

namespace darboux::cli {

using Json = nlohmann::ordered_json;

/// Invalid configuration; `path` is a JSON pointer to the offending value.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct Pullback {
    std::string z_of_x;
    double x_min = 0.0;
    double x_max = 0.0;
};

struct Problem {
    bool direct = false;
    // coefficient mode
    std::string A, B, C;
    double x_min = 0.0, x_max = 0.0;
    std::optional<double> base_point;
    // direct mode
    std::string V1;
    double z_min = 0.0, z_max = 0.0;
    std::optional<Pullback> pullback;

    Constants constants;
};

/// Either explicit initial data or a superposition of the quarter-order
/// Bessel modes of V1 = -z^2, evaluated at the anchor.
struct ZeroModeSpec {
    double anchor = 0.0;
    double psi0 = 0.0;
    double dpsi0 = 0.0;
    bool oracle = false;
    double C1 = 0.0;
    double C2 = 0.0;
};

struct Tolerances {
    double quadrature = kDefaultTolerance;
    double gauge = 1e-9;
    double round_trip = 1e-9;
    double equivalence = 1e-6;
    double residual = 1e-5;
    double identity = 1e-12;
};

struct RunConfig {
    Problem problem;
    Index grid_size = kDefaultGridSize;
    std::optional<ZeroModeSpec> zero_mode;
    std::vector<double> lambdas;
    std::string output_directory = "out";
    std::vector<std::string> formats{"csv"};
    Tolerances tolerances;
    /// x-interval over which pullback residuals are judged; the whole x-domain
    /// when absent.
    std::optional<std::pair<double, double>> pullback_window;
};

/// Throws ConfigError naming the JSON path of the first problem found.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);

/// Every default made explicit; parse_config(to_json(c)) reproduces c.
Json to_json(const RunConfig& c);

/// Builds the library problem. Expression errors surface as ConfigError.
ProblemSpec to_problem_spec(const RunConfig& c);

/// Initial data for the zero mode, resolving the oracle form.
InitialData resolve_zero_mode(const ZeroModeSpec& z);

}  // namespace darboux::cli

#endif  // DARBOUX_CLI_CONFIG_HPP
