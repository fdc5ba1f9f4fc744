#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hctree/core.hpp"

namespace hctree::cli {

/// Invalid combination of flags detected after parsing; maps to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { Table, Json, Csv };

struct PointOptions {
    int k = 2;
    double lambda = 1.0;
    double tol = kDefaultTolerance;
    OutputFormat format = OutputFormat::Table;
};

struct CriticalOptions {
    int k = 2;
    double epsilon = 1.0;
    OutputFormat format = OutputFormat::Table;
};

struct OracleOptions {
    int k = 2;
    double lambda = 1.0;
    int depth = 3;
    std::string mode = "ti";
    std::string root = "half";
    std::size_t samples = 0;
    std::uint64_t seed = 1;
    OutputFormat format = OutputFormat::Table;
};

struct WeakOptions {
    int k = 2;
    int i = 1;
    double lambda = 1.0;
    std::string set = "I2";
    double tol = kDefaultTolerance;
    OutputFormat format = OutputFormat::Table;
};

enum class Scale { Linear, Log };

/// Grid and columns of a parameter sweep.
struct SweepSpec {
    int k = 2;
    double lambda_min = 1.0;
    double lambda_max = 2.0;
    int points = 100;
    Scale scale = Scale::Linear;
    std::vector<std::string> quantities;
    // weakperiodic_count only
    int i = 1;
    std::string set = "I2";

    /// Throws UsageError on an invalid grid or quantity.
    void validate() const;
    std::vector<double> grid() const;
    std::vector<std::string> header() const;
};

/// Threads used by the sweep: HC_TREE_THREADS if set and positive, else hardware concurrency.
unsigned sweep_threads();

/// Sweep rendered as CSV text (header plus one row per grid point, in grid order).
std::string sweep_csv(const SweepSpec& spec, unsigned threads);

int cmd_solve(const PointOptions& opt, std::ostream& out);
int cmd_classify(const PointOptions& opt, std::ostream& out);
int cmd_critical(const CriticalOptions& opt, std::ostream& out);
int cmd_oracle(const OracleOptions& opt, std::ostream& out);
int cmd_weak(const WeakOptions& opt, std::ostream& out);
int cmd_sweep(const SweepSpec& spec, const std::optional<std::string>& out_path, std::ostream& out);

}  // namespace hctree::cli
