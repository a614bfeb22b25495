#ifndef sketchla_bench_hh
#define sketchla_bench_hh

#include "sketchla/fwht.hh"
#include "sketchla/verify.hh"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchla {

/// Bad command-line or programmatic benchmark configuration.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class BenchCommand { Sketch, Lsq, KappaSweep };

const char* to_string(BenchCommand command);
std::optional<BenchCommand> parse_command(const std::string& text);

struct BenchConfig {
    BenchCommand command = BenchCommand::Sketch;
    std::vector<std::size_t> d;
    std::vector<std::size_t> n;
    std::vector<std::string> methods;
    std::size_t reps = 3;
    std::uint64_t seed = 42;
    /// 0 leaves the OpenMP default in place.
    int threads = 0;
    std::vector<double> kappa;
    NoiseMode noise = NoiseMode::Easy;
    std::size_t block_threshold = kDefaultFwhtBlock;
    /// Record the warm-up repetition (rep 0) instead of discarding it.
    bool keep_warmup = false;
    /// Runs whose estimated footprint exceeds this many bytes are recorded as
    /// CapacityExceeded instead of executed. 0 means 80% of physical memory.
    std::uint64_t memory_budget = 0;
};

/// Command defaults: sketch and lsq sweep d in {2^16, 2^18}, n in
/// {16, 32, 64, 128}; kappa-sweep uses d = 2^17, n = 16, kappa = 1e2 ... 1e14
/// on consistent systems.
BenchConfig default_config(BenchCommand command);

/// Methods accepted by each command.
const std::vector<std::string>& known_methods(BenchCommand command);

/// Fills empty lists from default_config and checks every field. Throws ConfigError.
void finalize_config(BenchConfig& cfg);

// =============================================================================
/// One CSV row: one (run, phase) pair, plus a "total" row per run.
///
///     method,d,n,k,rep,seed,phase,elapsed_seconds,bytes_moved,flops,
///     relative_residual,status,kappa
///
/// k is the sketch output dimension (0 when the method has none).
/// relative_residual is empty for sketch runs; kappa is empty outside the
/// solver commands. Reals are written as %.16e, which round-trips exactly.
struct BenchRecord {
    std::string method;
    std::size_t d = 0;
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::string phase;
    double elapsed_seconds = 0.0;
    std::uint64_t bytes_moved = 0;
    std::uint64_t flops = 0;
    std::optional<double> relative_residual;
    std::string status;
    std::optional<double> kappa;

    bool operator==(const BenchRecord&) const = default;
};

extern const char* const kCsvHeader;

void write_csv_header(std::ostream& out);
void write_csv_record(std::ostream& out, const BenchRecord& record);
/// Parses a whole CSV document including its header. Throws std::runtime_error
/// on a malformed header or row.
std::vector<BenchRecord> parse_csv(std::istream& in);

using RecordSink = std::function<void(const BenchRecord&)>;

/// The three experiment drivers. Each expects a finalized config.
void cmd_sketch(const BenchConfig& cfg, const RecordSink& sink);
void cmd_lsq(const BenchConfig& cfg, const RecordSink& sink);
void cmd_kappa_sweep(const BenchConfig& cfg, const RecordSink& sink);

/// Finalizes cfg, applies the thread count, and writes header plus records.
void run_bench(BenchConfig cfg, std::ostream& out);

}  // namespace sketchla

#endif
