#ifndef QSR_CLI_HPP
#define QSR_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace qsr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand. `args` excludes the program name. Diagnostics go
/// to `err`; `bundle-advise` and summaries go to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hardware concurrency capped by the QSR_THREADS environment variable.
unsigned worker_count();

}  // namespace qsr::cli

#endif  // QSR_CLI_HPP
