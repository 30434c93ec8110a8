#pragma once

#include <iosfwd>

namespace orderbench::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kData = 2,
    kEndpoint = 3,
};

/// Entry point of the order_bench command line. Human-readable text goes to
/// out/err; machine output only to the files named by flags.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace orderbench::cli
