#pragma once

#include <iosfwd>

namespace homecore::cli {

// Full command-line entry point on injectable streams. Returns the process
// exit code: 0 ok, 1 domain error, 2 usage error, 3 I/O error.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace homecore::cli
