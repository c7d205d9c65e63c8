#ifndef XLMAP_CLI_HPP
#define XLMAP_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace xlmap::cli {

// Exit codes: 0 success, 1 data/format/I-O error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xlmap::cli

#endif  // XLMAP_CLI_HPP
