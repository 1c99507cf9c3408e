#ifndef PRINTSIG_CLI_HPP
#define PRINTSIG_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace printsig::cli {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFlagged = 2;

// args[0] is the program name. Returns 0 benign/success, 2 flagged, 1 error.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace printsig::cli

#endif  // PRINTSIG_CLI_HPP
