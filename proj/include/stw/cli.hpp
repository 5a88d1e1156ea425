#ifndef STW_CLI_HPP
#define STW_CLI_HPP

#include <string>
#include <vector>

namespace stw {

/// Entry point of the wavelab command-line tool, callable in-process for
/// testing. args excludes the program name. Exit codes: 0 pass, 1 claim
/// failure, 2 configuration error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args);

} // namespace stw

#endif
