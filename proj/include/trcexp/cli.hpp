#ifndef TRCEXP_CLI_HPP
#define TRCEXP_CLI_HPP

#include <iostream>
#include <string>
#include <vector>

namespace trcexp {

// Exit codes: 0 success, 1 input error, 2 internal invariant violation
// (e.g. a dual value above the sphere-packing ceiling on a matched channel).
int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                std::ostream& err = std::cerr);

}  // namespace trcexp

#endif
