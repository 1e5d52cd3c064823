#pragma once

#include <string>
#include <vector>

namespace nlgqe {

// Entry point behind the nlgqe binary; args exclude the program name.
// Returns 0 on success, 1 on usage errors, 2 on data errors, 3 on anything
// unexpected.
int run_cli(const std::vector<std::string>& args);

}  // namespace nlgqe
