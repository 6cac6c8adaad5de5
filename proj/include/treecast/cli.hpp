#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace treecast::cli {

// args excludes the program name. Exit codes: 0 success, 1 runtime failure
// or failed verification, 2 usage or configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

// TREECAST_WORKERS if set and positive, else the hardware thread count.
unsigned default_workers();

}  // namespace treecast::cli
