#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anm::cli {

/// Runs one command line. Returns 0 on success, 1 on usage errors, 2 on data
/// or computation errors. Results go to --out; a summary goes to `out`.
int dispatch(int argc, const char* const* argv);
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anm::cli
