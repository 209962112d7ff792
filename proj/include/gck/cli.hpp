#pragma once

#include <iosfwd>

namespace gck {

// Exit codes: 0 success, 1 usage, 2 validation, 3 runtime failure.
int cli_main(int argc, char** argv);
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gck
