#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aimrom::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericFailure = 3,
  kMissingArtifact = 4,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace aimrom::cli
