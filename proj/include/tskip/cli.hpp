#pragma once

#include <string>
#include <vector>

namespace tskip {
namespace cli {

// Entry point shared by the binary and the tests.
// Commands: train | encode | retrieve | generate | eval | param-count | expand-vocab.
// Each accepts --config <file> of key=value lines plus --key value overrides.
// Exit codes: 0 success, 1 computation error, 2 usage or input error.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace cli
}  // namespace tskip
