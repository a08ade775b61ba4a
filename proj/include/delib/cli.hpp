#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace delib {

/// Operator entry point. Subcommands: validate, evaluate, replay, compare,
/// finetune-prep, demo. Exit codes: 0 success, 1 runtime failure,
/// 2 validation or usage error. Errors go to `err` prefixed "error:".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace delib
