#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cryptolstm {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
	kExitOk = 0,
	kExitFailure = 1,
	kExitNetwork = 2,
	kExitOutput = 3,
	kExitData = 4,
};

/// Environment variable overriding the chart-API base URL.
inline constexpr const char* kApiBaseEnv = "CRYPTOLSTM_API_BASE";

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cryptolstm
