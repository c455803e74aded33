#include <iostream>
#include <string>
#include <vector>

#include "cryptolstm/cli.hpp"

int main(int argc, char** argv) {
	std::vector<std::string> args(argv, argv + argc);
	return cryptolstm::run_cli(args, std::cout, std::cerr);
}
