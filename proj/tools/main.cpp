#include <iostream>
#include <string>
#include <vector>

#include "camtrack/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return camtrack::cli::run(args, std::cout, std::cerr);
}
