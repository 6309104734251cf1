#include <iostream>
#include <string>
#include <vector>

#include "ulr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ulr::cli::run(args, std::cout, std::cerr);
}
