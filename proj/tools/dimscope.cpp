#include <iostream>

#include "dimscope/cli.hpp"

int main(int argc, char** argv) {
    return dimscope::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
