#include <iostream>

#include "dclogit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dclogit::cli_dispatch(args, std::cout, std::cerr);
}
