#include <iostream>

#include "viab/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return viab::cli::run(args, std::cout, std::cerr);
}
