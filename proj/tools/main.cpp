#include "cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return orderbench::cli::run(argc, argv, std::cout, std::cerr);
}
