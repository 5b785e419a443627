#include <iostream>

#include "reset_ruin/cli.hpp"

int main(int argc, char** argv)
{
    return reset_ruin::cli::main_entry(argc, argv, std::cout, std::cerr);
}
