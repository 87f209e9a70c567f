#include "shmcva/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return shmcva::cli::run_cli(argc, argv, std::cout, std::cerr);
}
