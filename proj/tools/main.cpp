#include "stylo/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return stylo::cli::run({argv, argv + argc}, std::cout, std::cerr);
}
